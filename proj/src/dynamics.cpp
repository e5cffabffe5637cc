#include "adelic/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "adelic/factor.hpp"
#include "adelic/linalg.hpp"
#include "adelic/roots.hpp"

namespace adelic {

namespace {

using LComplex = std::complex<long double>;

long double to_ld(const Rational& q) {
  return static_cast<long double>(q.get_num().get_d()) / static_cast<long double>(q.get_den().get_d());
}

// Homogeneous lift with long double coefficients.
struct ComplexLift {
  int d = 2;
  std::vector<LComplex> c0, c1;

  static ComplexLift of(const Endomorphism& f) {
    ComplexLift L;
    L.d = f.degree();
    for (const auto& c : f.lift(0)) L.c0.emplace_back(to_ld(c), 0.0L);
    for (const auto& c : f.lift(1)) L.c1.emplace_back(to_ld(c), 0.0L);
    return L;
  }
  static ComplexLift primitive_of(const Endomorphism& f) {
    ComplexLift L;
    L.d = f.degree();
    for (const auto& c : f.primitive(0)) L.c0.emplace_back(static_cast<long double>(c.get_d()), 0.0L);
    for (const auto& c : f.primitive(1)) L.c1.emplace_back(static_cast<long double>(c.get_d()), 0.0L);
    return L;
  }

  static LComplex form(const std::vector<LComplex>& c, LComplex x, LComplex y) {
    // sum c_i x^i y^{d-i}, Horner in whichever ratio is bounded.
    const std::size_t d = c.size() - 1;
    if (std::abs(x) >= std::abs(y)) {
      LComplex w = y / x, s = 0;
      for (std::size_t i = 0; i <= d; ++i) s = s * w + c[i];
      return s * std::pow(x, static_cast<int>(d));
    }
    LComplex w = x / y, s = 0;
    for (std::size_t i = 0; i <= d; ++i) s = s * w + c[d - i];
    return s * std::pow(y, static_cast<int>(d));
  }

  std::pair<LComplex, LComplex> apply(LComplex x, LComplex y) const { return {form(c0, x, y), form(c1, x, y)}; }
};

long double normalize(LComplex& x, LComplex& y) {
  long double m = std::max(std::abs(x), std::abs(y));
  if (!(m > 0) || !std::isfinite(m)) throw Error("iterate left the projective line numerically");
  x /= m;
  y /= m;
  return std::log(m);
}

// ln ||(x,y)|| + sum_{i<n} d^{-(i+1)} lambda(F^i(x,y)); optionally records the
// increments d^{-(i+1)} |lambda|.
double g_hom(const ComplexLift& L, LComplex x, LComplex y, int depth, std::vector<double>* incr = nullptr) {
  long double acc = normalize(x, y);
  long double scale = 1;
  for (int i = 0; i < depth; ++i) {
    scale /= L.d;
    auto [u, v] = L.apply(x, y);
    long double lam = normalize(u, v);
    acc += scale * lam;
    if (incr) (*incr)[static_cast<std::size_t>(i)] = std::max((*incr)[static_cast<std::size_t>(i)], static_cast<double>(std::fabs(scale * lam)));
    x = u;
    y = v;
  }
  return static_cast<double>(acc);
}

double grid_lambda_sup(const ComplexLift& L, const VerificationGrid& grid) {
  double s = 0;
  auto lam = [&](LComplex x, LComplex y) {
    normalize(x, y);
    auto [u, v] = L.apply(x, y);
    return std::fabs(static_cast<double>(normalize(u, v)));
  };
  // The refined grid plus the unit circle, where the naive metric has its kink.
  for (const auto& z : grid.refined().points()) s = std::max(s, lam(LComplex(z.real(), z.imag()), 1.0L));
  const int m = 4 * grid.n_angle;
  for (int k = 0; k < m; ++k) s = std::max(s, lam(std::polar(1.0L, 2 * std::numbers::pi_v<long double> * k / m), 1.0L));
  s = std::max(s, lam(0.0L, 1.0L));
  s = std::max(s, lam(1.0L, 0.0L));
  return 1.05 * s;
}

Integer ipow(const Integer& p, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), e);
  return r;
}

long valuation_or(const Integer& z, const Integer& p, long cap) { return z == 0 ? cap : valuation(z, p); }

// Primitive integer pair (a, b) with z = a/b; infinity is (1, 0).
std::pair<Integer, Integer> primitive_pair(const std::optional<Rational>& z) {
  if (!z) return {Integer(1), Integer(0)};
  return {Integer(z->get_num()), Integer(z->get_den())};
}

Integer eval_form(const std::vector<Integer>& c, const Integer& x, const Integer& y) {
  // Homogeneous Horner: sum c_i x^i y^{d-i}.
  const std::size_t d = c.size() - 1;
  Integer s = c[d], ypow = 1;
  for (std::size_t i = 1; i <= d; ++i) {
    ypow *= y;
    s = s * x + c[d - i] * ypow;
  }
  return s;
}

double log_abs_place(const Rational& q, const Place& w) {
  if (w.archimedean()) return log_abs(q);
  return -static_cast<double>(valuation(q, w.prime)) * w.log_base;
}

// p(b) mod m by Horner.
QPoly eval_mod(const QPoly& p, const QPoly& b, const QPoly& m) {
  QPoly acc;
  for (int i = p.degree(); i >= 0; --i) acc = (acc * b + QPoly::constant(p[i])) % m;
  return acc;
}

double log_mahler(const QPoly& p) {
  auto z = p.primitive_integer();
  if (p.degree() == 1) {
    Integer a = abs(z[1]), b = abs(z[0]);
    return log_abs(a > b ? a : b);
  }
  double s = log_abs(z.back());
  for (const auto& r : complex_roots(QPoly::from_integer(z)).roots)
    s += std::max(0.0, static_cast<double>(std::log(std::abs(r))));
  return s;
}

QPoly radical(const QPoly& c) {
  QPoly g = gcd(c, c.derivative());
  return g.degree() > 0 ? (c / g).monic() : c.monic();
}

// F_j(A, B) for polynomial arguments.
QPoly compose_form(const std::vector<Rational>& c, const QPoly& A, const QPoly& B) {
  const int d = static_cast<int>(c.size()) - 1;
  QPoly s;
  for (int i = 0; i <= d; ++i)
    if (c[i] != 0) s = s + A.pow(static_cast<unsigned>(i)) * B.pow(static_cast<unsigned>(d - i)) * c[i];
  return s;
}

}  // namespace

// ---------------------------------------------------------------- maps

Endomorphism::Endomorphism(QPoly num, QPoly den, Rational alpha)
    : num_(std::move(num)), den_(std::move(den)), alpha_(std::move(alpha)) {
  if (den_.is_zero()) throw Error("map denominator is zero");
  if (num_.is_zero()) throw Error("degree must exceed 1");
  if (alpha_ == 0) throw Error("alpha must be nonzero");
  if (gcd(num_, den_).degree() > 0) throw Error("numerator and denominator must be coprime");
  d_ = std::max(num_.degree(), den_.degree());
  if (d_ < 2) throw Error("degree must exceed 1");
  f0_.assign(static_cast<std::size_t>(d_) + 1, Rational(0));
  f1_ = f0_;
  for (int i = 0; i <= num_.degree(); ++i) f0_[i] = alpha_ * num_[i];
  for (int i = 0; i <= den_.degree(); ++i) f1_[i] = alpha_ * den_[i];

  Integer g = 0, l = 1;
  for (const auto* v : {&f0_, &f1_})
    for (const auto& c : *v)
      if (c != 0) {
        g = gcd(g, Integer(c.get_num()));
        l = lcm(l, Integer(c.get_den()));
      }
  content_ = Rational(g, l);
  content_.canonicalize();
  for (const auto& c : f0_) p0_.push_back(Integer(Rational(c / content_).get_num()));
  for (const auto& c : f1_) p1_.push_back(Integer(Rational(c / content_).get_num()));

  // Sylvester matrix of the two binary forms of degree d.
  const std::size_t n = 2 * static_cast<std::size_t>(d_);
  std::vector<std::vector<Rational>> S(n, std::vector<Rational>(n, Rational(0)));
  for (int r = 0; r < d_; ++r)
    for (int i = 0; i <= d_; ++i) {
      S[r][r + i] = Rational(p0_[d_ - i]);
      S[d_ + r][r + i] = Rational(p1_[d_ - i]);
    }
  Rational res = rational_det(S);
  if (res == 0) throw Error("numerator and denominator must be coprime");
  res_ = abs(Integer(res.get_num()));
}

Endomorphism Endomorphism::parse(const std::string& text, const Rational& alpha) {
  auto [num, den] = parse_rational_function(text);
  return Endomorphism(num, den, alpha);
}

bool Endomorphism::monomial() const {
  if (den_.degree() != 0 || num_.degree() != d_) return false;
  for (int i = 0; i < d_; ++i)
    if (num_[i] != 0) return false;
  return true;
}

std::optional<Rational> Endomorphism::operator()(const std::optional<Rational>& z) const {
  if (!z) {
    if (num_.degree() > den_.degree()) return std::nullopt;
    if (num_.degree() < den_.degree()) return Rational(0);
    return Rational(num_.leading() / den_.leading());
  }
  Rational dv = den_.eval(*z);
  if (dv == 0) return std::nullopt;
  return Rational(num_.eval(*z) / dv);
}

std::complex<long double> Endomorphism::eval(std::complex<long double> z) const { return num_.eval(z) / den_.eval(z); }

std::string Endomorphism::describe() const {
  std::string s = den_ == QPoly::constant(1) ? num_.to_string() : "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
  if (alpha_ != 1) s += " [alpha " + to_string(alpha_) + "]";
  return s;
}

// ---------------------------------------------------------------- local potentials

double tate_lambda(const Endomorphism& f, std::complex<long double> x, std::complex<long double> y) {
  auto L = ComplexLift::of(f);
  long double m = normalize(x, y);
  (void)m;
  auto [u, v] = L.apply(x, y);
  return static_cast<double>(normalize(u, v));
}

double tate_potential(const Endomorphism& f, std::complex<long double> z, int depth) {
  return g_hom(ComplexLift::of(f), z, 1.0L, depth);
}

double tate_potential_at_infinity(const Endomorphism& f, int depth) {
  return g_hom(ComplexLift::of(f), 1.0L, 0.0L, depth);
}

double tate_potential_padic(const Endomorphism& f, const Integer& p, const std::optional<Rational>& z, int depth) {
  if (depth < 0) throw Error("depth must be nonnegative");
  const double lp = log_abs(p);
  const double lc = -static_cast<double>(valuation(f.content(), p)) * lp;
  const long vr = valuation(f.resultant(), p);
  auto [a, b] = primitive_pair(z);
  double phi0 = static_cast<double>(valuation_or(b, p, 0)) * lp;  // ln max(|z|_p, 1)
  long prec = (depth + 1) * (vr + 1) + 1;
  Integer mod = ipow(p, static_cast<unsigned long>(prec));
  Integer x = a % mod, y = b % mod;
  double acc = 0, scale = 1;
  for (int i = 0; i < depth; ++i) {
    scale /= f.degree();
    Integer u = eval_form(f.primitive(0), x, y) % mod, v = eval_form(f.primitive(1), x, y) % mod;
    long m = std::min(valuation_or(u, p, prec), valuation_or(v, p, prec));
    if (m > vr) throw Error("p-adic iteration lost precision");
    acc += scale * (lc - static_cast<double>(m) * lp);
    Integer pm = ipow(p, static_cast<unsigned long>(m));
    prec -= m;
    mod = ipow(p, static_cast<unsigned long>(prec));
    x = (u / pm) % mod;
    y = (v / pm) % mod;
  }
  return phi0 + acc;
}

double lambda_sup_padic(const Endomorphism& f, const Integer& p) {
  const double lp = log_abs(p);
  const double lc = -static_cast<double>(valuation(f.content(), p)) * lp;
  const double vr = static_cast<double>(valuation(f.resultant(), p));
  return std::max(std::fabs(lc), std::fabs(lc - vr * lp));
}

bool good_reduction(const Endomorphism& f, const Integer& p) { return valuation(f.resultant(), p) == 0; }

std::vector<Integer> special_primes(const Endomorphism& f) {
  std::set<Integer> s;
  for (const Integer& z : {Integer(f.content().get_num()), Integer(f.content().get_den()), f.resultant()})
    if (abs(z) > 1)
      for (const auto& p : prime_factors(z)) s.insert(p);
  return {s.begin(), s.end()};
}

double TateApprox::error_bound() const {
  return lambda_sup * std::pow(static_cast<double>(degree), -depth) / (degree - 1);
}

double lambda_sup_infinity(const Endomorphism& f, const VerificationGrid& grid) {
  grid.validate();
  return grid_lambda_sup(ComplexLift::of(f), grid);
}

int depth_for_tolerance(double lambda_sup, int d, double tol) {
  if (!(tol > 0)) throw Error("tolerance must be positive");
  if (d < 2) throw Error("degree must exceed 1");
  if (lambda_sup <= tol * (d - 1)) return 0;
  return static_cast<int>(std::ceil(std::log(lambda_sup / (tol * (d - 1))) / std::log(static_cast<double>(d)) - 1e-12));
}

std::optional<Roof> canonical_roof(const Endomorphism& f, const Place& w) {
  const double d1 = f.degree() - 1;
  if (f.monomial()) {
    Rational a = f.numerator().leading(), b = f.denominator()[0];
    return Roof::affine(log_abs_place(f.alpha() * b, w) / d1, log_abs_place(a / b, w) / d1);
  }
  if (w.kind == PlaceKind::Prime && good_reduction(f, w.prime))
    return Roof::constant(log_abs_place(f.content(), w) / d1);
  return std::nullopt;
}

namespace {

TateApprox tate_archimedean(const Endomorphism& f, int depth, const VerificationGrid& grid,
                            const std::function<double(LComplex, LComplex)>* phi0) {
  if (depth < 0) throw Error("depth must be nonnegative");
  grid.validate();
  TateApprox T;
  T.place = "inf";
  T.depth = depth;
  T.degree = f.degree();
  T.increments.assign(static_cast<std::size_t>(depth), 0.0);
  auto L = ComplexLift::of(f);
  T.points = grid.points();
  T.points.emplace_back(0.0, 0.0);
  T.points.emplace_back(std::nan(""), std::nan(""));
  auto hom = [](const CPoint& z) -> std::pair<LComplex, LComplex> {
    if (std::isnan(z.real())) return {1.0L, 0.0L};
    return {LComplex(z.real(), z.imag()), 1.0L};
  };
  if (!phi0) {
    T.lambda_sup = grid_lambda_sup(L, grid);
    for (const auto& z : T.points) {
      auto [x, y] = hom(z);
      long double n0 = std::max(std::abs(x), std::abs(y));
      T.correction.push_back(g_hom(L, x, y, depth, &T.increments) - static_cast<double>(std::log(n0)));
    }
    if (f.monomial()) T.roof = canonical_roof(f, Place{});
    return T;
  }
  const auto& P0 = *phi0;
  auto lam = [&](LComplex x, LComplex y) {
    auto [u, v] = L.apply(x, y);
    return P0(u, v) - f.degree() * P0(x, y);
  };
  double s = 0;
  for (const auto& z : T.points) {
    auto [x, y] = hom(z);
    s = std::max(s, std::fabs(lam(x, y)));
  }
  T.lambda_sup = 1.05 * s;
  for (const auto& z : T.points) {
    auto [x, y] = hom(z);
    double acc = 0, scale = 1;
    for (int i = 0; i < depth; ++i) {
      scale /= f.degree();
      normalize(x, y);
      double l = lam(x, y);
      acc += scale * l;
      T.increments[static_cast<std::size_t>(i)] = std::max(T.increments[static_cast<std::size_t>(i)], std::fabs(scale * l));
      auto [u, v] = L.apply(x, y);
      x = u;
      y = v;
    }
    T.correction.push_back(acc);
  }
  return T;
}

}  // namespace

TateApprox tate_local_potential(const Endomorphism& f, const std::string& place, int depth, const VerificationGrid& grid) {
  Place w = AdelicCurve::rationals().place(place);
  if (w.archimedean()) return tate_archimedean(f, depth, grid, nullptr);
  if (depth < 0) throw Error("depth must be nonnegative");
  TateApprox T;
  T.place = w.id;
  T.depth = depth;
  T.degree = f.degree();
  T.lambda_sup = lambda_sup_padic(f, w.prime);
  T.roof = canonical_roof(f, w);
  T.increments.assign(static_cast<std::size_t>(depth), 0.0);
  std::vector<std::optional<Rational>> pts{Rational(0), std::nullopt};
  for (int k = -6; k <= 6; ++k)
    for (int u : {1, -1, 2, 3, 5, 7}) {
      Rational z = Rational(u) * (k >= 0 ? Rational(ipow(w.prime, static_cast<unsigned long>(k)))
                                         : Rational(Integer(1), ipow(w.prime, static_cast<unsigned long>(-k))));
      z.canonicalize();
      if (std::find(pts.begin(), pts.end(), std::optional<Rational>(z)) == pts.end()) pts.push_back(z);
    }
  for (const auto& z : pts) {
    T.points.push_back(z ? CPoint(z->get_d(), 0.0) : CPoint(std::nan(""), std::nan("")));
    double phi0 = z ? static_cast<double>(valuation_or(Integer(z->get_den()), w.prime, 0)) * w.log_base : 0.0;
    double prev = 0;
    for (int n = 1; n <= depth; ++n) {
      double h = tate_potential_padic(f, w.prime, z, n) - phi0;
      T.increments[static_cast<std::size_t>(n - 1)] = std::max(T.increments[static_cast<std::size_t>(n - 1)], std::fabs(h - prev));
      prev = h;
    }
    T.correction.push_back(prev);
  }
  return T;
}

TateApprox tate_local_potential(const Endomorphism& f, const LocalMetric& phi0, int depth, const VerificationGrid& grid) {
  if (phi0.level() != 1) throw Error("starting metric must live on O(1)");
  std::function<double(LComplex, LComplex)> P0 = [&](LComplex x, LComplex y) -> double {
    if (std::abs(y) == 0) return phi0.potential_at_infinity() + static_cast<double>(std::log(std::abs(x)));
    LComplex z = x / y;
    CPoint zc(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    if (std::abs(y) >= std::abs(x)) return phi0.potential(zc) + static_cast<double>(std::log(std::abs(y)));
    return phi0.potential(zc) - std::log(std::abs(zc)) + static_cast<double>(std::log(std::abs(x)));
  };
  return tate_archimedean(f, depth, grid, &P0);
}

// ---------------------------------------------------------------- families

DynamicalPotential::DynamicalPotential(Endomorphism f, Place w, int depth) : f_(std::move(f)), w_(std::move(w)), depth_(depth) {
  if (depth < 0) throw Error("depth must be nonnegative");
  if (!w_.archimedean() && w_.kind != PlaceKind::Prime) throw Error("place not on this curve");
}

double DynamicalPotential::potential(CPoint z) const {
  if (w_.archimedean()) return tate_potential(f_, LComplex(z.real(), z.imag()), depth_);
  if (z.imag() != 0 || !std::isfinite(z.real())) throw Error("p-adic potentials are evaluated at rational points");
  return potential_rational(Rational(z.real()));
}

double DynamicalPotential::potential_at_infinity() const {
  if (w_.archimedean()) return tate_potential_at_infinity(f_, depth_);
  return potential_rational(std::nullopt);
}

double DynamicalPotential::potential_rational(const std::optional<Rational>& z) const {
  if (w_.archimedean()) {
    if (!z) return potential_at_infinity();
    return tate_potential(f_, LComplex(to_ld(*z), 0.0L), depth_);
  }
  return tate_potential_padic(f_, w_.prime, z, depth_);
}

std::string DynamicalPotential::describe() const {
  return "canonical potential of " + f_.describe() + " at " + w_.id + ", depth " + std::to_string(depth_);
}

std::map<std::string, int> canonical_depths(const Endomorphism& f, double tol) {
  AdelicCurve Q = AdelicCurve::rationals();
  std::map<std::string, int> out;
  out["inf"] = f.monomial() ? 0 : depth_for_tolerance(lambda_sup_infinity(f), f.degree(), tol);
  for (const auto& p : special_primes(f)) {
    Place w = Q.place(to_string(p));
    out[w.id] = canonical_roof(f, w) ? 0 : depth_for_tolerance(lambda_sup_padic(f, p), f.degree(), tol);
  }
  return out;
}

MetricFamily canonical_metric_family(const Endomorphism& f, double tol) {
  if (!(tol > 0)) throw Error("tolerance must be positive");
  AdelicCurve Q = AdelicCurve::rationals();
  std::map<std::string, LocalMetric> ex;
  for (const auto& [id, depth] : canonical_depths(f, tol)) {
    Place w = Q.place(id);
    if (auto roof = canonical_roof(f, w)) ex.emplace(id, LocalMetric::toric(1, *roof));
    else ex.emplace(id, LocalMetric::dynamical(std::make_shared<DynamicalPotential>(f, w, depth)));
  }
  return MetricFamily(Q, LocalMetric(), ex);
}

// ---------------------------------------------------------------- points and heights

ClosedPoint ClosedPoint::rational(const Rational& a) { return {QPoly({-a, Rational(1)}), false}; }

ClosedPoint ClosedPoint::at_infinity() { return {QPoly(), true}; }

ClosedPoint ClosedPoint::from_polynomial(const QPoly& p) {
  if (p.degree() < 1) throw Error("a closed point needs a nonconstant polynomial");
  if (!is_irreducible(p)) throw Error("minimal polynomial is not irreducible");
  return {p.monic(), false};
}

ClosedPoint ClosedPoint::parse(const std::string& text) {
  if (text == "inf" || text == "infinity") return at_infinity();
  try {
    return rational(parse_rational(text));
  } catch (const Error&) {
  }
  return from_polynomial(QPoly::parse(text));
}

std::optional<Rational> ClosedPoint::as_rational() const {
  if (infinity || minimal.degree() != 1) return std::nullopt;
  return Rational(-minimal[0] / minimal[1]);
}

std::string ClosedPoint::describe() const {
  if (infinity) return "inf";
  if (auto r = as_rational()) return to_string(*r);
  return minimal.to_string();
}

double naive_height(const ClosedPoint& P) {
  if (P.infinity) return 0;
  return log_mahler(P.minimal) / P.degree();
}

double canonical_height_local(const Endomorphism& f, const ClosedPoint& P, double tol) {
  const int d = f.degree();
  const int depth_inf = std::min(depth_for_tolerance(lambda_sup_infinity(f), d, tol), 4000);
  const auto special = special_primes(f);
  auto depth_p = [&](const Integer& p) { return std::min(depth_for_tolerance(lambda_sup_padic(f, p), d, tol), 4000); };

  if (P.infinity || P.degree() == 1) {
    std::optional<Rational> z = P.as_rational();
    double s = z ? tate_potential(f, LComplex(to_ld(*z), 0.0L), depth_inf) : tate_potential_at_infinity(f, depth_inf);
    std::set<Integer> primes(special.begin(), special.end());
    if (z && z->get_den() != 1)
      for (const auto& p : prime_factors(Integer(z->get_den()))) primes.insert(p);
    for (const auto& p : primes) s += tate_potential_padic(f, p, z, depth_p(p));
    return s;
  }

  for (const auto& p : special)
    if (!good_reduction(f, p))
      throw Error("local heights of non-rational points need good reduction at every prime");
  const int D = P.degree();
  auto zp = P.minimal.primitive_integer();
  QPoly m = QPoly::from_integer(zp);
  double s = 0;
  auto L = ComplexLift::of(f);
  for (const auto& r : complex_roots(m).roots) s += g_hom(L, r, 1.0L, depth_inf);
  std::set<Integer> primes(special.begin(), special.end());
  if (abs(zp.back()) > 1)
    for (const auto& p : prime_factors(zp.back())) primes.insert(p);
  for (const auto& p : primes) {
    const double lp = log_abs(p);
    for (const auto& [v, count] : newton_polygon(m, p).slopes)
      if (v < 0) s += count * Rational(-v).get_d() * lp;
    s += D * (-static_cast<double>(valuation(f.content(), p)) * lp) / (d - 1);
  }
  return s / D;
}

HeightResult canonical_height(const Endomorphism& f, const ClosedPoint& P, const HeightOptions& opt) {
  if (opt.depth < 0) throw Error("depth must be nonnegative");
  const int d = f.degree();
  HeightResult R;
  R.constant = grid_lambda_sup(ComplexLift::primitive_of(f), VerificationGrid{}) + log_abs(f.resultant());
  auto too_big = [&](std::size_t bits) {
    if (bits > opt.bit_budget) throw Error("increase budget or lower depth");
  };
  double scale = 1;

  // Rational orbit on primitive integer pairs.
  auto run_rational = [&](Integer x, Integer y, int start) {
    std::vector<std::pair<Integer, Integer>> seen;
    for (int n = start; n <= opt.depth; ++n) {
      Integer ax = abs(x), ay = abs(y);
      R.trace.push_back(scale * log_abs(ax > ay ? ax : ay));
      R.depth = n;
      if (std::find(seen.begin(), seen.end(), std::make_pair(x, y)) != seen.end()) {
        R.preperiodic = true;
        return;
      }
      seen.emplace_back(x, y);
      if (n == opt.depth) return;
      Integer u = eval_form(f.primitive(0), x, y), v = eval_form(f.primitive(1), x, y);
      Integer g = gcd(u, v);
      x = u / g;
      y = v / g;
      if (y < 0 || (y == 0 && x < 0)) {
        x = -x;
        y = -y;
      }
      too_big(std::max(mpz_sizeinbase(x.get_mpz_t(), 2), mpz_sizeinbase(y.get_mpz_t(), 2)));
      scale /= d;
    }
  };

  if (P.infinity || P.degree() == 1) {
    auto [a, b] = primitive_pair(P.as_rational());
    run_rational(a, b, 0);
  } else {
    const QPoly& m = P.minimal;
    QPoly beta = QPoly::x();
    std::vector<QPoly> seen;
    for (int n = 0; n <= opt.depth; ++n) {
      QPoly mp = radical(char_poly_mod(beta, m));
      R.trace.push_back(scale * log_mahler(mp) / mp.degree());
      R.depth = n;
      if (std::find(seen.begin(), seen.end(), beta) != seen.end()) {
        R.preperiodic = true;
        break;
      }
      seen.push_back(beta);
      if (n == opt.depth) break;
      QPoly db = eval_mod(f.denominator(), beta, m);
      QPoly nb = eval_mod(f.numerator(), beta, m);
      scale /= d;
      if (db.is_zero()) {
        // The orbit hit a pole: continue from infinity.
        run_rational(Integer(1), Integer(0), n + 1);
        break;
      }
      beta = (nb * inverse_mod(db, m)) % m;
      too_big(max_coeff_bits(beta));
    }
  }
  R.value = R.preperiodic ? 0.0 : R.trace.back();
  R.error_bound = R.preperiodic ? 0.0 : R.constant * std::pow(static_cast<double>(d), -R.depth) / (d - 1);
  if (opt.local_check) {
    try {
      R.local = canonical_height_local(f, P, opt.tol);
    } catch (const Error&) {
      R.local.reset();
    }
  }
  return R;
}

Rational commuting_compatibility_factor(const Endomorphism& f, const Endomorphism& g) {
  auto lift_poly = [](const Endomorphism& h, int j) { return QPoly(h.lift(j)); };
  QPoly F0 = lift_poly(f, 0), F1 = lift_poly(f, 1), G0 = lift_poly(g, 0), G1 = lift_poly(g, 1);
  QPoly H0 = compose_form(f.lift(0), G0, G1), H1 = compose_form(f.lift(1), G0, G1);
  QPoly K0 = compose_form(g.lift(0), F0, F1), K1 = compose_form(g.lift(1), F0, F1);
  const QPoly& ref = K0.is_zero() ? K1 : K0;
  const QPoly& num = K0.is_zero() ? H1 : H0;
  if (ref.is_zero() || num.is_zero()) throw Error("not a commuting pair");
  Rational r = num.leading() / ref.leading();
  if (H0 != K0 * r || H1 != K1 * r) throw Error("not a commuting pair");
  return r;
}

ConstantCheck dynamic_constant_check(const Endomorphism& f, const std::function<double(CPoint)>& lambda, double b,
                                     double a, const VerificationGrid& grid) {
  if (!(b > 1)) throw Error("the multiplier b must exceed 1");
  ConstantCheck C;
  C.constant = -a / (b - 1);
  auto pts = grid.points();
  pts.emplace_back(0.0, 0.0);
  for (const auto& z : pts) {
    auto w = f.eval(LComplex(z.real(), z.imag()));
    CPoint fz(static_cast<double>(w.real()), static_cast<double>(w.imag()));
    double lz = lambda(z);
    C.deviation = std::max(C.deviation, std::fabs(lz - C.constant));
    if (!std::isfinite(fz.real()) || !std::isfinite(fz.imag())) continue;
    C.residual = std::max(C.residual, std::fabs(lambda(fz) - b * lz - a));
  }
  C.equation_holds = C.residual <= 1e-9;
  C.constant_holds = C.deviation <= 1e-8;
  return C;
}

double functional_equation_residual(const Endomorphism& f, int depth, const VerificationGrid& grid) {
  auto L = ComplexLift::of(f);
  auto pts = grid.points();
  double r = 0;
  auto check = [&](LComplex x, LComplex y) {
    auto [u, v] = L.apply(x, y);
    r = std::max(r, std::fabs(g_hom(L, u, v, depth) - f.degree() * g_hom(L, x, y, depth)));
  };
  for (const auto& z : pts) check(LComplex(z.real(), z.imag()), 1.0L);
  check(0.0L, 1.0L);
  check(1.0L, 0.0L);
  return r;
}

}  // namespace adelic
