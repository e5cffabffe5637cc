#include "adelic/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adelic/poly.hpp"

namespace adelic {

bool Place::operator<(const Place& o) const {
  // Archimedean and degree places first, then by uniformizer size, then id.
  auto rank = [](const Place& p) {
    switch (p.kind) {
      case PlaceKind::Archimedean: return 0;
      case PlaceKind::Degree: return 0;
      default: return 1;
    }
  };
  if (rank(*this) != rank(o)) return rank(*this) < rank(o);
  if (kind == PlaceKind::Prime && o.kind == PlaceKind::Prime) return prime < o.prime;
  if (kind == PlaceKind::Irreducible && o.kind == PlaceKind::Irreducible) {
    if (irreducible.size() != o.irreducible.size()) return irreducible.size() < o.irreducible.size();
    return std::lexicographical_compare(irreducible.rbegin(), irreducible.rend(), o.irreducible.rbegin(),
                                        o.irreducible.rend());
  }
  return id < o.id;
}

FqRational make_fq_rational(const FiniteField& F, FqPoly num, FqPoly den) {
  fq::trim(num);
  fq::trim(den);
  if (den.empty()) throw Error("division by zero in F_q(T)");
  if (num.empty()) return {{}, {1}};
  FqPoly g = fq::gcd(F, num, den);
  num = fq::quo(F, num, g);
  den = fq::quo(F, den, g);
  auto inv = F.inv(den.back());
  return {fq::scale(F, num, inv), fq::scale(F, den, inv)};
}

AdelicCurve AdelicCurve::rationals() { return AdelicCurve(); }

AdelicCurve AdelicCurve::function_field(std::uint32_t q) {
  AdelicCurve c;
  c.base_ = BaseKind::FqT;
  c.q_ = q;
  c.field_ = std::make_shared<FiniteField>(q);
  return c;
}

AdelicCurve AdelicCurve::weighted_copies(std::vector<double> weights) {
  if (weights.empty()) throw Error("weighted copies curve needs at least one place");
  for (double w : weights)
    if (!(w >= 0) || !std::isfinite(w)) throw Error("place weights must be finite and nonnegative");
  AdelicCurve c;
  c.base_ = BaseKind::Copies;
  c.weights_ = std::move(weights);
  return c;
}

const FiniteField& AdelicCurve::field() const {
  if (!field_) throw Error("curve has no finite constant field");
  return *field_;
}

bool AdelicCurve::operator==(const AdelicCurve& o) const {
  return base_ == o.base_ && q_ == o.q_ && weights_ == o.weights_;
}

namespace {

FqPoly fq_from_qpoly(const FiniteField& F, const QPoly& p) {
  FqPoly r;
  bool prime_field = F.degree() == 1;
  for (const auto& c : p.coeffs()) {
    if (prime_field) {
      Integer pp = F.characteristic();
      Integer num = c.get_num() % pp, den = c.get_den() % pp;
      if (num < 0) num += pp;
      if (den == 0) throw Error("coefficient denominator vanishes in the constant field");
      r.push_back(F.mul(static_cast<FiniteField::Elem>(num.get_ui()), F.inv(static_cast<FiniteField::Elem>(den.get_ui()))));
    } else {
      if (c.get_den() != 1 || c < 0 || c >= F.order())
        throw Error("coefficients over a prime power field are element indices 0..q-1");
      r.push_back(static_cast<FiniteField::Elem>(c.get_num().get_ui()));
    }
  }
  fq::trim(r);
  return r;
}

int fq_valuation(const FiniteField& F, FqPoly a, const FqPoly& pi) {
  int v = 0;
  while (true) {
    FqPoly q, r;
    fq::divmod(F, a, pi, q, r);
    if (!r.empty()) return v;
    a = q;
    ++v;
  }
}

}  // namespace

FieldElement AdelicCurve::parse(const std::string& text) const {
  if (base_ != BaseKind::FqT) return parse_rational(text);
  auto [num, den] = parse_rational_function(text);
  return make_fq_rational(*field_, fq_from_qpoly(*field_, num), fq_from_qpoly(*field_, den));
}

std::string AdelicCurve::format(const FieldElement& a) const {
  if (const auto* r = std::get_if<Rational>(&a)) return to_string(*r);
  const auto& f = std::get<FqRational>(a);
  if (f.den == FqPoly{1}) return fq::to_string(f.num);
  return "(" + fq::to_string(f.num) + ")/(" + fq::to_string(f.den) + ")";
}

bool AdelicCurve::is_zero(const FieldElement& a) const {
  if (const auto* r = std::get_if<Rational>(&a)) return *r == 0;
  return std::get<FqRational>(a).num.empty();
}

Place AdelicCurve::place(const std::string& id) const {
  Place w;
  w.id = id;
  switch (base_) {
    case BaseKind::Q: {
      if (id == "inf") return w;
      try {
        Rational p = parse_rational(id);
        if (p.get_den() == 1 && is_probable_prime(p.get_num())) {
          w.kind = PlaceKind::Prime;
          w.prime = p.get_num();
          w.log_base = log_abs(w.prime);
          w.id = to_string(w.prime);
          return w;
        }
      } catch (const Error&) {
      }
      break;
    }
    case BaseKind::FqT: {
      if (id == "inf") {
        w.kind = PlaceKind::Degree;
        w.log_base = std::log(static_cast<double>(q_));
        return w;
      }
      try {
        FqPoly pi = fq_from_qpoly(*field_, QPoly::parse(id));
        if (fq::degree(pi) >= 1 && pi.back() == 1 && fq::is_irreducible(*field_, pi)) {
          w.kind = PlaceKind::Irreducible;
          w.irreducible = pi;
          w.weight = fq::degree(pi);
          w.log_base = std::log(static_cast<double>(q_));
          w.id = fq::to_string(pi);
          return w;
        }
      } catch (const Error&) {
      }
      break;
    }
    case BaseKind::Copies: {
      if (id.size() > 1 && id[0] == 'c') {
        try {
          std::size_t pos = 0;
          unsigned long k = std::stoul(id.substr(1), &pos);
          if (pos + 1 == id.size() && k < weights_.size()) {
            w.weight = weights_[k];
            return w;
          }
        } catch (const std::exception&) {
        }
      }
      break;
    }
  }
  throw Error("place not on this curve");
}

std::vector<Place> AdelicCurve::infinite_places() const {
  if (base_ == BaseKind::Copies) {
    std::vector<Place> out;
    for (std::size_t k = 0; k < weights_.size(); ++k) out.push_back(place("c" + std::to_string(k)));
    return out;
  }
  return {place("inf")};
}

std::optional<std::vector<Place>> AdelicCurve::all_places() const {
  if (base_ == BaseKind::Copies) return infinite_places();
  return std::nullopt;
}

double AdelicCurve::total_mass() const {
  if (base_ != BaseKind::Copies) return std::numeric_limits<double>::infinity();
  double s = 0;
  for (double w : weights_) s += w;
  return s;
}

long AdelicCurve::valuation(const FieldElement& a, const Place& w) const {
  if (is_zero(a)) throw Error("valuation of zero");
  switch (w.kind) {
    case PlaceKind::Archimedean: throw Error("valuation at an archimedean place");
    case PlaceKind::Prime: return adelic::valuation(std::get<Rational>(a), w.prime);
    case PlaceKind::Irreducible: {
      const auto& f = std::get<FqRational>(a);
      return fq_valuation(*field_, f.num, w.irreducible) - fq_valuation(*field_, f.den, w.irreducible);
    }
    case PlaceKind::Degree: {
      const auto& f = std::get<FqRational>(a);
      return fq::degree(f.den) - fq::degree(f.num);
    }
  }
  return 0;
}

double AdelicCurve::log_absolute_value(const FieldElement& a, const Place& w) const {
  place(w.id);  // validates membership
  if (is_zero(a)) return -std::numeric_limits<double>::infinity();
  if (w.archimedean()) return log_abs(std::get<Rational>(a));
  return -static_cast<double>(valuation(a, w)) * w.log_base;
}

double AdelicCurve::absolute_value(const FieldElement& a, const Place& w) const {
  if (is_zero(a)) {
    place(w.id);
    return 0;
  }
  if (w.archimedean()) {
    place(w.id);
    return std::fabs(std::get<Rational>(a).get_d());
  }
  return absolute_value_exact(a, w).get_d();
}

Rational AdelicCurve::absolute_value_exact(const FieldElement& a, const Place& w) const {
  place(w.id);
  if (is_zero(a)) return 0;
  if (w.archimedean()) return abs(std::get<Rational>(a));
  long v = valuation(a, w);
  Rational base = w.kind == PlaceKind::Prime ? Rational(w.prime) : Rational(q_);
  Rational r = pow(base, static_cast<unsigned long>(std::labs(v)));
  return v > 0 ? Rational(1 / r) : r;
}

std::vector<Place> AdelicCurve::place_support(const FieldElement& a) const {
  if (is_zero(a)) throw Error("zero has no support");
  std::vector<Place> out;
  switch (base_) {
    case BaseKind::Q: {
      const auto& r = std::get<Rational>(a);
      if (abs(r) != 1) out.push_back(place("inf"));
      std::vector<Integer> primes = prime_factors(r.get_num());
      for (const auto& p : prime_factors(r.get_den())) primes.push_back(p);
      std::sort(primes.begin(), primes.end());
      for (const auto& p : primes) out.push_back(place(to_string(p)));
      break;
    }
    case BaseKind::FqT: {
      const auto& f = std::get<FqRational>(a);
      if (fq::degree(f.num) != fq::degree(f.den)) out.push_back(place("inf"));
      std::vector<FqPoly> irr;
      for (const auto* poly : {&f.num, &f.den})
        if (fq::degree(*poly) > 0)
          for (auto& [g, m] : fq::factor(*field_, *poly)) irr.push_back(g);
      for (const auto& g : irr) out.push_back(place(fq::to_string(g)));
      break;
    }
    case BaseKind::Copies: {
      if (abs(std::get<Rational>(a)) != 1) out = infinite_places();
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double AdelicCurve::product_formula_defect(const FieldElement& a) const {
  if (is_zero(a)) throw Error("zero has no support");
  double s = 0;
  for (const auto& w : place_support(a)) s += w.weight * log_absolute_value(a, w);
  return s;
}

double AdelicCurve::integrate(const PlaceFunction& g) const {
  double s = 0, listed = 0;
  for (const auto& [id, v] : g.values) {
    Place w = place(id);
    s += w.weight * v;
    listed += w.weight;
  }
  if (g.default_value != 0) {
    double tail = total_mass() - listed;
    if (!std::isfinite(tail)) throw Error("divergent integral");
    s += tail * g.default_value;
  }
  return s;
}

}  // namespace adelic
