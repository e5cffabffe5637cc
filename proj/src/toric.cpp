#include "adelic/toric.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace adelic {

Rational snap_rational(double x) {
  if (!std::isfinite(x)) throw Error("non-finite value where a rational was expected");
  // Continued fraction convergents with denominator up to 10^6.
  double a = x;
  Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int it = 0; it < 40; ++it) {
    double fl = std::floor(a);
    Integer ai(fl);
    Integer h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > 1000000) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    Rational cand(h1, k1);
    cand.canonicalize();
    if (std::fabs(cand.get_d() - x) <= 1e-12 * std::max(1.0, std::fabs(x))) return cand;
    double frac = a - fl;
    if (frac < 1e-300) break;
    a = 1.0 / frac;
  }
  Rational exact(x);
  return exact;
}

Roof::Roof(std::vector<Rational> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() < 2 || x_.size() != y_.size()) throw Error("roof needs at least two breakpoints with values");
  if (x_.front() != 0 || x_.back() != 1) throw Error("roof breakpoints must span [0,1]");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw Error("roof breakpoints must increase strictly");
  for (double v : y_)
    if (!std::isfinite(v)) throw Error("roof values must be finite");
  auto s = slopes();
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] > s[i - 1] + 1e-9 * (1 + std::fabs(s[i - 1]))) throw Error("roof is not concave");
}

Roof Roof::constant(double c) { return Roof({0, 1}, {c, c}); }

Roof Roof::affine(double c, double slope) { return Roof({0, 1}, {c, c + slope}); }

std::vector<double> Roof::slopes() const {
  std::vector<double> s;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) s.push_back((y_[i + 1] - y_[i]) / Rational(x_[i + 1] - x_[i]).get_d());
  return s;
}

double Roof::operator()(const Rational& x) const {
  if (x < 0 || x > 1) throw Error("roof evaluated outside [0,1]");
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.end()) return y_.back();
  std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  if (x == x_[i]) return y_[i];
  double lam = Rational((x - x_[i]) / (x_[i + 1] - x_[i])).get_d();
  return y_[i] + lam * (y_[i + 1] - y_[i]);
}

double Roof::operator()(double x) const {
  if (x < -1e-15 || x > 1 + 1e-15) throw Error("roof evaluated outside [0,1]");
  x = std::clamp(x, 0.0, 1.0);
  std::size_t i = 0;
  while (i + 2 < x_.size() && x_[i + 1].get_d() <= x) ++i;
  double a = x_[i].get_d(), b = x_[i + 1].get_d();
  return y_[i] + (x - a) / (b - a) * (y_[i + 1] - y_[i]);
}

double Roof::integral() const {
  double s = 0;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) s += Rational(x_[i + 1] - x_[i]).get_d() * (y_[i] + y_[i + 1]) / 2;
  return s;
}

double Roof::max() const { return *std::max_element(y_.begin(), y_.end()); }
double Roof::min() const { return *std::min_element(y_.begin(), y_.end()); }

Roof Roof::shifted(double c) const {
  Roof r = *this;
  for (auto& v : r.y_) v += c;
  return r;
}

Roof Roof::scaled(double s) const {
  if (s < 0) throw Error("roof scale must be nonnegative");
  Roof r = *this;
  for (auto& v : r.y_) v *= s;
  return r;
}

namespace {

std::vector<Rational> merged(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  std::vector<Rational> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<double> merged(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Roof Roof::operator+(const Roof& o) const {
  auto xs = merged(x_, o.x_);
  std::vector<double> ys;
  for (const auto& x : xs) ys.push_back((*this)(x) + o(x));
  return Roof(xs, ys);
}

double Roof::sup_distance(const Roof& o) const {
  double d = 0;
  for (const auto& x : merged(x_, o.x_)) d = std::max(d, std::fabs((*this)(x) - o(x)));
  return d;
}

Roof Roof::simplified() const {
  std::vector<Rational> xs{x_.front()};
  std::vector<double> ys{y_.front()};
  auto s = slopes();
  for (std::size_t i = 1; i + 1 < x_.size(); ++i) {
    if (std::fabs(s[i] - s[i - 1]) <= 1e-13 * (1 + std::fabs(s[i]))) continue;
    xs.push_back(x_[i]);
    ys.push_back(y_[i]);
  }
  xs.push_back(x_.back());
  ys.push_back(y_.back());
  return Roof(xs, ys);
}

Profile::Profile(std::vector<double> t, std::vector<double> h) : t_(std::move(t)), h_(std::move(h)) {
  if (t_.empty() || t_.size() != h_.size()) throw Error("profile needs matching knots and values");
  for (std::size_t i = 1; i < t_.size(); ++i)
    if (!(t_[i] > t_[i - 1])) throw Error("profile knots must increase strictly");
  for (std::size_t i = 0; i < t_.size(); ++i)
    if (!std::isfinite(t_[i]) || !std::isfinite(h_[i])) throw Error("profile must be finite");
}

Profile Profile::constant(double c) { return Profile({0.0}, {c}); }

double Profile::operator()(double t) const {
  if (std::isnan(t)) throw Error("profile evaluated at NaN");
  if (t <= t_.front()) return h_.front();
  if (t >= t_.back()) return h_.back();
  std::size_t i = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
  return h_[i] + (t - t_[i]) / (t_[i + 1] - t_[i]) * (h_[i + 1] - h_[i]);
}

double Profile::lipschitz() const {
  double L = 0;
  for (std::size_t i = 0; i + 1 < t_.size(); ++i) L = std::max(L, std::fabs((h_[i + 1] - h_[i]) / (t_[i + 1] - t_[i])));
  return L;
}

double Profile::sup_abs() const {
  double m = 0;
  for (double v : h_) m = std::max(m, std::fabs(v));
  return m;
}

bool Profile::is_constant() const {
  return std::all_of(h_.begin(), h_.end(), [&](double v) { return v == h_.front(); });
}

ToricPotential::ToricPotential(std::vector<double> t, std::vector<double> g) : t_(std::move(t)), g_(std::move(g)) {
  if (t_.empty() || t_.size() != g_.size()) throw Error("potential needs matching kinks and values");
  for (std::size_t i = 1; i < t_.size(); ++i)
    if (!(t_[i] > t_[i - 1])) throw Error("potential kinks must increase strictly");
  for (std::size_t i = 0; i < t_.size(); ++i)
    if (!std::isfinite(t_[i]) || !std::isfinite(g_[i])) throw Error("potential must be finite");
}

ToricPotential ToricPotential::from_roof(const Roof& roof) {
  Roof r = roof.simplified();
  const auto& x = r.breakpoints();
  const auto& y = r.values();
  auto s = r.slopes();
  std::vector<double> t, g;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double ti = -s[i];
    if (!t.empty() && ti <= t.back()) ti = std::nextafter(t.back(), INFINITY);
    t.push_back(ti);
    g.push_back(x[i].get_d() * ti + y[i]);
  }
  return ToricPotential(t, g);
}

ToricPotential ToricPotential::naive(double c) { return ToricPotential({0.0}, {c}); }

double ToricPotential::operator()(double t) const {
  if (std::isnan(t)) throw Error("potential evaluated at NaN");
  if (t <= t_.front()) return g_.front();
  if (t >= t_.back()) return g_.back() + (t - t_.back());
  std::size_t i = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
  return g_[i] + (t - t_[i]) / (t_[i + 1] - t_[i]) * (g_[i + 1] - g_[i]);
}

namespace {

std::vector<double> segment_slopes(const std::vector<double>& t, const std::vector<double>& g) {
  std::vector<double> s{0.0};
  for (std::size_t i = 0; i + 1 < t.size(); ++i) s.push_back((g[i + 1] - g[i]) / (t[i + 1] - t[i]));
  s.push_back(1.0);
  return s;
}

}  // namespace

bool ToricPotential::convex(double tol) const {
  auto s = segment_slopes(t_, g_);
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] < s[i - 1] - tol) return false;
  return true;
}

Roof ToricPotential::legendre() const {
  // Lower convex hull of the kink points; only hull vertices can realize
  // inf_t (u(t) - x t) for x in [0,1].
  std::vector<std::pair<double, double>> hull;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    std::pair<double, double> p{t_[i], g_[i]};
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull.back();
      double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross <= 0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  auto theta = [&](double x) {
    double m = INFINITY;
    for (auto [t, g] : hull) m = std::min(m, g - x * t);
    return m;
  };
  std::vector<Rational> xs{0};
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    double s = (hull[k + 1].second - hull[k].second) / (hull[k + 1].first - hull[k].first);
    if (s > 0 && s < 1) {
      Rational r = snap_rational(s);
      if (r > xs.back() && r < 1) xs.push_back(r);
    }
  }
  xs.push_back(1);
  std::vector<double> ys;
  for (const auto& x : xs) ys.push_back(theta(x.get_d()));
  // Rounding can leave a tiny concavity violation; the hull is concave in
  // exact arithmetic so clip through the simplification tolerance.
  return Roof(xs, ys).simplified();
}

std::vector<std::pair<double, double>> ToricPotential::slope_jumps() const {
  if (!convex(1e-9)) throw Error("metric is not semipositive");
  auto s = segment_slopes(t_, g_);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    double jump = s[i + 1] - s[i];
    if (jump > 1e-15) out.emplace_back(t_[i], jump);
  }
  return out;
}

ToricPotential ToricPotential::plus(const Profile& h, double s) const {
  if (s == 0) return *this;
  if (h.is_constant()) return shifted(s * h.left_value());
  auto ts = merged(t_, h.knots());
  std::vector<double> gs;
  for (double t : ts) gs.push_back((*this)(t) + s * h(t));
  return ToricPotential(ts, gs);
}

ToricPotential ToricPotential::shifted(double c) const {
  ToricPotential r = *this;
  for (auto& v : r.g_) v += c;
  return r;
}

ToricPotential ToricPotential::combine(const ToricPotential& u, double a, const ToricPotential& v, double b) {
  if (a < 0 || b < 0 || std::fabs(a + b - 1) > 1e-12) throw Error("potential combination weights must be convex");
  auto ts = merged(u.t_, v.t_);
  std::vector<double> gs;
  for (double t : ts) gs.push_back(a * u(t) + b * v(t));
  return ToricPotential(ts, gs);
}

double ToricPotential::sup_distance(const ToricPotential& o) const {
  double d = 0;
  for (double t : merged(t_, o.t_)) d = std::max(d, std::fabs((*this)(t) - o(t)));
  return d;
}

double ToricPotential::min_excess_over_naive() const {
  auto ts = merged(t_, std::vector<double>{0.0});
  double m = INFINITY;
  for (double t : ts) m = std::min(m, (*this)(t) - std::max(0.0, t));
  return m;
}

}  // namespace adelic
