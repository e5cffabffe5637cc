#include "adelic/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "adelic/roots.hpp"

namespace adelic {

// ---------------------------------------------------------------- random stream

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
  if (n == 0) throw Error("empty range");
  // Rejection keeps the choice exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do x = next();
  while (x >= limit);
  return x % n;
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------- Julia sampler

JuliaSampler::JuliaSampler(Endomorphism f, std::uint64_t seed, long budget, long burn_in)
    : f_(std::move(f)), seed_(seed), budget_(budget), burn_in_(burn_in) {
  if (budget_ <= 0) throw Error("sampler budget must be positive");
  if (burn_in_ < 0) throw Error("burn-in must be nonnegative");
}

const std::vector<CPoint>& JuliaSampler::samples() const {
  if (!cache_.empty()) return cache_;
  using C = std::complex<long double>;
  const int d = f_.degree();
  std::vector<C> num, den;
  for (int i = 0; i <= d; ++i) {
    num.emplace_back(static_cast<long double>(f_.numerator().coeff(i).get_d()), 0.0L);
    den.emplace_back(static_cast<long double>(f_.denominator().coeff(i).get_d()), 0.0L);
  }
  SplitMix64 rng(seed_);
  C z(0.3L, 0.2L);
  std::vector<C> c(static_cast<std::size_t>(d) + 1);
  auto step = [&]() {
    for (int i = 0; i <= d; ++i) c[i] = num[i] - z * den[i];
    std::vector<C> roots;
    while (c.size() > 1 && std::abs(c.back()) == 0) c.pop_back();
    if (c.size() == 3) {
      C disc = std::sqrt(c[1] * c[1] - 4.0L * c[2] * c[0]);
      // Stable quadratic formula.
      C q = -0.5L * (c[1] + (std::real(std::conj(c[1]) * disc) >= 0 ? disc : -disc));
      roots = {q / c[2], q == C(0) ? C(0) : c[0] / q};
    } else {
      roots = complex_roots(c, RootOptions{500, 1e-10L}).roots;
    }
    c.resize(static_cast<std::size_t>(d) + 1);
    z = roots[rng.below(roots.size())];
  };
  for (long i = 0; i < burn_in_; ++i) step();
  cache_.reserve(static_cast<std::size_t>(budget_));
  for (long i = 0; i < budget_; ++i) {
    step();
    cache_.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return cache_;
}

// ---------------------------------------------------------------- local measures

LocalMeasure LocalMeasure::circles(std::vector<CircleAtom> atoms, int angles) {
  if (angles < 1) throw Error("angular resolution must be positive");
  LocalMeasure m;
  m.mass_ = 0;
  m.segments_.clear();
  m.kind_ = Kind::Circles;
  m.angles_ = angles;
  for (const auto& a : atoms) {
    if (!(a.radius > 0) || !(a.mass >= 0)) throw Error("circle atoms need radius > 0 and mass >= 0");
    m.mass_ += a.mass;
  }
  m.circles_ = std::move(atoms);
  return m;
}

LocalMeasure LocalMeasure::segments(std::vector<SegmentAtom> atoms) {
  LocalMeasure m;
  m.mass_ = 0;
  m.segments_.clear();
  m.kind_ = Kind::Segments;
  for (const auto& a : atoms) {
    if (!(a.mass >= 0) || std::isnan(a.t)) throw Error("segment atoms need a valid t and mass >= 0");
    m.mass_ += a.mass;
  }
  m.segments_ = std::move(atoms);
  return m;
}

LocalMeasure LocalMeasure::points(std::vector<PointAtom> atoms) {
  LocalMeasure m;
  m.mass_ = 0;
  m.segments_.clear();
  m.kind_ = Kind::Points;
  for (const auto& a : atoms) {
    if (!(a.mass >= 0)) throw Error("point masses must be nonnegative");
    m.mass_ += a.mass;
  }
  m.points_ = std::move(atoms);
  return m;
}

LocalMeasure LocalMeasure::sampler(std::shared_ptr<const JuliaSampler> s, double mass) {
  if (!s) throw Error("missing sampler");
  if (!(mass >= 0)) throw Error("sampler mass must be nonnegative");
  LocalMeasure m;
  m.mass_ = 0;
  m.segments_.clear();
  m.kind_ = Kind::Sampler;
  m.mass_ = mass;
  m.sampler_ = std::move(s);
  return m;
}

const JuliaSampler& LocalMeasure::julia() const {
  if (kind_ != Kind::Sampler) throw Error("measure is not a sampler");
  return *sampler_;
}

MonteCarlo LocalMeasure::integrate(const std::function<double(CPoint, bool)>& g) const {
  MonteCarlo r;
  switch (kind_) {
    case Kind::Circles:
      for (const auto& a : circles_) {
        double s = 0;
        for (int k = 0; k < angles_; ++k) s += g(std::polar(a.radius, 2 * std::numbers::pi * k / angles_), false);
        r.mean += a.mass * s / angles_;
      }
      return r;
    case Kind::Segments:
      for (const auto& a : segments_) r.mean += a.mass * g(CPoint(a.t, 0), true);
      return r;
    case Kind::Points:
      for (const auto& a : points_) r.mean += a.mass * g(a.z, false);
      return r;
    case Kind::Sampler: {
      const auto& pts = sampler_->samples();
      double s = 0, s2 = 0;
      for (const auto& z : pts) {
        double v = g(z, false);
        s += v;
        s2 += v * v;
      }
      double n = static_cast<double>(pts.size());
      double mean = s / n, var = std::max(0.0, s2 / n - mean * mean);
      r.mean = mass_ * mean;
      r.stderr_ = mass_ * std::sqrt(var / n);
      r.budget = sampler_->budget();
      r.seed = sampler_->seed();
      return r;
    }
  }
  return r;
}

MonteCarlo LocalMeasure::integrate(const LocalTestFunction& f) const {
  if (kind_ == Kind::Segments) {
    if (!f.has_profile()) throw Error("nonarchimedean test functions must be toric");
    MonteCarlo r;
    for (const auto& a : segments_) r.mean += a.mass * f.at_t(a.t);
    return r;
  }
  if (kind_ == Kind::Circles && f.has_profile()) {
    MonteCarlo r;
    for (const auto& a : circles_) r.mean += a.mass * f.at_t(std::log(a.radius));
    return r;
  }
  return integrate([&](CPoint z, bool) { return f(z); });
}

std::string LocalMeasure::describe() const {
  std::ostringstream o;
  switch (kind_) {
    case Kind::Circles: o << circles_.size() << " circle atoms"; break;
    case Kind::Segments: o << segments_.size() << " segment atoms"; break;
    case Kind::Points: o << points_.size() << " point masses"; break;
    case Kind::Sampler: o << "Julia sampler (budget " << sampler_->budget() << ", seed " << sampler_->seed() << ")"; break;
  }
  o << ", mass " << mass_;
  return o.str();
}

MeasureFamily::MeasureFamily(AdelicCurve curve, LocalMeasure default_measure, std::map<std::string, LocalMeasure> exceptions)
    : curve_(std::move(curve)), default_(std::move(default_measure)) {
  for (auto& [id, m] : exceptions) {
    Place w = curve_.place(id);
    if (w.archimedean() != m.archimedean()) throw Error("measure type does not match the place at " + w.id);
    exceptions_.insert_or_assign(w.id, std::move(m));
  }
}

const LocalMeasure& MeasureFamily::at(const std::string& place_id) const {
  auto it = exceptions_.find(curve_.place(place_id).id);
  return it == exceptions_.end() ? default_ : it->second;
}

// ---------------------------------------------------------------- Monge-Ampere

namespace {

LocalMeasure radial_quantiles(const LocalMetric& phi, int K) {
  if (K < 1) throw Error("circle resolution must be positive");
  const double n = phi.level();
  auto cdf = [&](double t) {
    const double h = 1e-5;
    return (phi.radial_potential(t + h) - phi.radial_potential(t - h)) / (2 * h);
  };
  std::vector<CircleAtom> atoms;
  for (int j = 0; j < K; ++j) {
    double q = n * (j + 0.5) / K, lo = -60, hi = 60;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      double mid = 0.5 * (lo + hi);
      (cdf(mid) < q ? lo : hi) = mid;
    }
    atoms.push_back({std::exp(0.5 * (lo + hi)), n / K});
  }
  return LocalMeasure::circles(std::move(atoms));
}

}  // namespace

LocalMeasure monge_ampere_local(const LocalMetric& phi, const Place& w, const MeasureOptions& opt) {
  const double n = phi.level();
  switch (phi.kind()) {
    case LocalMetric::Kind::Toric: {
      auto jumps = phi.toric_potential().slope_jumps();
      if (w.archimedean()) {
        std::vector<CircleAtom> atoms;
        for (auto [t, j] : jumps) atoms.push_back({std::exp(t), n * j});
        return LocalMeasure::circles(std::move(atoms));
      }
      std::vector<SegmentAtom> atoms;
      for (auto [t, j] : jumps) atoms.push_back({t, n * j});
      return LocalMeasure::segments(std::move(atoms));
    }
    case LocalMetric::Kind::FSQuotient:
      if (!w.archimedean() || !phi.radial()) break;
      return radial_quantiles(phi, opt.circle_resolution);
    case LocalMetric::Kind::Dynamical: {
      const auto* dyn = dynamic_cast<const DynamicalPotential*>(&phi.source());
      if (!dyn || !w.archimedean()) break;
      return LocalMeasure::sampler(std::make_shared<JuliaSampler>(dyn->map(), opt.seed, opt.budget), n);
    }
    case LocalMetric::Kind::Twisted: break;
  }
  throw Error("unsupported metric for the Monge-Ampere measure: " + phi.describe());
}

MeasureFamily monge_ampere(const MetricFamily& phi, const MeasureOptions& opt) {
  const AdelicCurve& C = phi.curve();
  std::map<std::string, LocalMeasure> ex;
  for (const auto& w : phi.listed_places()) ex.emplace(w.id, monge_ampere_local(phi.at(w.id), w, opt));
  LocalMeasure def;
  if (C.base() == BaseKind::Copies) {
    if (!ex.empty()) def = ex.begin()->second;
  } else {
    Place generic;
    generic.kind = C.base() == BaseKind::Q ? PlaceKind::Prime : PlaceKind::Irreducible;
    def = monge_ampere_local(phi.default_metric(), generic, opt);
  }
  return MeasureFamily(C, def, ex);
}

// ---------------------------------------------------------------- global integrals

PlacePredicate places_in(const std::vector<std::string>& ids) {
  return [ids](const Place& w) { return std::find(ids.begin(), ids.end(), w.id) != ids.end(); };
}

MonteCarlo integrate_global(const MeasureFamily& eta, const TestFunctionFamily& f, const PlacePredicate& omega) {
  MonteCarlo r;
  double var = 0;
  for (const auto& [id, fl] : f.local) {
    Place w = eta.curve().place(id);
    if (omega && !omega(w)) continue;
    if (w.weight == 0 || fl.is_zero()) continue;
    MonteCarlo loc = eta.at(w.id).integrate(fl);
    r.mean += w.weight * loc.mean;
    var += w.weight * w.weight * loc.stderr_ * loc.stderr_;
    if (loc.budget > 0) {
      r.budget = std::max(r.budget, loc.budget);
      r.seed = loc.seed;
    }
  }
  r.stderr_ = std::sqrt(var);
  return r;
}

LogSectionResult integrate_log_section(const MeasureFamily& eta, const QPoly& s, const MetricFamily& psi,
                                       const std::map<std::string, double>& A, double t_max, int steps) {
  if (s.is_zero()) throw Error("the section must be nonzero");
  if (s.degree() > psi.level()) throw Error("section degree exceeds the level of the metric");
  if (!(t_max > 0) || steps < 1) throw Error("truncation needs t_max > 0 and steps >= 1");
  const AdelicCurve& C = eta.curve();
  if (C.base() == BaseKind::FqT) throw Error("log-section integrals need a curve over Q");

  std::vector<Place> places;
  if (auto all = C.all_places()) places = *all;
  else
    for (const auto& [id, m] : eta.exceptions()) places.push_back(C.place(id));

  LogSectionResult R;
  for (int j = 1; j <= steps; ++j) R.ts.push_back(t_max * j / steps);
  R.values.assign(R.ts.size(), 0.0);
  for (const auto& w : places) {
    if (w.weight == 0) continue;
    auto ait = A.find(w.id);
    double a = ait == A.end() ? 1.0 : ait->second;
    if (!(a > 0)) throw Error("truncation weights must be positive");
    const LocalMetric& m = psi.at(w.id);
    const LocalMeasure& mu = eta.at(w.id);
    // -ln|s|_psi at a point.
    std::function<double(CPoint, bool)> g;
    if (w.archimedean()) {
      g = [&](CPoint z, bool) {
        double v = std::abs(static_cast<std::complex<double>>(s.eval(std::complex<long double>(z.real(), z.imag()))));
        return v == 0 ? INFINITY : -std::log(v) + m.potential(z);
      };
    } else {
      if (!m.is_toric()) throw Error("nonarchimedean log-section integrals need toric metrics");
      g = [&](CPoint z, bool) {
        double t = z.real(), best = -INFINITY;
        for (int k = 0; k <= s.degree(); ++k)
          if (s[k] != 0) best = std::max(best, -static_cast<double>(valuation(s[k], w.prime)) * w.log_base + k * t);
        return -best + m.radial_potential(t);
      };
    }
    for (std::size_t j = 0; j < R.ts.size(); ++j) {
      double cap = R.ts[j] * a;
      R.values[j] += w.weight * mu.integrate([&](CPoint z, bool sk) { return std::min(g(z, sk), cap); }).mean;
    }
    // Lower bound from the sup norm of s (sampled).
    double lsup = -INFINITY;
    if (w.archimedean()) {
      VerificationGrid grid;
      for (const auto& z : grid.points()) lsup = std::max(lsup, -g(z, false));
      lsup = std::max(lsup, -g(CPoint(0, 0), false));
    } else {
      for (double t = -40; t <= 40; t += 0.01) lsup = std::max(lsup, -g(CPoint(t, 0), true));
    }
    R.lower_bound += w.weight * mu.total_mass() * (-lsup);
  }
  std::size_t n = R.values.size();
  if (n >= 2 && std::fabs(R.values[n - 1] - R.values[n - 2]) <= 1e-12 * std::max(1.0, std::fabs(R.values[n - 1])))
    R.limit = R.values.back();
  else if (n >= 2)
    R.divergent = true;
  else
    R.limit = R.values.back();
  return R;
}

RadonNikodymReport radon_nikodym_check(const TestFunctionFamily& p, const MeasureFamily& eta, const PlacePredicate& omega,
                                       double tol) {
  RadonNikodymReport R;
  for (const auto& [id, pl] : p.local) {
    Place w = eta.curve().place(id);
    if (omega && !omega(w)) continue;
    double local = eta.at(w.id).integrate(pl.abs_minus_one()).mean;
    R.integral += w.weight * local;
    if (w.weight > 0 && local > tol) R.failing_places.push_back(w.id);
  }
  R.pass = R.integral <= tol && R.failing_places.empty();
  return R;
}

}  // namespace adelic
