#include "adelic/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "adelic/linalg.hpp"

namespace adelic {

namespace {

double logsumexp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

// ---------------------------------------------------------------- test functions

LocalTestFunction LocalTestFunction::toric(Profile h) {
  LocalTestFunction f;
  f.profile_ = std::move(h);
  return f;
}

LocalTestFunction LocalTestFunction::callable(std::function<double(CPoint)> fn, double at_infinity, double bound) {
  if (!fn) throw Error("empty test function");
  if (!std::isfinite(at_infinity) || !(bound >= 0)) throw Error("test function must be bounded");
  LocalTestFunction f;
  f.profile_.reset();
  f.fn_ = std::move(fn);
  f.at_inf_ = at_infinity;
  f.bound_ = bound;
  return f;
}

const Profile& LocalTestFunction::profile() const {
  if (!profile_) throw Error("test function has no toric profile");
  return *profile_;
}

double LocalTestFunction::operator()(CPoint z) const {
  if (profile_) return z == CPoint(0, 0) ? profile_->left_value() : (*profile_)(std::log(std::abs(z)));
  double v = fn_(z);
  if (!std::isfinite(v)) throw Error("test function is not finite at a sample point");
  return v;
}

double LocalTestFunction::at_infinity() const { return profile_ ? profile_->right_value() : at_inf_; }

double LocalTestFunction::at_t(double t) const {
  if (!profile_) throw Error("test function has no toric profile");
  return (*profile_)(t);
}

double LocalTestFunction::sup_abs() const { return profile_ ? profile_->sup_abs() : bound_; }

bool LocalTestFunction::is_zero() const { return profile_ && profile_->is_constant() && profile_->left_value() == 0; }

LocalTestFunction LocalTestFunction::abs_minus_one() const {
  if (!profile_) {
    auto fn = fn_;
    double inf = std::fabs(at_inf_ - 1);
    return callable([fn](CPoint z) { return std::fabs(fn(z) - 1); }, inf, bound_ + 1);
  }
  const auto& t = profile_->knots();
  const auto& h = profile_->values();
  std::vector<double> nt, nh;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) {
      double a = h[i - 1] - 1, b = h[i] - 1;
      if ((a < 0 && b > 0) || (a > 0 && b < 0)) {
        double tc = t[i - 1] + (t[i] - t[i - 1]) * (a / (a - b));
        if (tc > nt.back() && tc < t[i]) {
          nt.push_back(tc);
          nh.push_back(0);
        }
      }
    }
    nt.push_back(t[i]);
    nh.push_back(std::fabs(h[i] - 1));
  }
  return toric(Profile(nt, nh));
}

const LocalTestFunction* TestFunctionFamily::find(const std::string& id) const {
  auto it = local.find(id);
  return it == local.end() ? nullptr : &it->second;
}

TestFunctionFamily TestFunctionFamily::restricted(const std::vector<std::string>& ids) const {
  TestFunctionFamily out;
  for (const auto& id : ids)
    if (auto* f = find(id)) out.local[id] = *f;
  return out;
}

// ---------------------------------------------------------------- local metrics

struct LocalMetric::Data {
  Kind kind = Kind::Toric;
  int level = 1;
  ToricPotential u;
  std::optional<Roof> roof;
  Matrix gram, ginv;
  bool diagonal = false;
  std::vector<double> lambda;
  std::shared_ptr<const PotentialSource> src;
  std::shared_ptr<const Data> base;
  LocalTestFunction f;
  double t = 0;
};

LocalMetric::LocalMetric() : LocalMetric(toric(1, ToricPotential::naive())) {}

LocalMetric LocalMetric::toric(int level, ToricPotential u) {
  if (level < 1) throw Error("metric level must be positive");
  auto d = std::make_shared<Data>();
  d->level = level;
  d->u = std::move(u);
  return LocalMetric(d);
}

LocalMetric LocalMetric::toric(int level, const Roof& roof) {
  if (level < 1) throw Error("metric level must be positive");
  auto d = std::make_shared<Data>();
  d->level = level;
  d->u = ToricPotential::from_roof(roof);
  d->roof = roof;
  return LocalMetric(d);
}

LocalMetric LocalMetric::fs_hermitian(std::vector<std::vector<double>> gram) {
  if (gram.size() < 2) throw Error("Hermitian norm needs at least two sections");
  auto d = std::make_shared<Data>();
  d->kind = Kind::FSQuotient;
  d->level = static_cast<int>(gram.size()) - 1;
  d->ginv = spd_inverse(gram);
  d->diagonal = true;
  for (std::size_t i = 0; i < gram.size(); ++i)
    for (std::size_t j = 0; j < gram.size(); ++j)
      if (i != j && gram[i][j] != 0) d->diagonal = false;
  d->gram = std::move(gram);
  return LocalMetric(d);
}

LocalMetric LocalMetric::fs_sup_diagonal(std::vector<double> lambda, bool archimedean) {
  if (lambda.size() < 2) throw Error("sup norm needs at least two sections");
  for (double l : lambda)
    if (!(l > 0) || !std::isfinite(l)) throw Error("norm not definite");
  int n = static_cast<int>(lambda.size()) - 1;
  if (!archimedean) {
    // Upper concave hull of (k/n, -ln lambda_k / n).
    std::vector<std::pair<Rational, double>> hull;
    for (int k = 0; k <= n; ++k) {
      std::pair<Rational, double> p{Rational(k, n), -std::log(lambda[k]) / n};
      p.first.canonicalize();
      while (hull.size() >= 2) {
        const auto& a = hull[hull.size() - 2];
        const auto& b = hull.back();
        double cross = Rational(b.first - a.first).get_d() * (p.second - a.second) -
                       (b.second - a.second) * Rational(p.first - a.first).get_d();
        if (cross >= 0) hull.pop_back();
        else break;
      }
      hull.push_back(p);
    }
    std::vector<Rational> xs;
    std::vector<double> ys;
    for (auto& [x, y] : hull) {
      xs.push_back(x);
      ys.push_back(y);
    }
    return toric(n, Roof(xs, ys));
  }
  auto d = std::make_shared<Data>();
  d->kind = Kind::FSQuotient;
  d->level = n;
  d->lambda = std::move(lambda);
  return LocalMetric(d);
}

LocalMetric LocalMetric::dynamical(std::shared_ptr<const PotentialSource> src) {
  if (!src) throw Error("missing potential source");
  auto d = std::make_shared<Data>();
  d->kind = Kind::Dynamical;
  d->level = src->level();
  d->src = std::move(src);
  return LocalMetric(d);
}

LocalMetric::Kind LocalMetric::kind() const { return d_->kind; }
int LocalMetric::level() const { return d_->level; }

bool LocalMetric::radial() const {
  switch (d_->kind) {
    case Kind::Toric: return true;
    case Kind::FSQuotient: return d_->lambda.empty() ? d_->diagonal : true;
    case Kind::Dynamical: return false;
    case Kind::Twisted: return LocalMetric(d_->base).radial() && d_->f.has_profile();
  }
  return false;
}

const ToricPotential& LocalMetric::toric_potential() const {
  if (d_->kind != Kind::Toric) throw Error("metric is not toric");
  return d_->u;
}

Roof LocalMetric::roof() const {
  if (d_->kind != Kind::Toric) throw Error("metric is not toric");
  return d_->roof ? *d_->roof : d_->u.legendre();
}

const Matrix& LocalMetric::gram() const {
  if (d_->kind != Kind::FSQuotient || d_->gram.empty()) throw Error("metric is not a Hermitian quotient");
  return d_->gram;
}

const std::vector<double>& LocalMetric::sup_weights() const {
  if (d_->kind != Kind::FSQuotient || d_->lambda.empty()) throw Error("metric is not a sup-norm quotient");
  return d_->lambda;
}

const PotentialSource& LocalMetric::source() const {
  if (d_->kind != Kind::Dynamical) throw Error("metric is not dynamical");
  return *d_->src;
}

double LocalMetric::potential(CPoint z) const {
  const Data& d = *d_;
  double r = std::abs(z);
  switch (d.kind) {
    case Kind::Toric: return d.level * (r == 0 ? d.u.left_value() : d.u(std::log(r)));
    case Kind::FSQuotient: {
      int n = d.level;
      if (!d.lambda.empty()) {
        if (r == 0) return -std::log(d.lambda[0]);
        return radial_potential(std::log(r));
      }
      // 1/2 ln(v^* G^{-1} v); for |z| > 1 factor out z^n.
      bool flip = r > 1;
      CPoint w = flip ? 1.0 / z : z;
      std::vector<CPoint> v(static_cast<std::size_t>(n + 1));
      CPoint p = 1;
      for (int k = 0; k <= n; ++k) {
        v[flip ? n - k : k] = p;
        p *= w;
      }
      double q = 0;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) q += d.ginv[i][j] * std::real(std::conj(v[i]) * v[j]);
      return 0.5 * std::log(q) + (flip ? n * std::log(r) : 0.0);
    }
    case Kind::Dynamical: return d.src->potential(z);
    case Kind::Twisted: return LocalMetric(d.base).potential(z) + d.t * d.f(z);
  }
  return 0;
}

double LocalMetric::potential_at_infinity() const {
  const Data& d = *d_;
  switch (d.kind) {
    case Kind::Toric: return d.level * d.u.right_offset();
    case Kind::FSQuotient:
      if (!d.lambda.empty()) return -std::log(d.lambda.back());
      return 0.5 * std::log(d.ginv.back().back());
    case Kind::Dynamical: return d.src->potential_at_infinity();
    case Kind::Twisted: return LocalMetric(d.base).potential_at_infinity() + d.t * d.f.at_infinity();
  }
  return 0;
}

double LocalMetric::radial_potential(double t) const {
  if (!radial()) throw Error("metric is not radial");
  const Data& d = *d_;
  switch (d.kind) {
    case Kind::Toric: return d.level * d.u(t);
    case Kind::FSQuotient: {
      std::vector<double> terms;
      if (!d.lambda.empty()) {
        for (int k = 0; k <= d.level; ++k) terms.push_back(k * t - std::log(d.lambda[k]));
        return logsumexp(terms);
      }
      for (int k = 0; k <= d.level; ++k) terms.push_back(2 * k * t + std::log(d.ginv[k][k]));
      return 0.5 * logsumexp(terms);
    }
    case Kind::Twisted: return LocalMetric(d.base).radial_potential(t) + d.t * d.f.at_t(t);
    default: break;
  }
  throw Error("metric is not radial");
}

LocalMetric LocalMetric::twisted(const LocalTestFunction& f, double t) const {
  if (t == 0 || f.is_zero()) return *this;
  if (d_->kind == Kind::Toric && f.has_profile()) {
    auto d = std::make_shared<Data>(*d_);
    const Profile& h = f.profile();
    d->u = d_->u.plus(h, t / d_->level);
    if (d_->roof && h.is_constant()) d->roof = d_->roof->shifted(t * h.left_value() / d_->level);
    else d->roof.reset();
    return LocalMetric(d);
  }
  if (d_->kind == Kind::Twisted && f.has_profile() && d_->f.has_profile()) {
    // Merge twists by profiles so repeated twists compose exactly.
    Profile a = d_->f.profile(), b = f.profile();
    std::vector<double> ts = a.knots();
    ts.insert(ts.end(), b.knots().begin(), b.knots().end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<double> hs;
    for (double s : ts) hs.push_back(d_->t * a(s) + t * b(s));
    auto d = std::make_shared<Data>(*d_);
    d->f = LocalTestFunction::toric(Profile(ts, hs));
    d->t = 1;
    return LocalMetric(d);
  }
  auto d = std::make_shared<Data>();
  d->kind = Kind::Twisted;
  d->level = d_->level;
  d->base = d_;
  d->f = f;
  d->t = t;
  return LocalMetric(d);
}

LocalMetric LocalMetric::shifted(double c) const { return twisted(LocalTestFunction::constant(c), 1.0); }

std::string LocalMetric::describe() const {
  std::ostringstream os;
  switch (d_->kind) {
    case Kind::Toric: os << "toric(level=" << d_->level << ", kinks=" << d_->u.kinks().size() << ")"; break;
    case Kind::FSQuotient: os << (d_->lambda.empty() ? "fs-hermitian" : "fs-sup") << "(level=" << d_->level << ")"; break;
    case Kind::Dynamical: os << d_->src->describe(); break;
    case Kind::Twisted: os << "twisted(" << LocalMetric(d_->base).describe() << ")"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------- families

MetricFamily::MetricFamily(AdelicCurve curve, LocalMetric default_metric, std::map<std::string, LocalMetric> exceptions)
    : curve_(std::move(curve)), default_(std::move(default_metric)) {
  for (auto& [id, m] : exceptions) {
    Place w = curve_.place(id);
    if (m.level() != default_.level()) throw Error("level mismatch");
    if (!w.archimedean() && !(m.is_toric() || m.kind() == LocalMetric::Kind::Dynamical))
      throw Error("nonarchimedean metrics must be toric");
    exceptions_.insert_or_assign(w.id, m);
  }
  if (!default_.is_toric() && curve_.base() != BaseKind::Copies) throw Error("nonarchimedean metrics must be toric");
}

const LocalMetric& MetricFamily::at(const std::string& place_id) const {
  Place w = curve_.place(place_id);
  auto it = exceptions_.find(w.id);
  return it == exceptions_.end() ? default_ : it->second;
}

bool MetricFamily::toric() const {
  if (!default_.is_toric()) return false;
  return std::all_of(exceptions_.begin(), exceptions_.end(), [](const auto& kv) { return kv.second.is_toric(); });
}

std::vector<Place> MetricFamily::listed_places() const {
  if (auto all = curve_.all_places()) return *all;
  std::vector<Place> out = curve_.infinite_places();
  for (const auto& [id, m] : exceptions_) {
    Place w = curve_.place(id);
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double MetricFamily::integrate(const std::function<double(const LocalMetric&, const Place&)>& g) const {
  PlaceFunction pf;
  for (const auto& w : listed_places()) pf.values[w.id] = g(at(w.id), w);
  if (!curve_.all_places()) {
    // Representative of the unlisted places: a finite place with the default.
    Place generic;
    generic.id = "generic";
    generic.kind = curve_.base() == BaseKind::Q ? PlaceKind::Prime : PlaceKind::Irreducible;
    pf.default_value = g(default_, generic);
  }
  return curve_.integrate(pf);
}

MetricFamily toric_family(const AdelicCurve& curve, int level, const std::map<std::string, Roof>& roofs) {
  std::map<std::string, LocalMetric> ex;
  for (const auto& [id, r] : roofs) ex.emplace(id, LocalMetric::toric(level, r));
  return MetricFamily(curve, LocalMetric::toric(level, Roof::constant(0)), ex);
}

double metric_distance(const LocalMetric& phi, const LocalMetric& psi, const VerificationGrid& grid) {
  if (phi.level() != psi.level()) throw Error("level mismatch");
  if (phi.is_toric() && psi.is_toric()) return phi.level() * phi.toric_potential().sup_distance(psi.toric_potential());
  double d = std::fabs(phi.potential(0) - psi.potential(0));
  d = std::max(d, std::fabs(phi.potential_at_infinity() - psi.potential_at_infinity()));
  for (const auto& z : grid.points()) d = std::max(d, std::fabs(phi.potential(z) - psi.potential(z)));
  return d;
}

LocalMetric fs_quotient_hermitian(const std::vector<std::vector<double>>& gram) { return LocalMetric::fs_hermitian(gram); }

LocalMetric fs_quotient_sup_diagonal(const std::vector<double>& lambda, bool archimedean) {
  return LocalMetric::fs_sup_diagonal(lambda, archimedean);
}

MetricFamily twist(const MetricFamily& phi, const TestFunctionFamily& f, double t) {
  if (t == 0) return phi;
  std::map<std::string, LocalMetric> ex = phi.exceptions();
  for (const auto& [id, fl] : f.local) {
    Place w = phi.curve().place(id);
    if (!w.archimedean() && !fl.has_profile()) throw Error("nonarchimedean test functions must be toric");
    LocalMetric m = phi.at(w.id).twisted(fl, t);
    ex.insert_or_assign(w.id, m);
  }
  return MetricFamily(phi.curve(), phi.default_metric(), ex);
}

std::complex<double> mixed_second_partial_fd(const std::function<double(CPoint)>& f, CPoint x, double eps) {
  if (!(eps > 0)) throw Error("step must be positive");
  auto eval = [&](CPoint z) {
    double v = f(z);
    if (!std::isfinite(v)) throw Error("evaluation outside domain");
    return v;
  };
  auto delta = [&](CPoint u, CPoint v) {
    return (eval(x + eps * u + eps * v) - eval(x + eps * u) - eval(x + eps * v) + eval(x)) / (eps * eps);
  };
  const CPoint one(1, 0), i(0, 1);
  double dxx = delta(one, one), dyy = delta(i, i), dxy = delta(one, i), dyx = delta(i, one);
  return {0.25 * (dxx + dyy), 0.25 * (dxy - dyx)};
}

std::complex<double> richardson(std::complex<double> d1, double e1, std::complex<double> d2, double e2) {
  if (e1 == e2) throw Error("Richardson extrapolation needs distinct steps");
  return (e1 * d2 - e2 * d1) / (e1 - e2);
}

}  // namespace adelic
