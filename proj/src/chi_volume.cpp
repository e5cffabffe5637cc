#include "adelic/chi_volume.hpp"

#include <algorithm>
#include <cmath>

namespace adelic {

namespace {

void require_toric(const MetricFamily& phi) {
  if (!phi.toric()) throw Error("this computation requires a toric metric family");
}

// Thresholds m sum nu theta(k/N) for k = 0..N, N = n m.
std::vector<double> thresholds(const Roof& R, int m, int n) {
  const int N = n * m;
  std::vector<double> out;
  for (int k = 0; k <= N; ++k) out.push_back(m * R(Rational(k, N)));
  return out;
}

// sum_k -ln ||z^k||_{n phi} at one place for sections of degree <= n m.
double local_degree(const LocalMetric& phi, int n, const VerificationGrid& grid, double* spread) {
  const int m = phi.level(), N = n * m;
  if (phi.is_toric()) {
    Roof R = phi.roof();
    double s = 0;
    for (int k = 0; k <= N; ++k) s += N * R(Rational(k, N));
    return s;
  }
  auto log_sups = [&](const VerificationGrid& g) {
    std::vector<double> best(static_cast<std::size_t>(N) + 1, -INFINITY);
    best[0] = -n * phi.potential(CPoint(0, 0));
    best[N] = -n * phi.potential_at_infinity();
    for (const auto& z : g.points()) {
      double lr = std::log(std::abs(z)), p = n * phi.potential(z);
      for (int k = 0; k <= N; ++k) best[k] = std::max(best[k], k * lr - p);
    }
    return best;
  };
  auto a = log_sups(grid), b = log_sups(grid.refined());
  double s = 0;
  for (int k = 0; k <= N; ++k) {
    s -= b[k];
    if (spread) *spread = std::max(*spread, std::fabs(a[k] - b[k]));
  }
  return s;
}

template <class F>
MetricFamily combine_families(const MetricFamily& a, const MetricFamily& b, int level, F combine) {
  if (!(a.curve() == b.curve())) throw Error("metric families live on different curves");
  require_toric(a);
  require_toric(b);
  std::map<std::string, LocalMetric> ex;
  std::vector<std::string> ids;
  for (const auto& [id, m] : a.exceptions()) ids.push_back(id);
  for (const auto& [id, m] : b.exceptions()) ids.push_back(id);
  for (const auto& id : ids)
    ex.insert_or_assign(id, LocalMetric::toric(level, combine(a.at(id).toric_potential(), b.at(id).toric_potential())));
  LocalMetric def = LocalMetric::toric(level, combine(a.default_metric().toric_potential(), b.default_metric().toric_potential()));
  return MetricFamily(a.curve(), def, ex);
}

}  // namespace

Roof total_roof(const MetricFamily& phi) {
  require_toric(phi);
  const AdelicCurve& C = phi.curve();
  if (!C.all_places()) {
    Roof d = phi.default_metric().roof();
    if (d.max() != 0 || d.min() != 0) throw Error("divergent integral");
  }
  Roof total = Roof::constant(0);
  for (const auto& w : phi.listed_places())
    if (w.weight > 0) total = (total + phi.at(w.id).roof().scaled(w.weight)).simplified();
  return total;
}

std::vector<int> section_filtration(const MetricFamily& phi, int n, double t) {
  if (n < 1) throw Error("level must be positive");
  auto thr = thresholds(total_roof(phi), phi.level(), n);
  std::vector<int> out;
  for (std::size_t k = 0; k < thr.size(); ++k)
    if (thr[k] >= t) out.push_back(static_cast<int>(k));
  return out;
}

double ConcaveTransform::operator()(double y) const {
  if (y < 0 || y > level) throw Error("point outside the Okounkov interval");
  return normalized(std::min(1.0, y / level));
}

ConcaveTransform concave_transform(const MetricFamily& phi, int n_max) {
  if (n_max < 1) throw Error("level must be positive");
  ConcaveTransform T;
  T.level = phi.level();
  Roof R = total_roof(phi);
  T.normalized = R.scaled(T.level);
  T.n = n_max;
  T.staircase = thresholds(R, T.level, n_max);
  T.mu_min = *std::min_element(T.staircase.begin(), T.staircase.end());
  T.mu_max = *std::max_element(T.staircase.begin(), T.staircase.end());
  return T;
}

double chi_volume_closed_form(const MetricFamily& phi) {
  const double m = phi.level();
  return 2 * m * m * total_roof(phi).integral();
}

LatticeEstimate chi_volume_lattice_estimate(const MetricFamily& phi, int n, const VerificationGrid& grid) {
  if (n < 1) throw Error("level must be positive");
  grid.validate();
  LatticeEstimate E;
  E.n = n;
  double deg = phi.integrate([&](const LocalMetric& m, const Place& w) {
    if (!w.archimedean() && !m.is_toric()) throw Error("nonarchimedean metrics must be toric");
    return local_degree(m, n, grid, &E.spread);
  });
  E.estimate = 2 * deg / (static_cast<double>(n) * n);
  if (phi.toric()) E.closed_form = chi_volume_closed_form(phi);
  E.grid_too_coarse = E.spread > std::log(1.01);
  return E;
}

RelativeVolume relative_volume_estimate(const LocalMetric& phi, const LocalMetric& psi, const Place& w, int n,
                                        const VerificationGrid& grid) {
  if (phi.level() != psi.level()) throw Error("level mismatch");
  if (n < 1) throw Error("level must be positive");
  if (!w.archimedean() && !(phi.is_toric() && psi.is_toric())) throw Error("nonarchimedean metrics must be toric");
  RelativeVolume V;
  V.estimate = 2 * (local_degree(phi, n, grid, nullptr) - local_degree(psi, n, grid, nullptr)) / (static_cast<double>(n) * n);
  if (phi.is_toric() && psi.is_toric()) {
    const double m = phi.level();
    V.closed_form = 2 * m * m * (phi.roof().integral() - psi.roof().integral());
  }
  return V;
}

GateauxResult gateaux_derivative(const MetricFamily& phi, const TestFunctionFamily& f, double h, const MeasureOptions& opt) {
  if (!(h > 0)) throw Error("step must be positive");
  GateauxResult G;
  G.h = h;
  const int m = phi.level();

  MonteCarlo mc = integrate_global(monge_ampere(phi, opt), f);
  G.measure_route = 2 * mc.mean;
  G.measure_stderr = 2 * mc.stderr_;

  bool roof_route = phi.toric();
  for (const auto& [id, fl] : f.local) roof_route = roof_route && fl.has_profile();
  if (roof_route) {
    // On a roof segment of slope sigma the minimizing t is -sigma.
    double s = 0;
    for (const auto& [id, fl] : f.local) {
      Place w = phi.curve().place(id);
      if (w.weight == 0) continue;
      Roof R = phi.at(w.id).roof();
      auto sl = R.slopes();
      const auto& x = R.breakpoints();
      double local = 0;
      for (std::size_t i = 0; i < sl.size(); ++i) local += Rational(x[i + 1] - x[i]).get_d() * fl.at_t(-sl[i]);
      s += w.weight * m * local;
    }
    G.derivative = 2 * s;
  } else {
    G.derivative = G.measure_route;
  }

  auto chi = [&](const MetricFamily& fam) {
    if (fam.toric()) return chi_volume_closed_form(fam);
    return chi_volume_lattice_estimate(fam, 64).estimate;
  };
  G.chi_plus = chi(twist(phi, f, h));
  G.chi_minus = chi(twist(phi, f, -h));
  G.finite_difference = (G.chi_plus - G.chi_minus) / (2 * h);
  return G;
}

MaxSlopeTrace asymptotic_max_slope(const MetricFamily& phi, int n_max) {
  if (n_max < 1) throw Error("level must be positive");
  Roof R = total_roof(phi);
  MaxSlopeTrace T;
  T.value = phi.level() * R.max();
  for (int n = 1; n <= n_max; ++n) {
    auto thr = thresholds(R, phi.level(), n);
    T.mu_max.push_back(*std::max_element(thr.begin(), thr.end()));
    T.mu_min.push_back(*std::min_element(thr.begin(), thr.end()));
  }
  return T;
}

MetricFamily toric_convex_combination(const MetricFamily& phi1, const MetricFamily& phi2, double delta) {
  if (phi1.level() != phi2.level()) throw Error("level mismatch");
  if (!(delta >= 0 && delta <= 1)) throw Error("combination weight must lie in [0,1]");
  return combine_families(phi1, phi2, phi1.level(), [&](const ToricPotential& u, const ToricPotential& v) {
    return ToricPotential::combine(u, delta, v, 1 - delta);
  });
}

MetricFamily toric_tensor(const MetricFamily& phi1, const MetricFamily& phi2) {
  const int m1 = phi1.level(), m2 = phi2.level();
  const double a = static_cast<double>(m1) / (m1 + m2);
  return combine_families(phi1, phi2, m1 + m2, [&](const ToricPotential& u, const ToricPotential& v) {
    return ToricPotential::combine(u, a, v, 1 - a);
  });
}

double concavity_slack(const MetricFamily& phi1, const MetricFamily& phi2, double delta) {
  return chi_volume_closed_form(toric_convex_combination(phi1, phi2, delta)) - delta * chi_volume_closed_form(phi1) -
         (1 - delta) * chi_volume_closed_form(phi2);
}

double superadditivity_slack(const MetricFamily& phi1, const MetricFamily& phi2, double x, double y) {
  auto G1 = concave_transform(phi1, 1), G2 = concave_transform(phi2, 1);
  auto G12 = concave_transform(toric_tensor(phi1, phi2), 1);
  return G12(x + y) - G1(x) - G2(y);
}

}  // namespace adelic
