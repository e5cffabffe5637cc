#pragma once

// Concave transforms, chi-volumes and relative volumes of metrized O(m) on
// P^1, with exact closed forms for toric families and finite-level lattice
// estimates from the monomial basis.
//
// For a toric family of level m with roofs theta_w the monomial z^k of
// H^0(O(nm)) has ||z^k||_w = exp(-nm theta_w(k/(nm))), so its filtration
// threshold is m sum_w nu(w) theta_w(k/(nm)) and
//   G(y) = m sum_w nu(w) theta_w(y/m)  on [0, m],
//   chi = 2 int_0^m G = 2 m^2 sum_w nu(w) int_0^1 theta_w.

#include <optional>
#include <vector>

#include "adelic/measure.hpp"
#include "adelic/metric.hpp"

namespace adelic {

/// Sum over places of nu(w) theta_w (the default roof must vanish on
/// infinite curves). Throws for non-toric families.
Roof total_roof(const MetricFamily& phi);

/// Indices k of monomials z^k in H^0(O(n m)) whose threshold is >= t.
std::vector<int> section_filtration(const MetricFamily& phi, int n, double t);

struct ConcaveTransform {
  int level = 1;
  /// g(x) = G(level x) on [0, 1].
  Roof normalized;
  /// Finite-level staircase: threshold of z^k at level n_max, k = 0..n_max*level.
  int n = 0;
  std::vector<double> staircase;
  /// Minimal and maximal line thresholds at level n_max divided by n_max.
  double mu_min = 0, mu_max = 0;

  /// G(y) for y in [0, level].
  double operator()(double y) const;
};

ConcaveTransform concave_transform(const MetricFamily& phi, int n_max);

double chi_volume_closed_form(const MetricFamily& phi);

struct LatticeEstimate {
  int n = 0;
  double estimate = 0;
  std::optional<double> closed_form;
  /// Largest change of a monomial log sup norm between the grid and its
  /// refinement (archimedean non-toric places only).
  double spread = 0;
  bool grid_too_coarse = false;
};

/// 2 deg(H^0(O(nm)), sup norms) / n^2 with the monomial basis.
LatticeEstimate chi_volume_lattice_estimate(const MetricFamily& phi, int n, const VerificationGrid& grid = {});

struct RelativeVolume {
  double estimate = 0;
  std::optional<double> closed_form;
};

/// -(2/n^2) ln(||.||_{n phi, det} / ||.||_{n psi, det}) at one place.
RelativeVolume relative_volume_estimate(const LocalMetric& phi, const LocalMetric& psi, const Place& w, int n,
                                        const VerificationGrid& grid = {});

struct GateauxResult {
  double derivative = 0;        // 2 sum nu int f dMA (roof route)
  double measure_route = 0;     // same through integrate_global(MA(phi), f)
  double h = 1e-3;
  double chi_plus = 0, chi_minus = 0;
  double finite_difference = 0; // (chi(phi + h f) - chi(phi - h f)) / 2h
  double measure_stderr = 0;
};

GateauxResult gateaux_derivative(const MetricFamily& phi, const TestFunctionFamily& f, double h = 1e-3,
                                 const MeasureOptions& opt = {});

struct MaxSlopeTrace {
  double value = 0;                 // max of G
  std::vector<double> mu_max;       // mu_max(V_n)/n, n = 1..n_max
  std::vector<double> mu_min;       // mu_min(V_n)/n
};

MaxSlopeTrace asymptotic_max_slope(const MetricFamily& phi, int n_max);

/// Pointwise convex combination delta phi1 + (1 - delta) phi2 (same level).
MetricFamily toric_convex_combination(const MetricFamily& phi1, const MetricFamily& phi2, double delta);
/// Tensor product phi1 + phi2 on O(m1 + m2).
MetricFamily toric_tensor(const MetricFamily& phi1, const MetricFamily& phi2);

/// chi(delta phi1 + (1-delta) phi2) - delta chi(phi1) - (1-delta) chi(phi2).
double concavity_slack(const MetricFamily& phi1, const MetricFamily& phi2, double delta);
/// G_{phi1+phi2}(x+y) - G_{phi1}(x) - G_{phi2}(y), x in [0,m1], y in [0,m2].
double superadditivity_slack(const MetricFamily& phi1, const MetricFamily& phi2, double x, double y);

}  // namespace adelic
