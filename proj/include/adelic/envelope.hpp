#pragma once

// Quotient (Fubini-Study) metrics of sup norms for radial archimedean
// metrics, and the monotone envelope f_n of a nonnegative radial function:
// (n phi + e^{-f})_FS = n phi + e^{-f_n}.
//
// For radial data the optimal sections can be taken with real coefficients
// and the evaluation point on the positive real axis. The minimax problem
//   minimize sup_y |s(y)| e^{-P(y) - F(y)}  subject to  |s(x)| e^{-P(x)} = 1
// is solved by Lawson's iteratively reweighted least squares on a sample of
// radii times angles in [0, pi]. The sup over the sample underestimates the
// true sup, which is the only approximation and is reported one-sided.

#include <functional>
#include <vector>

#include "adelic/metric.hpp"

namespace adelic {

struct EnvelopeOptions {
  int sup_radii = 161;           // log-radii sampled in [-sup_log_radius, sup_log_radius]
  double sup_log_radius = 8.0;
  int sup_angles = 0;            // 0: 4 (n + 1) for level n, at least 64
  int max_iterations = 60;
  /// Stop once the primal value is within this relative gap of the best
  /// lower bound or of the a-priori floor e^{-f(x)}.
  double stop_gap = 1e-4;
};

struct RadialQuotient {
  double value = 0;               // V = sup of the optimal section's weighted size
  double lower = 0;               // weighted least-squares lower bound on V
  std::vector<double> coeffs;     // polynomial coefficients with |s(x)| e^{-P(x)} = 1
  int iterations = 0;
};

/// Solves the minimax problem above at level n with potential P (of O(n))
/// and weight F, both functions of t = log|z|. `warm` optionally seeds the
/// iteration with a feasible section (its value is an upper bound).
RadialQuotient radial_quotient(const std::function<double(double)>& P, int n, const std::function<double(double)>& F,
                               double t_x, const EnvelopeOptions& opt = {}, const std::vector<double>* warm = nullptr,
                               double floor_value = 0);

/// Potential of the quotient metric of the sup norm of a radial metric,
/// at |z| = e^t. Always <= phi's potential at that point.
double fs_potential_of_sup(const LocalMetric& phi, double t, const EnvelopeOptions& opt = {});

/// Potential of (phi + psi)_FS at e^t, seeded by the product of the optimal
/// sections of phi and psi so that it dominates the sum of their potentials.
double fs_potential_of_sum(const LocalMetric& phi, const LocalMetric& psi, double t, const EnvelopeOptions& opt = {});

struct EnvelopePoint {
  double t = 0;
  double f = 0;
  std::vector<double> fn;           // f_0 .. f_{n_max}
  std::vector<int> iterations;      // solver iterations spent per level
};

/// f_n for n = 0..n_max at each log-radius in `ts`. phi must be the quotient
/// metric of a diagonal Hermitian norm on O(1); f must be radial and >= 0.
std::vector<EnvelopePoint> fs_envelope(const LocalMetric& phi, const LocalTestFunction& f, const std::vector<double>& ts,
                                       int n_max, const EnvelopeOptions& opt = {});

}  // namespace adelic
