#pragma once

// Deterministic verification grid on the Riemann sphere: equiangular in the
// argument and uniform in log|z| on [-R, R]. The points 0 and infinity are
// handled separately by every consumer.

#include <complex>
#include <vector>

namespace adelic {

using CPoint = std::complex<double>;

struct VerificationGrid {
  int n_angle = 64;
  int n_radius = 64;
  double log_radius = 4.0;

  std::vector<double> log_radii() const;
  std::vector<double> angles() const;
  /// All finite nonzero grid points, radius-major.
  std::vector<CPoint> points() const;
  /// Same grid with both resolutions doubled.
  VerificationGrid refined() const;
  void validate() const;
};

}  // namespace adelic
