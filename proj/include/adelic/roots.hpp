#pragma once

// Complex roots of rational polynomials (Aberth-Ehrlich simultaneous
// iteration) and p-adic root valuations from Newton polygons.

#include <complex>
#include <utility>
#include <vector>

#include "adelic/poly.hpp"

namespace adelic {

using Complex = std::complex<long double>;

struct RootOptions {
  int max_iterations = 500;
  /// Accept when every |p(z)| <= rel_residual * sum |a_i| |z|^i.
  long double rel_residual = 1e-12L;
};

struct RootResult {
  std::vector<Complex> roots;
  long double max_residual = 0;  // relative, see RootOptions
  int iterations = 0;
};

/// All complex roots with multiplicity. Throws with a residual report when
/// the iteration fails to converge.
RootResult complex_roots(const QPoly& p, const RootOptions& opt = {});
/// Same for complex coefficients (low degree first).
RootResult complex_roots(std::vector<Complex> coeffs, const RootOptions& opt = {});

/// Relative residual of a candidate root.
long double relative_residual(const std::vector<Complex>& coeffs, Complex z);

/// Segments of the Newton polygon of p at prime: (root valuation, count).
/// Valuations are exact rationals; sorted by increasing valuation. Roots
/// equal to zero (x | p) are reported with count under valuation "+inf" as
/// a separate zero_roots count.
struct NewtonPolygon {
  std::vector<std::pair<Rational, int>> slopes;
  int zero_roots = 0;
};
NewtonPolygon newton_polygon(const QPoly& p, const Integer& prime);

/// Archimedean analogue used for root radii bounds: log|a_i| upper hull.
std::vector<std::pair<double, int>> log_radius_segments(const std::vector<Complex>& coeffs);

}  // namespace adelic
