#pragma once

// Small dense symmetric positive definite helpers (row-major) and exact
// rational determinants.

#include <optional>
#include <vector>

#include "adelic/rational.hpp"

namespace adelic {

using Matrix = std::vector<std::vector<double>>;

/// Lower Cholesky factor, or nullopt when A is not numerically definite.
std::optional<Matrix> cholesky(const Matrix& a);
/// Solves A x = b given the Cholesky factor of A.
std::vector<double> cholesky_solve(const Matrix& l, std::vector<double> b);
/// Inverse of a symmetric positive definite matrix; throws "norm not definite".
Matrix spd_inverse(const Matrix& a);
/// ln det of a symmetric positive definite matrix; throws "norm not definite".
double spd_log_det(const Matrix& a);
bool is_symmetric(const Matrix& a, double tol = 1e-12);

/// Exact determinant by fraction-tracking elimination.
Rational rational_det(std::vector<std::vector<Rational>> a);

}  // namespace adelic
