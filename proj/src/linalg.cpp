#include "adelic/linalg.hpp"

#include <cmath>

#include "adelic/rational.hpp"

namespace adelic {

std::optional<Matrix> cholesky(const Matrix& a) {
  std::size_t n = a.size();
  Matrix l(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    if (a[j].size() != n) return std::nullopt;
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (!(d > 0) || !std::isfinite(d)) return std::nullopt;
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  return l;
}

std::vector<double> cholesky_solve(const Matrix& l, std::vector<double> b) {
  std::size_t n = l.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i][k] * b[k];
    b[i] /= l[i][i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= l[k][i] * b[k];
    b[i] /= l[i][i];
  }
  return b;
}

bool is_symmetric(const Matrix& a, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != a.size()) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (std::fabs(a[i][j] - a[j][i]) > tol * (1 + std::fabs(a[i][j]))) return false;
  }
  return true;
}

Matrix spd_inverse(const Matrix& a) {
  if (a.empty() || !is_symmetric(a)) throw Error("norm not definite");
  auto l = cholesky(a);
  if (!l) throw Error("norm not definite");
  std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1;
    auto col = cholesky_solve(*l, e);
    for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return inv;
}

double spd_log_det(const Matrix& a) {
  if (a.empty() || !is_symmetric(a)) throw Error("norm not definite");
  auto l = cholesky(a);
  if (!l) throw Error("norm not definite");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += 2 * std::log((*l)[i][i]);
  return s;
}

Rational rational_det(std::vector<std::vector<Rational>> a) {
  std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(a[c], a[piv]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      Rational f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

}  // namespace adelic
