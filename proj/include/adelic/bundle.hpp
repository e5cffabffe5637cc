#pragma once

// Adelic vector bundles: a coordinate space K^r with one norm per place
// (unit diagonal norm at every unlisted place), arithmetic degrees, slopes,
// Harder-Narasimhan data for diagonal families and a brute-force maximal
// slope oracle in small rank.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adelic/curve.hpp"
#include "adelic/linalg.hpp"

namespace adelic {

class LocalNorm {
 public:
  enum class Kind { Diagonal, Lattice, Hermitian };

  /// ||sum c_i e_i|| = max |c_i| lambda_i (ultrametric) or, at archimedean
  /// places, the orthogonal norm with ||e_i|| = lambda_i.
  static LocalNorm diagonal(std::vector<Rational> lambda);
  /// Diagonal norm given by ln ||e_i|| (inexact).
  static LocalNorm diagonal_log(std::vector<double> log_lambda);
  /// Nonarchimedean norm whose unit ball is spanned by the columns of B.
  static LocalNorm lattice(std::vector<std::vector<Rational>> basis);
  /// Archimedean Hermitian norm c^T G c (real symmetric G).
  static LocalNorm hermitian(Matrix gram);
  static LocalNorm unit(int dim) { return diagonal(std::vector<Rational>(static_cast<std::size_t>(dim), Rational(1))); }

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }
  bool is_diagonal() const;
  /// Values are exact rationals (diagonal or lattice).
  bool exact() const;
  /// ln ||e_i|| for diagonal norms (also diagonal lattices and Gram matrices).
  std::vector<double> log_diagonal(const Place& w) const;
  /// ln ||e_1 ^ ... ^ e_r||.
  double log_det_norm(const Place& w) const;

  const std::vector<Rational>& lambda() const { return lambda_; }
  const std::vector<double>& log_lambda() const { return log_lambda_; }
  const std::vector<std::vector<Rational>>& basis() const { return basis_; }
  const std::vector<std::vector<Rational>>& basis_inverse() const { return basis_inv_; }
  const Matrix& gram() const { return gram_; }

 private:
  Kind kind_ = Kind::Diagonal;
  int dim_ = 0;
  std::vector<Rational> lambda_;
  std::vector<double> log_lambda_;
  std::vector<std::vector<Rational>> basis_, basis_inv_;
  Matrix gram_;
};

class AdelicVectorBundle {
 public:
  AdelicVectorBundle(AdelicCurve curve, int dim, std::map<std::string, LocalNorm> norms = {},
                     std::vector<std::string> labels = {});

  const AdelicCurve& curve() const { return curve_; }
  int dimension() const { return dim_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::map<std::string, LocalNorm>& norms() const { return norms_; }
  /// Norm at a place (unit diagonal when unlisted).
  LocalNorm norm_at(const std::string& place_id) const;
  bool diagonal() const;
  bool exact() const;

 private:
  AdelicCurve curve_;
  int dim_;
  std::map<std::string, LocalNorm> norms_;
  std::vector<std::string> labels_;
};

double arithmetic_degree(const AdelicVectorBundle& bundle);
double slope(const AdelicVectorBundle& bundle);

/// Slope of the subspace spanned by the rows of `vectors` (linearly
/// independent, integer coordinates). Shared by the oracle and the HN data
/// so that equal subspaces give bitwise equal slopes.
double subspace_slope(const AdelicVectorBundle& bundle, const std::vector<std::vector<Integer>>& vectors);

struct OracleResult {
  double slope = 0;
  std::vector<std::vector<Integer>> basis;  // spanning vectors of the argmax
  long candidates = 0;
};

/// Maximum slope over subspaces whose reduced row echelon basis has entries
/// a/b with |a|, |b| <= height_bound. Ties go to the larger subspace.
OracleResult max_slope_bruteforce(const AdelicVectorBundle& bundle, int height_bound);

struct FiltrationStep {
  double threshold = 0;
  std::vector<int> indices;  // basis lines spanning F^t
};

/// Degrees of the basis lines of a simultaneously diagonal bundle.
std::vector<double> line_degrees(const AdelicVectorBundle& bundle);
/// Steps with strictly decreasing thresholds; F^t = span of lines of degree >= t.
std::vector<FiltrationStep> hn_filtration_diagonal(const AdelicVectorBundle& bundle);

struct SpectralTrace {
  double value = 0;
  std::vector<double> trace;  // N = 1..N_max
};

/// exp(-deg(s^N)/N) for the basis section s = e_k at level n, where the
/// level-m bundle comes from `family(m)` and s^N is e_{kN} at level nN.
SpectralTrace spectral_norm_diagonal(int k, int n, const std::function<AdelicVectorBundle(int)>& family, int N_max);

}  // namespace adelic
