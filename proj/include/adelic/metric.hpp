#pragma once

// Metrics on O(n) over P^1 at a single place, families of them over an
// adelic curve, and continuous test functions.
//
// Convention: a local metric on O(n) is encoded by its potential phi with
// |s|(z) = |s(z)| e^{-phi(z)} for a section s given as a polynomial of degree
// <= n in the affine chart, and phi(z) - n ln|z| bounded at infinity. Toric
// metrics have phi(z) = n u(log|z|) with u a normalized piecewise-linear
// potential (see toric.hpp). At a nonarchimedean place p the coordinate is
// t = log|z|_p = -v_p(z) ln p, so the Gauss point sits at t = 0.

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adelic/curve.hpp"
#include "adelic/grid.hpp"
#include "adelic/toric.hpp"

namespace adelic {

/// Continuous bounded function on one local analytic space. Nonarchimedean
/// places need the toric profile; archimedean places accept either.
class LocalTestFunction {
 public:
  LocalTestFunction() : profile_(Profile::constant(0)) {}
  static LocalTestFunction toric(Profile h);
  static LocalTestFunction constant(double c) { return toric(Profile::constant(c)); }
  /// Archimedean callable; `bound` must dominate |f| (used for envelopes).
  static LocalTestFunction callable(std::function<double(CPoint)> f, double at_infinity, double bound);

  bool has_profile() const { return profile_.has_value(); }
  const Profile& profile() const;
  double operator()(CPoint z) const;
  double at_infinity() const;
  /// Value at the point with coordinate t of the toric skeleton.
  double at_t(double t) const;
  double sup_abs() const;
  bool is_zero() const;

  /// |f - 1|, kept exactly piecewise linear for profiles.
  LocalTestFunction abs_minus_one() const;

 private:
  std::optional<Profile> profile_;
  std::function<double(CPoint)> fn_;
  double at_inf_ = 0;
  double bound_ = 0;
};

/// Finitely supported family (extension by zero elsewhere), keyed by place id.
struct TestFunctionFamily {
  std::map<std::string, LocalTestFunction> local;

  const LocalTestFunction* find(const std::string& id) const;
  /// Restriction to a set of place ids; everything else becomes zero.
  TestFunctionFamily restricted(const std::vector<std::string>& ids) const;
};

/// Archimedean potential supplied by another module (dynamical metrics).
class PotentialSource {
 public:
  virtual ~PotentialSource() = default;
  virtual int level() const = 0;
  virtual double potential(CPoint z) const = 0;
  virtual double potential_at_infinity() const = 0;
  virtual std::string describe() const = 0;
};

class LocalMetric {
 public:
  enum class Kind { Toric, FSQuotient, Dynamical, Twisted };

  /// Naive metric max(0, log|z|) on O(1).
  LocalMetric();
  static LocalMetric toric(int level, ToricPotential u);
  /// Keeps the exact roof alongside its potential.
  static LocalMetric toric(int level, const Roof& roof);
  /// Quotient of the Hermitian norm c^T G c on polynomials of degree <= n
  /// (G real symmetric positive definite of size n+1). Archimedean.
  static LocalMetric fs_hermitian(std::vector<std::vector<double>> gram);
  /// Quotient of the norm max_k |c_k| lambda_k. Archimedean variant is
  /// smooth; the nonarchimedean one is toric and returned as such.
  static LocalMetric fs_sup_diagonal(std::vector<double> lambda, bool archimedean);
  static LocalMetric dynamical(std::shared_ptr<const PotentialSource> src);

  Kind kind() const;
  int level() const;
  bool is_toric() const { return kind() == Kind::Toric; }
  /// Radial: the potential depends on |z| only.
  bool radial() const;

  const ToricPotential& toric_potential() const;
  Roof roof() const;
  const std::vector<std::vector<double>>& gram() const;
  const std::vector<double>& sup_weights() const;
  const PotentialSource& source() const;

  double potential(CPoint z) const;
  double potential_at_infinity() const;
  /// Radial potential as a function of t = log|z|.
  double radial_potential(double t) const;

  /// phi + t f, i.e. the metric multiplied by e^{-t f}. Toric data with a
  /// toric profile stays toric.
  LocalMetric twisted(const LocalTestFunction& f, double t) const;
  /// Metric multiplied by e^{-c} (potential + c).
  LocalMetric shifted(double c) const;

  std::string describe() const;

 private:
  struct Data;
  explicit LocalMetric(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

class MetricFamily {
 public:
  /// Trivial family: naive toric metric on O(1) at every place.
  MetricFamily() : MetricFamily(AdelicCurve::rationals(), LocalMetric()) {}
  MetricFamily(AdelicCurve curve, LocalMetric default_metric, std::map<std::string, LocalMetric> exceptions = {});

  const AdelicCurve& curve() const { return curve_; }
  int level() const { return default_.level(); }
  const LocalMetric& default_metric() const { return default_; }
  const std::map<std::string, LocalMetric>& exceptions() const { return exceptions_; }
  const LocalMetric& at(const std::string& place_id) const;
  bool toric() const;

  /// Places carrying explicit data, plus every place when the curve has
  /// finitely many; sorted.
  std::vector<Place> listed_places() const;
  /// Sum over places of weight * g(metric, place); the default metric must
  /// contribute 0 on infinite curves ("divergent integral" otherwise).
  double integrate(const std::function<double(const LocalMetric&, const Place&)>& g) const;

 private:
  AdelicCurve curve_;
  LocalMetric default_;
  std::map<std::string, LocalMetric> exceptions_;
};

/// Family of toric roofs: `roofs` at listed places, the naive metric
/// (roof 0) elsewhere.
MetricFamily toric_family(const AdelicCurve& curve, int level, const std::map<std::string, Roof>& roofs);

/// Sup over the grid (plus 0 and infinity) of |phi - psi|; exact for two toric
/// metrics. Throws on a level mismatch.
double metric_distance(const LocalMetric& phi, const LocalMetric& psi, const VerificationGrid& grid = {});

LocalMetric fs_quotient_hermitian(const std::vector<std::vector<double>>& gram);
LocalMetric fs_quotient_sup_diagonal(const std::vector<double>& lambda, bool archimedean);

MetricFamily twist(const MetricFamily& phi, const TestFunctionFamily& f, double t);

/// d^2 f / dz dzbar at x assembled from forward four-point second differences
/// f(x+eu+ev) - f(x+eu) - f(x+ev) + f(x) along the real and imaginary axes.
std::complex<double> mixed_second_partial_fd(const std::function<double(CPoint)>& f, CPoint x, double eps);
/// Linear extrapolation to eps = 0 from two step sizes.
std::complex<double> richardson(std::complex<double> d1, double e1, std::complex<double> d2, double e2);

}  // namespace adelic
