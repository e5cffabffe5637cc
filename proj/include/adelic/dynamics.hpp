#pragma once

// Endomorphisms of P^1 over Q, canonical (Tate limit) metrics, rescaling
// laws for the isomorphism alpha, compatibility factors of commuting maps and
// canonical heights.
//
// A map f = num/den of degree d is lifted to the homogeneous pair
//   F(x, y) = alpha * (y^d num(x/y), y^d den(x/y)).
// With Phi_0(x, y) = ln max(|x|, |y|) and lambda = Phi_0 o F - d Phi_0, the
// n-th approximation of the canonical potential is
//   G_n = Phi_0 + sum_{i<n} d^{-(i+1)} lambda o F^i,
// and phi(z) = G(z, 1) is the potential of the canonical metric on O(1).

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adelic/metric.hpp"
#include "adelic/poly.hpp"

namespace adelic {

class Endomorphism {
 public:
  /// num and den coprime, max degree >= 2 ("degree must exceed 1").
  Endomorphism(QPoly num, QPoly den, Rational alpha = 1);
  /// "z^2+1", "(z^2+1)/(2*z)"; alpha given separately.
  static Endomorphism parse(const std::string& text, const Rational& alpha = 1);

  const QPoly& numerator() const { return num_; }
  const QPoly& denominator() const { return den_; }
  const Rational& alpha() const { return alpha_; }
  int degree() const { return d_; }
  Endomorphism with_alpha(const Rational& alpha) const { return Endomorphism(num_, den_, alpha); }

  /// Homogeneous lift coefficients: F_j(x, y) = sum_i lift(j)[i] x^i y^{d-i}.
  const std::vector<Rational>& lift(int j) const { return j == 0 ? f0_ : f1_; }
  /// alpha-scaled integral primitive form: lift = content * primitive.
  const Rational& content() const { return content_; }
  const std::vector<Integer>& primitive(int j) const { return j == 0 ? p0_ : p1_; }
  /// Resultant of the two primitive forms (nonzero).
  const Integer& resultant() const { return res_; }
  /// f = a z^d / b: a single monomial over a constant.
  bool monomial() const;

  /// Image of a rational point; nullopt is the point at infinity.
  std::optional<Rational> operator()(const std::optional<Rational>& z) const;
  std::complex<long double> eval(std::complex<long double> z) const;
  std::string describe() const;

 private:
  QPoly num_, den_;
  Rational alpha_;
  int d_ = 0;
  std::vector<Rational> f0_, f1_;
  Rational content_;
  std::vector<Integer> p0_, p1_;
  Integer res_;
};

/// Archimedean evaluation of lambda and of G_n in homogeneous coordinates.
double tate_lambda(const Endomorphism& f, std::complex<long double> x, std::complex<long double> y);
/// G_n(z, 1) (z finite) computed with normalized iterates.
double tate_potential(const Endomorphism& f, std::complex<long double> z, int depth);
/// G_n(1, 0), i.e. lim phi(z) - ln|z|.
double tate_potential_at_infinity(const Endomorphism& f, int depth);

/// Nonarchimedean G_n(z, 1) at a prime for a rational z (exact valuations;
/// nullopt is the point at infinity).
double tate_potential_padic(const Endomorphism& f, const Integer& prime, const std::optional<Rational>& z, int depth);
/// Exact bound on |lambda| at a prime: max(|ln|c|_p|, |ln|c|_p - v_p(Res) ln p|).
double lambda_sup_padic(const Endomorphism& f, const Integer& prime);
/// Good reduction: the primitive lift has unit resultant at the prime.
bool good_reduction(const Endomorphism& f, const Integer& prime);
/// Primes where the canonical metric differs from the naive one.
std::vector<Integer> special_primes(const Endomorphism& f);

struct TateApprox {
  std::string place;
  int depth = 0;
  int degree = 2;
  double lambda_sup = 0;       // 1.05 x grid sup at infinity; exact bound at primes
  /// Sample points (complex at infinity, real rationals at primes); the last
  /// two archimedean entries are 0 and infinity (stored as NaN).
  std::vector<CPoint> points;
  /// h_n = G_n - Phi_0 at every sample point.
  std::vector<double> correction;
  /// increments[k] = max over samples of |h_{k+1} - h_k|, k < depth.
  std::vector<double> increments;
  /// Exact toric roof when the canonical metric is toric at this place.
  std::optional<Roof> roof;
  /// Guaranteed distance to the canonical potential: lambda_sup d^{-n}/(d-1).
  double error_bound() const;
};

/// h_n at a place with the naive starting metric; `place` is "inf" or a prime.
TateApprox tate_local_potential(const Endomorphism& f, const std::string& place, int depth,
                                const VerificationGrid& grid = {});
/// Same with an arbitrary archimedean starting metric phi0 on O(1):
/// Phi_0(x, y) = phi0(x/y) + ln|y|.
TateApprox tate_local_potential(const Endomorphism& f, const LocalMetric& phi0, int depth,
                                const VerificationGrid& grid = {});

/// 1.05 times the grid sup of |lambda| at infinity (0 and infinity included).
double lambda_sup_infinity(const Endomorphism& f, const VerificationGrid& grid = {});
/// Smallest depth whose tail bound lambda_sup d^{-n}/(d-1) is <= tol.
int depth_for_tolerance(double lambda_sup, int d, double tol);

/// Exact canonical roof when the map is a monomial a z^d, at any place:
/// theta(x) = (ln|alpha| + x ln|a|)/(d-1). Also used at good-reduction primes.
std::optional<Roof> canonical_roof(const Endomorphism& f, const Place& w);

/// Archimedean or p-adic canonical potential truncated at a fixed depth.
class DynamicalPotential : public PotentialSource {
 public:
  DynamicalPotential(Endomorphism f, Place w, int depth);
  int level() const override { return 1; }
  double potential(CPoint z) const override;
  double potential_at_infinity() const override;
  std::string describe() const override;
  const Endomorphism& map() const { return f_; }
  const Place& place() const { return w_; }
  int depth() const { return depth_; }
  /// Exact-valuation evaluation at a rational point (p-adic places).
  double potential_rational(const std::optional<Rational>& z) const;

 private:
  Endomorphism f_;
  Place w_;
  int depth_;
};

/// Canonical metric family of (f, alpha) over Q: exact toric roofs where
/// available, depth-truncated Tate potentials elsewhere, with every depth
/// chosen so that the tail bound is <= tol.
MetricFamily canonical_metric_family(const Endomorphism& f, double tol);
/// Depth used at each listed place by canonical_metric_family (0 = exact).
std::map<std::string, int> canonical_depths(const Endomorphism& f, double tol);

/// Closed point of P^1 over Q: a monic irreducible minimal polynomial, or the
/// point at infinity.
struct ClosedPoint {
  QPoly minimal;
  bool infinity = false;

  static ClosedPoint rational(const Rational& a);
  static ClosedPoint at_infinity();
  /// Monic irreducible polynomial (checked).
  static ClosedPoint from_polynomial(const QPoly& p);
  /// "2", "-1/3", "inf" or a polynomial such as "z^2-2".
  static ClosedPoint parse(const std::string& text);
  int degree() const { return infinity ? 1 : minimal.degree(); }
  std::optional<Rational> as_rational() const;
  std::string describe() const;
  bool operator==(const ClosedPoint& o) const { return infinity == o.infinity && minimal == o.minimal; }
};

/// Weil height ln M(p)/deg for the primitive integer multiple of p.
double naive_height(const ClosedPoint& P);

struct HeightOptions {
  int depth = 12;
  /// Maximal bit size of orbit coefficients.
  std::size_t bit_budget = std::size_t(1) << 22;
  /// Also evaluate the sum of local canonical potentials.
  bool local_check = true;
  double tol = 1e-12;
};

struct HeightResult {
  double value = 0;                 // telescoping value at the final depth
  std::vector<double> trace;        // d^{-n} h_naive(f^n P), n = 0..depth
  int depth = 0;
  bool preperiodic = false;
  double constant = 0;              // C with |step n| <= C d^{-(n+1)}
  double error_bound = 0;           // C d^{-depth}/(d-1)
  std::optional<double> local;      // sum of local canonical potentials
};

HeightResult canonical_height(const Endomorphism& f, const ClosedPoint& P, const HeightOptions& opt = {});

/// Sum over places of the local canonical potentials at the Galois orbit,
/// divided by the degree. Requires good reduction at every prime unless P
/// is rational.
double canonical_height_local(const Endomorphism& f, const ClosedPoint& P, double tol = 1e-12);

/// r with alpha-lifts satisfying F o G = r G o F; throws "not a commuting
/// pair" if f o g != g o f.
Rational commuting_compatibility_factor(const Endomorphism& f, const Endomorphism& g);

struct ConstantCheck {
  double residual = 0;     // sup |lambda o f - b lambda - a|
  double deviation = 0;    // sup |lambda + a/(b-1)|
  double constant = 0;     // -a/(b-1)
  bool equation_holds = false;
  bool constant_holds = false;
};
/// Grid check that f^* lambda = b lambda + a forces lambda = -a/(b-1).
ConstantCheck dynamic_constant_check(const Endomorphism& f, const std::function<double(CPoint)>& lambda, double b,
                                     double a, const VerificationGrid& grid = {});

/// sup over the grid of |G(F(z,1)) - d G(z,1)| for the truncated canonical
/// potential at infinity (the isometry functional equation).
double functional_equation_residual(const Endomorphism& f, int depth, const VerificationGrid& grid = {});

}  // namespace adelic
