#pragma once

// Dense univariate polynomials over Q, with the integer-coefficient views
// needed by the factorizer and the Newton polygon code.

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "adelic/rational.hpp"

namespace adelic {

class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<Rational> coeffs);  // low degree first
  static QPoly constant(const Rational& c);
  static QPoly monomial(const Rational& c, int degree);
  static QPoly x();

  /// Parses expressions such as "z^2 - 2", "3*z^3+z/2-1/7", "(z+1)^2" or
  /// "T^2+T+1". Any single letter is accepted as the variable.
  static QPoly parse(const std::string& text);

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  const Rational& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  Rational coeff(int i) const;
  const std::vector<Rational>& coeffs() const { return c_; }
  const Rational& leading() const { return c_.back(); }

  QPoly operator+(const QPoly& o) const;
  QPoly operator-(const QPoly& o) const;
  QPoly operator-() const;
  QPoly operator*(const QPoly& o) const;
  QPoly operator*(const Rational& s) const;
  bool operator==(const QPoly& o) const { return c_ == o.c_; }
  bool operator!=(const QPoly& o) const { return !(*this == o); }

  /// Euclidean division; throws on a zero divisor.
  void divmod(const QPoly& d, QPoly& q, QPoly& r) const;
  QPoly operator%(const QPoly& d) const;
  QPoly operator/(const QPoly& d) const;

  QPoly derivative() const;
  QPoly monic() const;
  QPoly pow(unsigned e) const;
  /// p(q(z)).
  QPoly compose(const QPoly& q) const;

  Rational eval(const Rational& z) const;
  std::complex<long double> eval(std::complex<long double> z) const;

  /// Primitive integer polynomial proportional to *this with positive
  /// leading coefficient.
  std::vector<Integer> primitive_integer() const;
  static QPoly from_integer(const std::vector<Integer>& z);

  std::string to_string(char var = 'z') const;

 private:
  void trim();
  std::vector<Rational> c_;
};

QPoly gcd(QPoly a, QPoly b);  // monic, or zero

/// Parses a quotient such as "(z^2+1)/(2z)" into coprime (num, den) with den
/// monic. Division by the zero polynomial throws.
std::pair<QPoly, QPoly> parse_rational_function(const std::string& text);
bool is_squarefree(const QPoly& p);

/// Lexicographic comparison on (degree, coefficients high to low) used as a
/// deterministic tie-break.
bool lex_less(const QPoly& a, const QPoly& b);

/// Sum of |coefficients| (as doubles).
double l1_norm(const QPoly& p);

/// Bits of the largest numerator or denominator among the coefficients.
std::size_t max_coeff_bits(const QPoly& p);

/// Characteristic polynomial of multiplication by `element` in Q[w]/(modulus).
/// `modulus` must be nonconstant; the result is monic of degree deg(modulus).
QPoly char_poly_mod(const QPoly& element, const QPoly& modulus);

/// Inverse of a modulo m (throws if not invertible).
QPoly inverse_mod(const QPoly& a, const QPoly& m);

}  // namespace adelic
