#pragma once

// Exact integers and rationals (GMP) plus the few log/valuation helpers the
// rest of the library needs.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace adelic {

using Integer = mpz_class;
using Rational = mpq_class;

/// Thrown for every contract violation in the library. The message is the
/// user-facing error string.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "a", "a/b" or a finite decimal such as "-0.125" into a canonical
/// rational. Throws Error on malformed input or a zero denominator.
Rational parse_rational(const std::string& text);

/// "num/den" with den > 0, or just "num" when den == 1.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Natural log of |z| for z != 0, accurate for integers of any size.
double log_abs(const Integer& z);
double log_abs(const Rational& q);

/// p-adic valuation of z != 0.
long valuation(const Integer& z, const Integer& p);
long valuation(const Rational& q, const Integer& p);

/// Prime factors of |z| in increasing order (trial division then Pollard rho).
std::vector<Integer> prime_factors(const Integer& z);

bool is_probable_prime(const Integer& z);

/// Integer power with exponent >= 0.
Rational pow(const Rational& q, unsigned long e);

/// Bit size of max(|num|, |den|).
std::size_t bit_size(const Rational& q);

}  // namespace adelic
