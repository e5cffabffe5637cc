#pragma once

// Arithmetic in GF(q), q = p^k, and dense polynomials over GF(q) with
// squarefree, distinct-degree and equal-degree factorization. Used for the
// F_q(T) adelic curve and for modular factorization over Z.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adelic/rational.hpp"

namespace adelic {

class FiniteField {
 public:
  using Elem = std::uint32_t;

  /// q must be a prime power below 2^16.
  explicit FiniteField(std::uint32_t q);

  std::uint32_t characteristic() const { return p_; }
  std::uint32_t degree() const { return k_; }
  std::uint32_t order() const { return q_; }

  Elem add(Elem a, Elem b) const;
  Elem sub(Elem a, Elem b) const;
  Elem neg(Elem a) const;
  Elem mul(Elem a, Elem b) const;
  Elem inv(Elem a) const;
  Elem pow(Elem a, std::uint64_t e) const;
  /// Image of an integer in the prime subfield.
  Elem from_int(long v) const;

  bool operator==(const FiniteField& o) const { return q_ == o.q_; }

 private:
  std::uint32_t p_ = 0, k_ = 0, q_ = 0;
  std::vector<Elem> exp_, log_;
};

/// Polynomial over GF(q), low degree first, no trailing zeros.
using FqPoly = std::vector<FiniteField::Elem>;

namespace fq {

int degree(const FqPoly& a);
void trim(FqPoly& a);
FqPoly add(const FiniteField& F, const FqPoly& a, const FqPoly& b);
FqPoly sub(const FiniteField& F, const FqPoly& a, const FqPoly& b);
FqPoly mul(const FiniteField& F, const FqPoly& a, const FqPoly& b);
FqPoly scale(const FiniteField& F, const FqPoly& a, FiniteField::Elem s);
void divmod(const FiniteField& F, const FqPoly& a, const FqPoly& b, FqPoly& q, FqPoly& r);
FqPoly rem(const FiniteField& F, const FqPoly& a, const FqPoly& b);
FqPoly quo(const FiniteField& F, const FqPoly& a, const FqPoly& b);
FqPoly gcd(const FiniteField& F, FqPoly a, FqPoly b);  // monic
FqPoly monic(const FiniteField& F, const FqPoly& a);
FqPoly derivative(const FiniteField& F, const FqPoly& a);
FqPoly powmod(const FiniteField& F, const FqPoly& a, const Integer& e, const FqPoly& m);
/// Bezout: s*a + t*b = gcd (monic).
FqPoly xgcd(const FiniteField& F, const FqPoly& a, const FqPoly& b, FqPoly& s, FqPoly& t);

/// Monic irreducible factors with multiplicities; input must be nonzero.
/// Factors are sorted by (degree, coefficients) so output is deterministic.
std::vector<std::pair<FqPoly, int>> factor(const FiniteField& F, const FqPoly& a);

/// Degrees of the irreducible factors of a squarefree polynomial (distinct
/// degree factorization only; cheaper than a full factorization).
std::vector<int> factor_degrees(const FiniteField& F, const FqPoly& a);

bool is_irreducible(const FiniteField& F, const FqPoly& a);

std::string to_string(const FqPoly& a, char var = 'T');

}  // namespace fq

}  // namespace adelic
