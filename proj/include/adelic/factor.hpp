#pragma once

// Factorization of polynomials over Q: squarefree split, Eisenstein and
// cyclotomic shortcuts, then Zassenhaus with Hensel lifting.

#include <utility>
#include <vector>

#include "adelic/poly.hpp"

namespace adelic {

struct FactorOptions {
  int max_zassenhaus_degree = 256;
  long max_recombinations = 2000000;
};

/// Monic irreducible factors of a nonzero polynomial with multiplicities,
/// sorted with lex_less. Constants have no factors.
std::vector<std::pair<QPoly, int>> factor(const QPoly& p, const FactorOptions& opt = {});

bool is_irreducible(const QPoly& p, const FactorOptions& opt = {});

/// Eisenstein criterion at some prime dividing the content of the lower
/// coefficients. Returns the prime or 0.
Integer eisenstein_prime(const std::vector<Integer>& z);

/// The m-th cyclotomic polynomial (integer coefficients, low degree first).
std::vector<Integer> cyclotomic(unsigned m);

/// Euler phi for small arguments.
unsigned euler_phi(unsigned m);

}  // namespace adelic
