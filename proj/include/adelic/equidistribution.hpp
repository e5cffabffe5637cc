#pragma once

// Generic small sequences of closed points built from iterated preimages,
// Galois-orbit averages at each place, limit functionals against
// Monge-Ampere measures, normalized heights, essential-minimum brackets and
// convergence reports.

#include <optional>
#include <string>
#include <vector>

#include "adelic/chi_volume.hpp"
#include "adelic/dynamics.hpp"
#include "adelic/measure.hpp"
#include "adelic/roots.hpp"

namespace adelic {

struct GenericSequence {
  std::string descriptor;
  std::vector<ClosedPoint> points;   // Y_1..Y_N
  std::vector<double> heights;       // h(Y_n)
  /// All points pairwise distinct (enough for genericity on P^1).
  bool generic = false;
};

/// Y_n = an irreducible factor of the numerator of f^n(z) - target: the one
/// of largest degree, ties broken by lex_less. Heights come from
/// h(Y_n) = h(target)/d^n.
GenericSequence small_sequence_generate(const Endomorphism& f, const Rational& target, int N);

/// Preimage polynomial numerator(f^n(z) - target) (not made monic).
QPoly preimage_polynomial(const Endomorphism& f, const Rational& target, int n);

/// Uniform measure on the Galois orbit of Y at w: complex roots at the
/// archimedean place, Newton-polygon skeleton atoms at a prime.
LocalMeasure galois_orbit_local_points(const ClosedPoint& Y, const Place& w, const RootOptions& opt = {});

/// sum over w in Omega' of nu(w) times the orbit average of f_w.
double delta_functional(const ClosedPoint& Y, const AdelicCurve& curve, const TestFunctionFamily& f,
                        const PlacePredicate& omega = {}, const RootOptions& opt = {});

/// Integral of f against MA(phi) / deg over Omega'.
MonteCarlo limit_functional(const MetricFamily& phi, const TestFunctionFamily& f, const PlacePredicate& omega = {},
                            const MeasureOptions& opt = {});

/// Sum over places of nu(w) times the orbit average of -ln|s|_phi, divided
/// by the level, with s = 1 (s = z for the point at infinity).
double normalized_height(const ClosedPoint& Y, const MetricFamily& phi, const RootOptions& opt = {});

struct SpaceHeight {
  double value = 0;                 // chi(phi) / (2 level)
  std::vector<double> trace;        // lattice estimates / (2 level), n = 1..n_max
};
SpaceHeight normalized_height_space(const MetricFamily& phi, int n_max = 8);

struct EssentialMinimum {
  double lower = 0, upper = 0;
  std::size_t candidates = 0;
  std::string witness;              // closed point realizing the upper bound
};

struct EssMinOptions {
  int degree_bound = 2;
  /// Numerators and denominators (and quadratic coefficients) up to this size.
  int height_budget = 8;
  /// Number of lowest heights discarded as a finite exclusion set.
  int exclusion = 4;
  /// Heights are known to be >= 0 (canonical dynamical families).
  bool nonnegative = false;
};

/// Bracket of the essential minimum. The upper bound is the height of the
/// (exclusion+1)-th lowest enumerated point; the lower bound adds up the
/// infima of phi - naive over the places.
EssentialMinimum essential_minimum_estimate(const MetricFamily& phi, const EssMinOptions& opt = {});

struct ConvergenceRow {
  int n = 0;
  std::string f_id;
  double delta_n = 0, delta_x = 0, gap = 0, height = 0;
};

struct ConvergenceReport {
  std::string seq;
  std::vector<ConvergenceRow> rows;
  /// Per test function: gaps and heights in the order of the sequence.
  std::vector<std::string> f_ids;
  std::vector<std::vector<double>> gaps;
  std::vector<double> heights;
  /// Per test function: max_n gap 2^{n/2} and whether gaps never increase.
  std::vector<double> rate_constant;
  std::vector<bool> nonincreasing;
};

struct NamedTest {
  std::string id;
  TestFunctionFamily f;
};

ConvergenceReport convergence_report(const GenericSequence& seq, const MetricFamily& phi,
                                     const std::vector<NamedTest>& bank, const PlacePredicate& omega = {},
                                     const MeasureOptions& opt = {});

/// Five Lipschitz-1 toric test functions at the places inf and 2.
std::vector<NamedTest> lipschitz_test_bank();

}  // namespace adelic
