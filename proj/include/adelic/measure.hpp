#pragma once

// Measures on the local analytic spaces of P^1, families of them over an
// adelic curve, Monge-Ampere measures of the supported metric classes, global
// integrals, truncated log-section integrals and the Radon-Nikodym check.
//
// The global adelic space is the disjoint union of the local spaces over the
// (atomic) places, so a global integral is a nu-weighted sum of local ones.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adelic/dynamics.hpp"
#include "adelic/metric.hpp"

namespace adelic {

struct CircleAtom {
  double radius = 1;
  double mass = 0;
};

/// Point zeta_t of the skeleton (the Gauss point is t = 0).
struct SegmentAtom {
  double t = 0;
  double mass = 0;
};

struct PointAtom {
  CPoint z;
  double mass = 0;
};

/// Deterministic 64-bit stream (SplitMix64).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double uniform();

 private:
  std::uint64_t state_;
};

/// Backward-iteration sampler of the equilibrium measure of a map: each step
/// moves to a preimage chosen uniformly by the seeded stream.
class JuliaSampler {
 public:
  JuliaSampler(Endomorphism f, std::uint64_t seed = 1, long budget = 100000, long burn_in = 1000);
  const Endomorphism& map() const { return f_; }
  std::uint64_t seed() const { return seed_; }
  long budget() const { return budget_; }
  /// The `budget` sampled points (computed once, deterministic).
  const std::vector<CPoint>& samples() const;

 private:
  Endomorphism f_;
  std::uint64_t seed_;
  long budget_, burn_in_;
  mutable std::vector<CPoint> cache_;
};

struct MonteCarlo {
  double mean = 0;
  double stderr_ = 0;   // 0 for exact integrals
  long budget = 0;      // 0 for exact integrals
  std::uint64_t seed = 0;
};

class LocalMeasure {
 public:
  enum class Kind { Circles, Segments, Sampler, Points };

  /// Dirac mass at the Gauss point.
  LocalMeasure() : mass_(1.0), segments_{{0.0, 1.0}} {}
  static LocalMeasure circles(std::vector<CircleAtom> atoms, int angles = 256);
  static LocalMeasure segments(std::vector<SegmentAtom> atoms);
  static LocalMeasure points(std::vector<PointAtom> atoms);
  static LocalMeasure sampler(std::shared_ptr<const JuliaSampler> s, double mass);

  Kind kind() const { return kind_; }
  double total_mass() const { return mass_; }
  bool archimedean() const { return kind_ != Kind::Segments; }
  const std::vector<CircleAtom>& circle_atoms() const { return circles_; }
  const std::vector<SegmentAtom>& segment_atoms() const { return segments_; }
  const std::vector<PointAtom>& point_atoms() const { return points_; }
  const JuliaSampler& julia() const;
  int angles() const { return angles_; }

  /// Integral of g; g(z) on archimedean points, g at skeleton parameter t on
  /// segments (passed as CPoint(t, 0) with `on_skeleton` set).
  MonteCarlo integrate(const std::function<double(CPoint, bool on_skeleton)>& g) const;
  /// Integral of a test function (toric profiles are exact on circles).
  MonteCarlo integrate(const LocalTestFunction& f) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Segments;
  double mass_ = 0;
  int angles_ = 256;
  std::vector<CircleAtom> circles_;
  std::vector<SegmentAtom> segments_;
  std::vector<PointAtom> points_;
  std::shared_ptr<const JuliaSampler> sampler_;
};

class MeasureFamily {
 public:
  /// Gauss-point probability measure at every place.
  MeasureFamily() : MeasureFamily(AdelicCurve::rationals(), LocalMeasure()) {}
  MeasureFamily(AdelicCurve curve, LocalMeasure default_measure, std::map<std::string, LocalMeasure> exceptions = {});

  const AdelicCurve& curve() const { return curve_; }
  const LocalMeasure& at(const std::string& place_id) const;
  const LocalMeasure& default_measure() const { return default_; }
  const std::map<std::string, LocalMeasure>& exceptions() const { return exceptions_; }

 private:
  AdelicCurve curve_;
  LocalMeasure default_;
  std::map<std::string, LocalMeasure> exceptions_;
};

struct MeasureOptions {
  int circle_resolution = 512;   // quantile atoms for smooth radial measures
  long budget = 100000;          // Julia sampler points
  std::uint64_t seed = 1;
};

/// Monge-Ampere measure of a local metric of level n (total mass n).
LocalMeasure monge_ampere_local(const LocalMetric& phi, const Place& w, const MeasureOptions& opt = {});
MeasureFamily monge_ampere(const MetricFamily& phi, const MeasureOptions& opt = {});

/// Places accepted by a global integral; empty predicate means all.
using PlacePredicate = std::function<bool(const Place&)>;
PlacePredicate places_in(const std::vector<std::string>& ids);

/// Sum over the support of f inside Omega' of nu(w) * int f_w d eta_w. The
/// standard error combines the Monte-Carlo parts.
MonteCarlo integrate_global(const MeasureFamily& eta, const TestFunctionFamily& f, const PlacePredicate& omega = {});

struct LogSectionResult {
  std::vector<double> ts;          // truncation levels
  std::vector<double> values;      // truncated integrals, nondecreasing in t
  std::optional<double> limit;     // set when the trace stabilizes
  bool divergent = false;
  double lower_bound = 0;          // sum nu * mass * (-ln ||s||_sup)
};

/// Truncated integrals of min(-ln|s|_psi, t A(w)) for a polynomial section s
/// of O(level) over the places listed by eta (exceptions plus every place of
/// a finite curve). Unlisted entries of A default to 1.
LogSectionResult integrate_log_section(const MeasureFamily& eta, const QPoly& s, const MetricFamily& psi,
                                       const std::map<std::string, double>& A, double t_max, int steps = 16);

struct RadonNikodymReport {
  double integral = 0;                      // sum nu int |p - 1| d eta
  bool pass = true;
  std::vector<std::string> failing_places;  // nu > 0 and local integral > tol
};

/// Density p given as a family equal to 1 at every unlisted place.
RadonNikodymReport radon_nikodym_check(const TestFunctionFamily& p, const MeasureFamily& eta,
                                       const PlacePredicate& omega = {}, double tol = 1e-12);

}  // namespace adelic
