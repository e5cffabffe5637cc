#pragma once

// Adelic curves over Q and F_q(T) with atomic place measures, plus a
// "weighted copies" curve whose places are labeled copies of the real
// absolute value of Q with arbitrary nonnegative masses.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adelic/finite_field.hpp"
#include "adelic/rational.hpp"

namespace adelic {

/// Element of F_q(T) as num/den with den monic and gcd(num, den) = 1.
struct FqRational {
  FqPoly num, den;
  bool operator==(const FqRational& o) const { return num == o.num && den == o.den; }
};

using FieldElement = std::variant<Rational, FqRational>;

enum class BaseKind { Q, FqT, Copies };

enum class PlaceKind {
  Archimedean,  // |.|_inf of Q (also every weighted copy)
  Prime,        // p-adic place of Q
  Irreducible,  // finite place of F_q(T), uniformizer a monic irreducible
  Degree,       // the place at infinity of F_q(T), |a| = q^{deg a}
};

struct Place {
  std::string id;
  PlaceKind kind = PlaceKind::Archimedean;
  double weight = 1.0;
  Integer prime;       // Prime places
  FqPoly irreducible;  // Irreducible places
  double log_base = 0; // nonarchimedean: ln|uniformizer|^{-1}

  bool archimedean() const { return kind == PlaceKind::Archimedean; }
  bool operator==(const Place& o) const { return id == o.id; }
  bool operator<(const Place& o) const;
};

/// A real function on places given on a finite support plus a default value
/// on every other place.
struct PlaceFunction {
  std::map<std::string, double> values;
  double default_value = 0;
};

class AdelicCurve {
 public:
  static AdelicCurve rationals();
  static AdelicCurve function_field(std::uint32_t q);
  static AdelicCurve weighted_copies(std::vector<double> weights);

  BaseKind base() const { return base_; }
  bool proper() const { return base_ != BaseKind::Copies; }
  std::uint32_t q() const { return q_; }
  const FiniteField& field() const;
  const std::vector<double>& copy_weights() const { return weights_; }

  /// "12", "-5/6" for Q-based curves; "(T^2+1)/(T+2)" for F_q(T). For q a
  /// proper prime power, polynomial coefficients are element indices 0..q-1.
  FieldElement parse(const std::string& text) const;
  std::string format(const FieldElement& a) const;
  bool is_zero(const FieldElement& a) const;

  /// Place by id: "inf", a prime "7", a monic irreducible "T^2+1", or a
  /// copy label "c0". Throws "place not on this curve".
  Place place(const std::string& id) const;

  /// Places that are always present (archimedean / degree place / copies).
  std::vector<Place> infinite_places() const;
  /// Finite list of every place when the curve has finitely many.
  std::optional<std::vector<Place>> all_places() const;
  /// Total nu-mass; +inf for Q and F_q(T).
  double total_mass() const;

  /// Nonarchimedean valuation of a != 0 (|a| = exp(-v * log_base)).
  long valuation(const FieldElement& a, const Place& w) const;
  double absolute_value(const FieldElement& a, const Place& w) const;
  /// Exact rational value at nonarchimedean places (p^{-v} or q^{-v}).
  Rational absolute_value_exact(const FieldElement& a, const Place& w) const;
  double log_absolute_value(const FieldElement& a, const Place& w) const;

  /// Places where |a| != 1, sorted. Throws "zero has no support" for a = 0.
  std::vector<Place> place_support(const FieldElement& a) const;
  /// Sum over places of weight * ln|a|; 0 up to rounding on proper curves.
  double product_formula_defect(const FieldElement& a) const;

  /// Sum over the support of weight * g plus tail mass times the default.
  /// Throws "divergent integral" for an infinite tail with nonzero default.
  double integrate(const PlaceFunction& g) const;

  bool operator==(const AdelicCurve& o) const;

 private:
  BaseKind base_ = BaseKind::Q;
  std::uint32_t q_ = 0;
  std::vector<double> weights_;
  std::shared_ptr<const FiniteField> field_;
};

/// Element of F_q(T) from polynomials (normalizes; den must be nonzero).
FqRational make_fq_rational(const FiniteField& F, FqPoly num, FqPoly den);

}  // namespace adelic
