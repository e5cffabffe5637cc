#pragma once

// Piecewise-linear toric data on P^1: concave roofs on the normalized
// Okounkov interval [0,1], PL potentials u(t) in t = log|z| and bounded PL
// test profiles. The Legendre transform links potentials and roofs:
//   u(t) = max_x (x t + theta(x)),   theta(x) = inf_t (u(t) - x t).

#include <utility>
#include <vector>

#include "adelic/rational.hpp"

namespace adelic {

/// Nearest rational with a small denominator when within 1e-12, else the
/// exact binary value of x.
Rational snap_rational(double x);

class Roof {
 public:
  Roof() = default;
  /// Breakpoints must start at 0, end at 1 and increase strictly; values
  /// must be concave (slopes nonincreasing, tolerance 1e-9 relative).
  Roof(std::vector<Rational> x, std::vector<double> y);
  static Roof constant(double c);
  /// theta(x) = slope * x + c.
  static Roof affine(double c, double slope);

  const std::vector<Rational>& breakpoints() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  std::vector<double> slopes() const;

  double operator()(const Rational& x) const;
  double operator()(double x) const;
  /// Exact integral over [0,1] of the piecewise-linear interpolant.
  double integral() const;
  double max() const;
  double min() const;

  Roof shifted(double c) const;
  Roof scaled(double s) const;  // s >= 0 keeps concavity
  /// Pointwise sum (concave); breakpoints merged.
  Roof operator+(const Roof& o) const;
  /// Max of |this - o| over merged breakpoints (exact sup of the difference).
  double sup_distance(const Roof& o) const;
  /// Removes breakpoints where the slope does not change.
  Roof simplified() const;

 private:
  std::vector<Rational> x_;
  std::vector<double> y_;
};

/// Bounded piecewise-linear profile h(t) with constant tails.
class Profile {
 public:
  Profile() : t_{0.0}, h_{0.0} {}
  Profile(std::vector<double> t, std::vector<double> h);
  static Profile constant(double c);

  double operator()(double t) const;
  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& values() const { return h_; }
  double lipschitz() const;
  double left_value() const { return h_.front(); }
  double right_value() const { return h_.back(); }
  double sup_abs() const;
  bool is_constant() const;

 private:
  std::vector<double> t_, h_;
};

/// Normalized toric potential u: continuous PL with slope 0 to the left of
/// the first kink and slope 1 to the right of the last. Not necessarily
/// convex (twists by test profiles can break convexity).
class ToricPotential {
 public:
  ToricPotential() : t_{0.0}, g_{0.0} {}
  ToricPotential(std::vector<double> t, std::vector<double> g);
  static ToricPotential from_roof(const Roof& roof);
  /// max(0, t) + c
  static ToricPotential naive(double c = 0);

  double operator()(double t) const;
  /// lim_{t -> +inf} u(t) - t
  double right_offset() const { return g_.back() - t_.back(); }
  double left_value() const { return g_.front(); }
  const std::vector<double>& kinks() const { return t_; }
  const std::vector<double>& values() const { return g_; }

  bool convex(double tol = 1e-12) const;
  /// Legendre transform; equals the roof of the convex envelope.
  Roof legendre() const;
  /// Kinks with positive slope jump: (t_j, jump_j), jumps sum to 1. Requires
  /// convexity.
  std::vector<std::pair<double, double>> slope_jumps() const;

  /// u + s * h
  ToricPotential plus(const Profile& h, double s) const;
  ToricPotential shifted(double c) const;
  /// a*u + b*v with a + b = 1, a, b >= 0 (normalized potential of a convex
  /// combination or of a tensor product).
  static ToricPotential combine(const ToricPotential& u, double a, const ToricPotential& v, double b);
  /// Exact sup over t of |u - v| (PL difference with constant tails).
  double sup_distance(const ToricPotential& o) const;
  /// inf over t of (u(t) - max(0, t)).
  double min_excess_over_naive() const;

 private:
  std::vector<double> t_, g_;
};

}  // namespace adelic
