#include <doctest.h>

#include <cmath>
#include <random>

#include "adelic/dynamics.hpp"
#include "adelic/envelope.hpp"
#include "adelic/metric.hpp"

using namespace adelic;

namespace {

Roof tent() { return Roof({0, Rational(1, 2), 1}, {0, 0.5, 0}); }

Roof random_roof(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Rational> x{0, Rational(1, 4), Rational(1, 2), Rational(3, 4), 1};
  // Concave: decreasing slopes.
  std::vector<double> s{u(rng) + 3, u(rng) + 1, u(rng) - 1, u(rng) - 3};
  std::vector<double> y{u(rng)};
  for (double si : s) y.push_back(y.back() + si / 4);
  return Roof(x, y);
}

}  // namespace

TEST_CASE("roof functions") {
  CHECK(tent().integral() == doctest::Approx(0.25));
  CHECK(tent().max() == doctest::Approx(0.5));
  CHECK(tent()(Rational(1, 4)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(Roof({0, Rational(1, 2), 1}, {0, -0.5, 0}), Error);
  CHECK_THROWS_AS(Roof({Rational(1, 4), 1}, {0, 0}), Error);
  // Legendre round trip.
  ToricPotential u = ToricPotential::from_roof(tent());
  CHECK(u.legendre().sup_distance(tent()) <= 1e-15);
  CHECK(u(0.0) == doctest::Approx(0.5));
  auto jumps = u.slope_jumps();
  double total = 0;
  for (auto [t, m] : jumps) total += m;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("metric distances") {
  LocalMetric phi = LocalMetric::toric(1, tent());
  CHECK(metric_distance(phi, phi) == 0.0);
  CHECK(metric_distance(phi, LocalMetric::toric(1, tent().shifted(0.3))) == doctest::Approx(0.3));
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  CHECK(metric_distance(can.at("inf"), LocalMetric()) <= 1e-15);
  CHECK_THROWS_AS(metric_distance(phi, LocalMetric::toric(2, tent())), Error);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    LocalMetric a = LocalMetric::toric(1, random_roof(rng)), b = LocalMetric::toric(1, random_roof(rng)),
                c = LocalMetric::toric(1, random_roof(rng));
    CHECK(std::fabs(metric_distance(a, b) - metric_distance(b, a)) <= 1e-12);
    CHECK(metric_distance(a, c) <= metric_distance(a, b) + metric_distance(b, c) + 1e-12);
  }
}

TEST_CASE("Fubini-Study quotient metrics") {
  LocalMetric fs = LocalMetric::fs_hermitian({{1, 0}, {0, 1}});
  for (CPoint z : {CPoint(0.5, 0.1), CPoint(-2, 3), CPoint(0, 0)})
    CHECK(fs.potential(z) == doctest::Approx(0.5 * std::log(1 + std::norm(z))).epsilon(1e-13));
  CHECK(fs.potential_at_infinity() == doctest::Approx(0.0).epsilon(1e-15));

  // Scaling the norm by e^c scales the metric by e^{-c}.
  const double c = 0.7;
  LocalMetric scaled = LocalMetric::fs_hermitian({{std::exp(2 * c), 0}, {0, std::exp(2 * c)}});
  CHECK(scaled.potential(CPoint(1.5, -0.5)) == doctest::Approx(fs.potential(CPoint(1.5, -0.5)) - c));

  // phi <= phi_FS for the quotient of the sup norm, and equality on a quotient metric.
  LocalMetric bumpy = LocalMetric::toric(1, tent());
  for (double t : {-1.0, 0.0, 0.7})
    CHECK(fs_potential_of_sup(bumpy, t) <= bumpy.radial_potential(t) + 1e-12);
  for (double t : {-0.8, 0.3}) CHECK(fs_potential_of_sup(fs, t) == doctest::Approx(fs.radial_potential(t)).epsilon(1e-3));
  // (phi + phi')_FS dominates phi_FS + phi'_FS in potentials.
  CHECK(fs_potential_of_sum(fs, fs, 0.2) >= 2 * fs_potential_of_sup(fs, 0.2) - 1e-12);

  CHECK_THROWS_WITH(LocalMetric::fs_hermitian({{1, 2}, {2, 1}}), "norm not definite");
}

TEST_CASE("envelope of a nonnegative function") {
  LocalMetric fs = LocalMetric::fs_hermitian({{1, 0}, {0, 1}});
  std::vector<double> ts{-1.0, 0.0, 0.5};
  auto c = fs_envelope(fs, LocalTestFunction::constant(0.3), ts, 3);
  for (const auto& p : c)
    for (double v : p.fn) CHECK(v == doctest::Approx(0.3).epsilon(1e-6));
  auto z = fs_envelope(fs, LocalTestFunction::constant(0), ts, 2);
  for (const auto& p : z)
    for (double v : p.fn) CHECK(std::fabs(v) <= 1e-9);
  CHECK_THROWS_WITH(fs_envelope(fs, LocalTestFunction::constant(-1), ts, 2), "envelope requires f ≥ 0");

  auto bump = LocalTestFunction::callable([](CPoint x) { double t = std::log(std::abs(x)); return 0.5 * std::exp(-t * t); }, 0, 0.5);
  auto pts = fs_envelope(fs, bump, {-0.5, 0.0, 0.25}, 8);
  for (const auto& p : pts) {
    for (std::size_t n = 0; n + 1 < p.fn.size(); ++n) CHECK(p.fn[n] <= p.fn[n + 1] + 1e-12);
    CHECK(p.fn.back() <= p.f + 1e-12);
    CHECK(p.fn.back() > p.fn.front());
  }
}

TEST_CASE("twists") {
  AdelicCurve Q = AdelicCurve::rationals();
  MetricFamily phi = toric_family(Q, 1, {{"inf", tent()}});
  TestFunctionFamily c;
  c.local["inf"] = LocalTestFunction::constant(2.0);
  MetricFamily same = twist(phi, c, 0.0);
  CHECK(same.at("inf").roof().sup_distance(tent()) == 0.0);
  MetricFamily shifted = twist(phi, c, 0.25);
  CHECK(shifted.at("inf").roof().sup_distance(tent().shifted(0.5)) <= 1e-15);

  TestFunctionFamily h;
  h.local["inf"] = LocalTestFunction::toric(Profile({-1, 0, 1}, {0, 1, 0}));
  h.local["3"] = LocalTestFunction::toric(Profile({-1, 1}, {0.5, -0.5}));
  MetricFamily a = twist(twist(phi, h, 0.1), h, 0.2), b = twist(phi, h, 0.3);
  for (const char* id : {"inf", "3"})
    CHECK(metric_distance(a.at(id), b.at(id)) <= 1e-15);
}

TEST_CASE("mixed second partial by finite differences") {
  auto sq = [](CPoint z) { return std::norm(z); };
  auto re = [](CPoint z) { return z.real(); };
  auto quart = [](CPoint z) { return std::norm(z) * std::norm(z); };
  CPoint x(0.3, -0.2);
  auto d1 = mixed_second_partial_fd(sq, x, 1e-2), d2 = mixed_second_partial_fd(sq, x, 1e-3);
  CHECK(std::abs(richardson(d1, 1e-2, d2, 1e-3) - 1.0) <= 1e-6);
  CHECK(std::abs(mixed_second_partial_fd(re, x, 1e-3)) <= 1e-9);
  auto q1 = mixed_second_partial_fd(quart, 1.0, 1e-2), q2 = mixed_second_partial_fd(quart, 1.0, 1e-3);
  CHECK(std::abs(q2 - 4.0) <= 1e-2);
  CHECK(std::abs(richardson(q1, 1e-2, q2, 1e-3) - 4.0) <= 1e-4);
}
