#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "adelic/measure.hpp"

using namespace adelic;

namespace {

const AdelicCurve Q = AdelicCurve::rationals();

Roof tent() { return Roof({0, Rational(1, 2), 1}, {0, 0.5, 0}); }

LocalMeasure unit_circle() { return LocalMeasure::circles({{1.0, 1.0}}); }

}  // namespace

TEST_CASE("Monge-Ampere measures") {
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^3"), 1e-12);
  LocalMeasure inf = monge_ampere_local(can.at("inf"), Q.place("inf"));
  REQUIRE(inf.kind() == LocalMeasure::Kind::Circles);
  REQUIRE(inf.circle_atoms().size() == 1);
  CHECK(inf.circle_atoms()[0].radius == doctest::Approx(1.0));
  CHECK(inf.circle_atoms()[0].mass == doctest::Approx(1.0));

  LocalMeasure p = monge_ampere_local(can.at("5"), Q.place("5"));
  REQUIRE(p.segment_atoms().size() == 1);
  CHECK(p.segment_atoms()[0].t == 0.0);
  CHECK(p.segment_atoms()[0].mass == 1.0);

  LocalMeasure two = monge_ampere_local(LocalMetric::toric(2, tent()), Q.place("inf"));
  REQUIRE(two.circle_atoms().size() == 2);
  std::vector<double> radii{two.circle_atoms()[0].radius, two.circle_atoms()[1].radius};
  std::sort(radii.begin(), radii.end());
  CHECK(radii[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(radii[1] == doctest::Approx(std::exp(1.0)));
  for (const auto& a : two.circle_atoms()) CHECK(a.mass == doctest::Approx(1.0));
  CHECK(two.total_mass() == doctest::Approx(2.0));

  // Smooth Fubini-Study metric: radial quantile atoms of total mass 1.
  LocalMeasure fs = monge_ampere_local(LocalMetric::fs_hermitian({{1, 0}, {0, 1}}), Q.place("inf"));
  CHECK(fs.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

  // Sampler mass: the equilibrium measure of z^2 + 1 at infinity.
  MetricFamily c1 = canonical_metric_family(Endomorphism::parse("z^2+1"), 1e-10);
  LocalMeasure j = monge_ampere_local(c1.at("inf"), Q.place("inf"), {.budget = 2000});
  CHECK(j.kind() == LocalMeasure::Kind::Sampler);
  CHECK(j.total_mass() == 1.0);
  auto m = j.integrate(LocalTestFunction::constant(1.0));
  CHECK(m.mean == doctest::Approx(1.0));
  CHECK(m.budget == 2000);
  CHECK_THROWS_AS(monge_ampere_local(c1.at("inf"), Q.place("inf"), {.budget = 0}), Error);
}

TEST_CASE("samplers are deterministic") {
  auto a = std::make_shared<JuliaSampler>(Endomorphism::parse("z^2-1"), 7, 500, 100);
  auto b = std::make_shared<JuliaSampler>(Endomorphism::parse("z^2-1"), 7, 500, 100);
  CHECK(a->samples() == b->samples());
  SplitMix64 r(1);
  for (int i = 0; i < 100; ++i) {
    double u = r.uniform();
    CHECK(u >= 0);
    CHECK(u < 1);
  }
}

TEST_CASE("global integrals") {
  MeasureFamily gauss;
  CHECK(integrate_global(gauss, TestFunctionFamily{}).mean == 0.0);
  TestFunctionFamily one_inf;
  one_inf.local["inf"] = LocalTestFunction::constant(1.0);
  MeasureFamily eta(Q, LocalMeasure(), {{"inf", unit_circle()}});
  CHECK(integrate_global(eta, one_inf).mean == 1.0);

  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  TestFunctionFamily h;
  h.local["inf"] = LocalTestFunction::toric(Profile({-1, 1}, {0.0, 1.0}));
  h.local["3"] = LocalTestFunction::toric(Profile({-2, 2}, {1.0, 3.0}));
  CHECK(integrate_global(monge_ampere(can), h).mean == doctest::Approx(0.5 + 2.0));

  // Fubini over a split of the places and extension by zero.
  auto all = integrate_global(monge_ampere(can), h).mean;
  auto left = integrate_global(monge_ampere(can), h, places_in({"inf"})).mean;
  auto right = integrate_global(monge_ampere(can), h, places_in({"3"})).mean;
  CHECK(left + right == all);
  CHECK(integrate_global(monge_ampere(can), h.restricted({"inf"})).mean == left);

  AdelicCurve C = AdelicCurve::weighted_copies({0.5, 2.0});
  MeasureFamily ec(C, unit_circle());
  TestFunctionFamily f;
  f.local["c0"] = LocalTestFunction::constant(3.0);
  f.local["c1"] = LocalTestFunction::constant(1.0);
  CHECK(integrate_global(ec, f).mean == doctest::Approx(3.5));
}

TEST_CASE("integrals of log sections") {
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  MeasureFamily circle(Q, LocalMeasure(), {{"inf", unit_circle()}});
  auto r = integrate_log_section(circle, QPoly::parse("z"), can, {}, 5.0, 6);
  for (double v : r.values) CHECK(std::fabs(v) <= 1e-12);
  REQUIRE(r.limit.has_value());
  CHECK(std::fabs(*r.limit) <= 1e-12);
  CHECK_FALSE(r.divergent);

  MeasureFamily gauss(Q, LocalMeasure(), {{"2", LocalMeasure()}});
  auto g = integrate_log_section(gauss, QPoly::parse("z"), can, {}, 5.0, 6);
  for (double v : g.values) CHECK(v == 0.0);

  MeasureFamily at_zero(Q, LocalMeasure(), {{"inf", LocalMeasure::points({{CPoint(0, 0), 1.0}})}});
  auto d = integrate_log_section(at_zero, QPoly::parse("z"), can, {{"inf", 2.0}}, 4.0, 4);
  CHECK(d.divergent);
  for (std::size_t i = 0; i < d.ts.size(); ++i) CHECK(d.values[i] == doctest::Approx(2.0 * d.ts[i]));
  for (std::size_t i = 0; i + 1 < d.values.size(); ++i) CHECK(d.values[i] <= d.values[i + 1]);
  CHECK_THROWS_AS(integrate_log_section(circle, QPoly(), can, {}, 1.0), Error);
}

TEST_CASE("Radon-Nikodym check") {
  MeasureFamily eta(Q, LocalMeasure(), {{"inf", unit_circle()}});
  TestFunctionFamily one;
  one.local["inf"] = LocalTestFunction::constant(1.0);
  one.local["2"] = LocalTestFunction::constant(1.0);
  CHECK(radon_nikodym_check(one, eta).pass);

  TestFunctionFamily bump;
  bump.local["inf"] = LocalTestFunction::toric(Profile({-0.5, 0, 0.5}, {1, 1.5, 1}));
  auto r = radon_nikodym_check(bump, eta);
  CHECK_FALSE(r.pass);
  CHECK(r.integral == doctest::Approx(0.5));
  REQUIRE(r.failing_places.size() == 1);
  CHECK(r.failing_places[0] == "inf");

  AdelicCurve C = AdelicCurve::weighted_copies({1.0, 0.0});
  TestFunctionFamily null;
  null.local["c1"] = LocalTestFunction::constant(3.0);
  CHECK(radon_nikodym_check(null, MeasureFamily(C, unit_circle())).pass);
}
