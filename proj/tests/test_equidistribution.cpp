#include <doctest.h>

#include <cmath>

#include "adelic/equidistribution.hpp"
#include "adelic/factor.hpp"

using namespace adelic;

namespace {

const AdelicCurve Q = AdelicCurve::rationals();
const double ln2 = std::log(2.0);

Profile wedge() { return Profile({-1, 0, 2}, {0.5, 1.0, 0.0}); }

}  // namespace

TEST_CASE("small sequences from preimages") {
  Endomorphism sq = Endomorphism::parse("z^2");
  auto two = small_sequence_generate(sq, Rational(2), 5);
  REQUIRE(two.points.size() == 5);
  for (int n = 1; n <= 5; ++n) {
    CHECK(two.points[n - 1].minimal.degree() == (1 << n));
    CHECK(two.heights[n - 1] == doctest::Approx(ln2 / (1 << n)));
  }
  CHECK(two.points[2].minimal == QPoly::parse("z^8-2"));
  CHECK(two.generic);

  auto one = small_sequence_generate(sq, Rational(1), 4);
  CHECK(one.points[0].minimal.degree() == 1);
  for (int n = 1; n <= 4; ++n) {
    if (n > 1) CHECK(one.points[n - 1].minimal == QPoly::from_integer(cyclotomic(1 << n)));
    CHECK(one.heights[n - 1] == 0.0);
  }
  auto four = small_sequence_generate(sq, Rational(4), 1);
  CHECK(four.points[0].minimal == QPoly::parse("z-2"));
  CHECK_THROWS_WITH(small_sequence_generate(sq, Rational(0), 2), "choose a non-exceptional target");
  CHECK(preimage_polynomial(Endomorphism::parse("z^2+1"), Rational(2), 1) == QPoly::parse("z^2-1"));
}

TEST_CASE("Galois orbits at a place") {
  auto o = galois_orbit_local_points(ClosedPoint::parse("z^4+1"), Q.place("inf"));
  REQUIRE(o.point_atoms().size() == 4);
  for (const auto& a : o.point_atoms()) {
    CHECK(std::abs(a.z) == doctest::Approx(1.0));
    CHECK(a.mass == doctest::Approx(0.25));
  }
  CHECK(o.total_mass() == doctest::Approx(1.0));

  auto p2 = galois_orbit_local_points(ClosedPoint::parse("z^2-2"), Q.place("2"));
  REQUIRE(p2.segment_atoms().size() == 1);
  CHECK(p2.segment_atoms()[0].t == doctest::Approx(-ln2 / 2));
  CHECK(p2.segment_atoms()[0].mass == doctest::Approx(1.0));
  auto p3 = galois_orbit_local_points(ClosedPoint::parse("z^2-2"), Q.place("3"));
  CHECK(p3.segment_atoms()[0].t == 0.0);
  CHECK(p3.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("delta and limit functionals") {
  TestFunctionFamily c;
  c.local["inf"] = LocalTestFunction::constant(0.7);
  CHECK(delta_functional(ClosedPoint::parse("z^2-2"), Q, c) == doctest::Approx(0.7));

  TestFunctionFamily h;
  h.local["inf"] = LocalTestFunction::toric(wedge());
  CHECK(delta_functional(ClosedPoint::parse("z^4+1"), Q, h) == doctest::Approx(1.0));

  TestFunctionFamily h2;
  h2.local["2"] = LocalTestFunction::toric(wedge());
  for (int n : {1, 3}) {
    ClosedPoint Y = ClosedPoint::from_polynomial(preimage_polynomial(Endomorphism::parse("z^2"), Rational(2), n));
    CHECK(delta_functional(Y, Q, h2) == doctest::Approx(wedge()(-ln2 / (1 << n))));
  }

  // Restriction to complementary place sets adds up.
  TestFunctionFamily both;
  both.local["inf"] = LocalTestFunction::toric(wedge());
  both.local["2"] = LocalTestFunction::toric(wedge());
  ClosedPoint Y = ClosedPoint::parse("z^4-2");
  double all = delta_functional(Y, Q, both);
  CHECK(delta_functional(Y, Q, both, places_in({"inf"})) + delta_functional(Y, Q, both, places_in({"2"})) == all);

  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  CHECK(limit_functional(can, h).mean == doctest::Approx(1.0));
  CHECK(limit_functional(can, h2).mean == doctest::Approx(1.0));
  CHECK(limit_functional(can, TestFunctionFamily{}).mean == 0.0);
}

TEST_CASE("normalized heights") {
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  CHECK(normalized_height(ClosedPoint::parse("z-2"), can) == doctest::Approx(ln2));
  CHECK(normalized_height(ClosedPoint::parse("z^2-2"), can) == doctest::Approx(ln2 / 2));
  CHECK(normalized_height(ClosedPoint::parse("z^4+1"), can) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::fabs(normalized_height_space(can).value) <= 1e-12);
}

TEST_CASE("essential minima") {
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  auto e = essential_minimum_estimate(can, {.nonnegative = true});
  CHECK(e.lower == 0.0);
  CHECK(std::fabs(e.upper) <= 1e-12);

  MetricFamily shifted = toric_family(Q, 1, {{"inf", Roof({0, 1}, {0.3, 0.3})}});
  auto s = essential_minimum_estimate(shifted);
  CHECK(s.lower == doctest::Approx(0.3));
  CHECK(s.upper == doctest::Approx(0.3));

  MetricFamily F(AdelicCurve::function_field(3), LocalMetric());
  auto f = essential_minimum_estimate(F);
  CHECK(f.lower == 0.0);
  CHECK(f.upper == 0.0);
}

TEST_CASE("convergence reports") {
  auto seq = small_sequence_generate(Endomorphism::parse("z^2"), Rational(2), 8);
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  TestFunctionFamily c;
  c.local["inf"] = LocalTestFunction::constant(1.0);
  auto bank = lipschitz_test_bank();
  bank.push_back({"const", c});
  auto rep = convergence_report(seq, can, bank);
  REQUIRE(rep.gaps.size() == bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    CHECK(rep.nonincreasing[i]);
    if (i + 1 < bank.size()) CHECK(rep.gaps[i].back() < rep.gaps[i][2]);
  }
  for (double g : rep.gaps.back()) CHECK(g == 0.0);

  // Re z integrates to zero over primitive 2^n-th roots of unity.
  auto roots = small_sequence_generate(Endomorphism::parse("z^2"), Rational(1), 5);
  TestFunctionFamily re;
  re.local["inf"] = LocalTestFunction::callable([](CPoint z) { return z.real(); }, 0, 1);
  auto rr = convergence_report(roots, can, {{"re", re}});
  for (std::size_t n = 1; n < rr.gaps[0].size(); ++n) CHECK(std::fabs(rr.gaps[0][n]) <= 1e-12);
}
