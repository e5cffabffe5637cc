#include <doctest.h>

#include <cmath>

#include "adelic/dynamics.hpp"
#include "adelic/factor.hpp"

using namespace adelic;

namespace {

const double ln2 = std::log(2.0);

}  // namespace

TEST_CASE("endomorphisms") {
  Endomorphism f = Endomorphism::parse("z^2+1");
  CHECK(f.degree() == 2);
  CHECK(f(Rational(2)) == Rational(5));
  CHECK_FALSE(f(std::nullopt).has_value());
  CHECK(Endomorphism::parse("z^2").monomial());
  CHECK_FALSE(f.monomial());
  CHECK_THROWS_WITH(Endomorphism::parse("3z+1"), "degree must exceed 1");
  CHECK_THROWS_WITH(Endomorphism(QPoly::parse("z^2-1"), QPoly::parse("z-1")), "numerator and denominator must be coprime");
  CHECK_THROWS_WITH(Endomorphism::parse("z^2", 0), "alpha must be nonzero");
  CHECK(good_reduction(f, Integer(3)));
  CHECK_FALSE(good_reduction(Endomorphism::parse("z^2/2"), Integer(2)));
}

TEST_CASE("canonical heights over Q") {
  Endomorphism sq = Endomorphism::parse("z^2");
  auto h2 = canonical_height(sq, ClosedPoint::rational(2));
  CHECK(h2.value == doctest::Approx(ln2).epsilon(1e-12));
  REQUIRE(h2.local.has_value());
  CHECK(std::fabs(*h2.local - h2.value) <= 1e-6);

  auto h0 = canonical_height(Endomorphism::parse("z^2-1"), ClosedPoint::rational(0));
  CHECK(h0.preperiodic);
  CHECK(h0.value == 0.0);

  for (int m : {1, 2, 3, 5, 12, 64}) {
    ClosedPoint zeta = ClosedPoint::from_polynomial(QPoly::from_integer(cyclotomic(m)));
    CHECK(std::fabs(canonical_height(sq, zeta).value) <= 1e-9);
  }
  CHECK(canonical_height(sq, ClosedPoint::parse("z^2-2")).value == doctest::Approx(ln2 / 2));

  // The telescoping trace converges at the rate C d^{-(n+1)}.
  auto h = canonical_height(Endomorphism::parse("z^2+1"), ClosedPoint::rational(1), {.depth = 10});
  for (std::size_t n = 0; n + 1 < h.trace.size(); ++n)
    CHECK(std::fabs(h.trace[n + 1] - h.trace[n]) <= h.constant * std::pow(2.0, -double(n + 1)) + 1e-15);
  CHECK(h.value == doctest::Approx(0.407354522739).epsilon(1e-9));

  CHECK_THROWS_WITH(canonical_height(Endomorphism::parse("z^2+1/3"), ClosedPoint::rational(Rational(1, 7)),
                                     {.depth = 40, .bit_budget = 4096}),
                    "increase budget or lower depth");
  CHECK_THROWS_AS(ClosedPoint::parse("z^2-1"), Error);
}

TEST_CASE("Tate iteration bounds") {
  Endomorphism f = Endomorphism::parse("z^2+1");
  auto T = tate_local_potential(f, "inf", 12, VerificationGrid{32, 32, 3.0});
  REQUIRE(T.increments.size() == 12);
  for (std::size_t n = 0; n < T.increments.size(); ++n)
    CHECK(T.increments[n] <= T.lambda_sup * std::pow(2.0, -double(n + 1)) + 1e-15);
  CHECK(T.error_bound() == doctest::Approx(T.lambda_sup * std::pow(2.0, -12)));
  CHECK(depth_for_tolerance(1.0, 2, 1e-3) == 10);
  CHECK(depth_for_tolerance(0.0, 2, 1e-3) == 0);

  // At a good-reduction prime the canonical metric is the naive one.
  auto P = tate_local_potential(f, "3", 6);
  for (double c : P.correction) CHECK(c == 0.0);
  CHECK(lambda_sup_padic(Endomorphism::parse("z^2/2"), Integer(2)) == doctest::Approx(ln2));
  CHECK(functional_equation_residual(f, 30, VerificationGrid{16, 16, 2.0}) <= 1e-9);
}

TEST_CASE("rescaling by alpha and compatibility of commuting maps") {
  for (const char* c : {"2", "1/3"}) {
    Rational a = parse_rational(c);
    for (const char* map : {"z^2", "z^3", "z^2+1"}) {
      Endomorphism f = Endomorphism::parse(map), fa = f.with_alpha(a);
      double expected = std::log(std::fabs(a.get_d())) / (f.degree() - 1);
      DynamicalPotential p1(f, AdelicCurve::rationals().place("inf"), 40), pa(fa, AdelicCurve::rationals().place("inf"), 40);
      for (CPoint z : {CPoint(0.3, 0.4), CPoint(-2.5, 1)}) CHECK(pa.potential(z) - p1.potential(z) == doctest::Approx(expected));
    }
  }
  Endomorphism f = Endomorphism::parse("z^2"), g = Endomorphism::parse("z^3", 2);
  Rational r = commuting_compatibility_factor(f, g);
  CHECK(r == 2);
  // The canonical metrics differ by |r|^{-1/((d-1)(e-1))}.
  DynamicalPotential pf(f, AdelicCurve::rationals().place("inf"), 30), pg(g, AdelicCurve::rationals().place("inf"), 30);
  CHECK(std::exp(-(pg.potential(CPoint(0.7, 0.2)) - pf.potential(CPoint(0.7, 0.2)))) ==
        doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-10));
  CHECK_THROWS_WITH(commuting_compatibility_factor(Endomorphism::parse("z^2+1"), Endomorphism::parse("z^3")),
                    "not a commuting pair");
}

TEST_CASE("dynamic constant check") {
  Endomorphism f = Endomorphism::parse("z^2");
  auto ok = dynamic_constant_check(f, [](CPoint) { return -1.0; }, 2, 1);
  CHECK(ok.equation_holds);
  CHECK(ok.constant_holds);
  CHECK(ok.constant == -1.0);
  auto bad = dynamic_constant_check(f, [](CPoint z) { return std::log(1 + std::abs(z)); }, 2, 0);
  CHECK_FALSE(bad.equation_holds);
  CHECK_THROWS_AS(dynamic_constant_check(f, [](CPoint) { return 0.0; }, 1, 0), Error);
}

TEST_CASE("canonical metric families") {
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  CHECK(can.at("inf").roof().sup_distance(Roof({0, 1}, {0, 0})) == 0.0);
  auto depths = canonical_depths(Endomorphism::parse("z^2+1"), 1e-10);
  CHECK(depths.at("inf") > 0);
  CHECK(naive_height(ClosedPoint::rational(Rational(-3, 2))) == doctest::Approx(std::log(3.0)));
  CHECK(naive_height(ClosedPoint::at_infinity()) == 0.0);
}
