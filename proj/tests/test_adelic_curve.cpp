#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "adelic/curve.hpp"

using namespace adelic;

namespace {

std::set<std::string> ids(const std::vector<Place>& ws) {
  std::set<std::string> s;
  for (const auto& w : ws) s.insert(w.id);
  return s;
}

}  // namespace

TEST_CASE("absolute values over Q") {
  AdelicCurve Q = AdelicCurve::rationals();
  CHECK(Q.absolute_value_exact(Rational(12), Q.place("3")) == Rational(1, 3));
  CHECK(Q.absolute_value(Rational(-5, 6), Q.place("inf")) == doctest::Approx(5.0 / 6));
  CHECK(Q.absolute_value(Rational(1), Q.place("7")) == 1.0);
  CHECK(Q.absolute_value(Rational(0), Q.place("7")) == 0.0);
  CHECK_THROWS_WITH(Q.place("4"), "place not on this curve");
  CHECK_THROWS_WITH(Q.place("c0"), "place not on this curve");
}

TEST_CASE("place supports") {
  AdelicCurve Q = AdelicCurve::rationals();
  CHECK(ids(Q.place_support(Rational(6))) == std::set<std::string>{"2", "3", "inf"});
  CHECK(Q.place_support(Rational(1)).empty());
  CHECK(ids(Q.place_support(Rational(100, 7))) == std::set<std::string>{"2", "5", "7", "inf"});
  CHECK(ids(Q.place_support(Rational(-1))).empty());
  CHECK_THROWS_WITH(Q.place_support(Rational(0)), "zero has no support");
}

TEST_CASE("product formula") {
  AdelicCurve Q = AdelicCurve::rationals();
  for (const char* a : {"6", "1", "100/7", "-999983/1000000"})
    CHECK(std::fabs(Q.product_formula_defect(Q.parse(a))) <= 1e-12);
  CHECK_THROWS_WITH(Q.product_formula_defect(Q.parse("0")), "zero has no support");

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> d(1, 999999);
  for (int i = 0; i < 200; ++i) {
    Rational a(d(rng), d(rng)), b(-d(rng), d(rng));
    a.canonicalize();
    b.canonicalize();
    double lhs = Q.product_formula_defect(Rational(a * b));
    CHECK(std::fabs(lhs - Q.product_formula_defect(a) - Q.product_formula_defect(b)) <= 1e-12);
    for (const auto& w : Q.place_support(a))
      CHECK(Q.absolute_value(a, w) * Q.absolute_value(Rational(1 / a), w) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("function field curve") {
  AdelicCurve F = AdelicCurve::function_field(3);
  FieldElement pi = F.parse("T^2+1");
  auto supp = F.place_support(pi);
  REQUIRE(supp.size() == 2);
  for (const auto& w : supp)
    if (w.kind == PlaceKind::Irreducible) CHECK(w.weight == 2);
  CHECK(std::fabs(F.product_formula_defect(pi)) <= 1e-12);
  CHECK(std::fabs(F.product_formula_defect(F.parse("(T^3+2T+1)/(T^2+T)"))) <= 1e-12);
  Place inf = F.place("inf");
  CHECK(F.absolute_value(pi, inf) == doctest::Approx(9.0));
  CHECK_THROWS_WITH(F.place("T^2-1"), "place not on this curve");
  // Constants have trivial support.
  CHECK(F.place_support(F.parse("2")).empty());

  AdelicCurve F4 = AdelicCurve::function_field(4);
  CHECK(std::fabs(F4.product_formula_defect(F4.parse("T^2+T+2"))) <= 1e-12);
}

TEST_CASE("integration over places") {
  AdelicCurve Q = AdelicCurve::rationals();
  CHECK(Q.integrate(PlaceFunction{{{"2", 1.0}, {"3", 1.0}}, 0.0}) == 2.0);
  CHECK(Q.integrate(PlaceFunction{}) == 0.0);
  PlaceFunction g;
  for (const auto& w : Q.place_support(Rational(6))) g.values[w.id] = Q.log_absolute_value(Rational(6), w);
  CHECK(std::fabs(Q.integrate(g)) <= 1e-12);
  CHECK_THROWS_WITH(Q.integrate(PlaceFunction{{}, 1.0}), "divergent integral");

  AdelicCurve C = AdelicCurve::weighted_copies({0.5, 2.0, 0.0});
  CHECK(C.integrate(PlaceFunction{{{"c1", 3.0}}, 1.0}) == doctest::Approx(0.5 + 6.0));
  CHECK(C.total_mass() == doctest::Approx(2.5));
  CHECK_FALSE(C.proper());
  CHECK(C.all_places()->size() == 3);
}
