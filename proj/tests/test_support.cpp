#include <doctest.h>

#include <cmath>

#include "adelic/factor.hpp"
#include "adelic/finite_field.hpp"
#include "adelic/linalg.hpp"
#include "adelic/roots.hpp"

using namespace adelic;

TEST_CASE("rationals parse and print canonically") {
  CHECK(to_string(parse_rational("6/4")) == "3/2");
  CHECK(to_string(parse_rational("-0.125")) == "-1/8");
  CHECK(to_string(parse_rational("7")) == "7");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK(valuation(Rational(12), Integer(2)) == 2);
  CHECK(valuation(Rational(1, 12), Integer(3)) == -1);
  CHECK(log_abs(Integer("1000000000000000000000000000000")) == doctest::Approx(30 * std::log(10.0)));
  auto pf = prime_factors(Integer(360));
  REQUIRE(pf.size() == 3);
  CHECK(pf[0] == 2);
  CHECK(pf[2] == 5);
}

TEST_CASE("polynomials") {
  QPoly p = QPoly::parse("(z+1)^2");
  CHECK(p == QPoly::parse("z^2+2*z+1"));
  CHECK(p.eval(Rational(2)) == 9);
  QPoly q, r;
  QPoly::parse("z^3-1").divmod(QPoly::parse("z-1"), q, r);
  CHECK(q == QPoly::parse("z^2+z+1"));
  CHECK(r.is_zero());
  CHECK(gcd(QPoly::parse("z^2-1"), QPoly::parse("z^2+2z+1")) == QPoly::parse("z+1"));
  CHECK(QPoly::parse("z^2").compose(QPoly::parse("z+1")) == p);
  CHECK(is_squarefree(QPoly::parse("z^2-2")));
  CHECK_FALSE(is_squarefree(p));
  CHECK(lex_less(QPoly::parse("z-2"), QPoly::parse("z+2")));
  auto [num, den] = parse_rational_function("(z^2+1)/(2z)");
  CHECK(num == QPoly::parse("z^2/2+1/2"));
  CHECK(den == QPoly::parse("z"));
  // Norm of w in Q[w]/(w^2-2) is -2.
  CHECK(char_poly_mod(QPoly::parse("w"), QPoly::parse("w^2-2")) == QPoly::parse("x^2-2"));
}

TEST_CASE("factorization over Q") {
  auto f = factor(QPoly::parse("z^4-1"));
  REQUIRE(f.size() == 3);
  CHECK(f[0].first.degree() == 1);
  CHECK(f[2].first == QPoly::parse("z^2+1"));
  CHECK(is_irreducible(QPoly::parse("z^1024-2")));
  CHECK_FALSE(is_irreducible(QPoly::parse("z^4+4")));  // Sophie Germain
  CHECK(QPoly::from_integer(cyclotomic(12)) == QPoly::parse("z^4-z^2+1"));
  CHECK(euler_phi(64) == 32);
  auto g = factor(QPoly::parse("(z^2-2)^2*(z+3)"));
  REQUIRE(g.size() == 2);
  CHECK(g[1].second == 2);
}

TEST_CASE("complex roots and Newton polygons") {
  auto R = complex_roots(QPoly::parse("z^4+1"));
  REQUIRE(R.roots.size() == 4);
  for (const auto& z : R.roots) CHECK(std::abs(std::abs(z) - 1.0L) < 1e-12L);
  CHECK(R.max_residual <= 1e-12L);

  auto np = newton_polygon(QPoly::parse("z^2-2"), Integer(2));
  REQUIRE(np.slopes.size() == 1);
  CHECK(np.slopes[0].first == Rational(1, 2));
  CHECK(np.slopes[0].second == 2);
  auto np3 = newton_polygon(QPoly::parse("z^2-2"), Integer(3));
  CHECK(np3.slopes[0].first == 0);
  auto np0 = newton_polygon(QPoly::parse("z^3-4z"), Integer(2));
  CHECK(np0.zero_roots == 1);
}

TEST_CASE("finite fields") {
  FiniteField F4(4);
  CHECK(F4.characteristic() == 2);
  for (FiniteField::Elem a = 1; a < 4; ++a) CHECK(F4.mul(a, F4.inv(a)) == 1);
  FiniteField F3(3);
  CHECK(fq::is_irreducible(F3, FqPoly{1, 0, 1}));       // T^2 + 1
  CHECK_FALSE(fq::is_irreducible(F3, FqPoly{2, 0, 1}));  // T^2 - 1
  CHECK_THROWS_AS(FiniteField(6), Error);
}

TEST_CASE("dense linear algebra") {
  Matrix a{{4, 2}, {2, 3}};
  CHECK(spd_log_det(a) == doctest::Approx(std::log(8.0)));
  CHECK_FALSE(cholesky(Matrix{{1, 2}, {2, 1}}).has_value());
  CHECK(rational_det({{Rational(1, 2), 1}, {3, 4}}) == -1);
}
