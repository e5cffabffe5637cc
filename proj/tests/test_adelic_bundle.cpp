#include <doctest.h>

#include <cmath>
#include <random>

#include "adelic/bundle.hpp"

using namespace adelic;

namespace {

const double ln2 = std::log(2.0);

AdelicVectorBundle diag_inf(std::vector<Rational> lambda) {
  int r = static_cast<int>(lambda.size());
  return AdelicVectorBundle(AdelicCurve::rationals(), r, {{"inf", LocalNorm::diagonal(std::move(lambda))}});
}

AdelicVectorBundle log_diag_inf(std::vector<double> log_lambda) {
  int r = static_cast<int>(log_lambda.size());
  return AdelicVectorBundle(AdelicCurve::rationals(), r, {{"inf", LocalNorm::diagonal_log(std::move(log_lambda))}});
}

}  // namespace

TEST_CASE("arithmetic degree and slope") {
  CHECK(arithmetic_degree(AdelicVectorBundle(AdelicCurve::rationals(), 1)) == 0.0);
  CHECK(arithmetic_degree(diag_inf({2})) == doctest::Approx(-ln2));
  CHECK(arithmetic_degree(diag_inf({Rational(1, 2), 1})) == doctest::Approx(ln2));
  CHECK(slope(AdelicVectorBundle(AdelicCurve::rationals(), 3)) == 0.0);
  CHECK(slope(diag_inf({2})) == doctest::Approx(-ln2));
  CHECK(slope(diag_inf({Rational(1, 2), 1})) == doctest::Approx(ln2 / 2));

  // A prime-place norm: ||e_1||_3 = 1/3 contributes ln 3.
  AdelicVectorBundle p(AdelicCurve::rationals(), 2, {{"3", LocalNorm::diagonal({Rational(1, 3), 1})}});
  CHECK(arithmetic_degree(p) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("degree invariants") {
  // Additivity on orthogonal sums.
  double a = arithmetic_degree(diag_inf({Rational(1, 5)})), b = arithmetic_degree(diag_inf({Rational(7, 3)}));
  CHECK(std::fabs(arithmetic_degree(diag_inf({Rational(1, 5), Rational(7, 3)})) - a - b) <= 1e-12);

  // Rescaling all norms at a place of mass w by e^{-c} adds r w c.
  AdelicCurve C = AdelicCurve::weighted_copies({0.75, 1.0});
  AdelicVectorBundle E(C, 3, {{"c0", LocalNorm::diagonal_log({0.1, -0.2, 0.3})}});
  AdelicVectorBundle Es(C, 3, {{"c0", LocalNorm::diagonal_log({0.1 - 0.4, -0.2 - 0.4, 0.3 - 0.4})}});
  CHECK(arithmetic_degree(Es) - arithmetic_degree(E) == doctest::Approx(3 * 0.75 * 0.4));

  // A unimodular change of basis leaves the degree unchanged.
  Matrix G{{2, 0.5}, {0.5, 1}};
  Matrix U{{1, 3}, {0, 1}};
  Matrix G2(2, std::vector<double>(2, 0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) G2[i][j] += U[k][i] * G[k][l] * U[l][j];
  AdelicVectorBundle H1(AdelicCurve::rationals(), 2, {{"inf", LocalNorm::hermitian(G)}});
  AdelicVectorBundle H2(AdelicCurve::rationals(), 2,
                        {{"inf", LocalNorm::hermitian(G2)}, {"2", LocalNorm::lattice({{1, 3}, {0, 1}})}});
  CHECK(arithmetic_degree(H2) == doctest::Approx(arithmetic_degree(H1)).epsilon(1e-12));

  CHECK_THROWS_WITH(LocalNorm::hermitian({{1, 1}, {1, 1}}), "norm not definite");
}

TEST_CASE("brute-force maximal slope") {
  CHECK(max_slope_bruteforce(diag_inf({Rational(1, 2), 1}), 1).slope == doctest::Approx(ln2));
  CHECK(max_slope_bruteforce(AdelicVectorBundle(AdelicCurve::rationals(), 2), 1).slope == 0.0);
  auto r = max_slope_bruteforce(log_diag_inf({1, 0, -1}), 1);
  CHECK(r.slope == doctest::Approx(1.0));
  REQUIRE(r.basis.size() == 1);
  CHECK_THROWS_WITH(max_slope_bruteforce(AdelicVectorBundle(AdelicCurve::rationals(), 5), 1), "oracle scale exceeded");

  // A non-diagonal lattice: the line spanned by (1,1) is the steepest.
  AdelicVectorBundle L(AdelicCurve::rationals(), 2, {{"2", LocalNorm::lattice({{Rational(1, 2), 0}, {Rational(1, 2), 1}})}});
  auto s = max_slope_bruteforce(L, 2);
  CHECK(s.slope >= slope(L) - 1e-15);
}

TEST_CASE("Harder-Narasimhan filtration of diagonal bundles") {
  auto a = hn_filtration_diagonal(AdelicVectorBundle(AdelicCurve::rationals(), 2));
  REQUIRE(a.size() == 1);
  CHECK(a[0].threshold == 0.0);
  CHECK(a[0].indices.size() == 2);

  auto b = hn_filtration_diagonal(diag_inf({Rational(1, 2), 1}));
  REQUIRE(b.size() == 2);
  CHECK(b[0].threshold == doctest::Approx(ln2));
  CHECK(b[0].indices.size() == 1);
  CHECK(b[1].threshold == 0.0);
  CHECK(b[1].indices.size() == 2);

  auto c = hn_filtration_diagonal(log_diag_inf({-1, -1, 1}));
  REQUIRE(c.size() == 2);
  CHECK(c[0].threshold == doctest::Approx(1.0));
  CHECK(c[0].indices.size() == 2);
  CHECK(c[1].threshold == doctest::Approx(-1.0));
  CHECK(c[1].indices.size() == 3);

  AdelicVectorBundle nd(AdelicCurve::rationals(), 2, {{"inf", LocalNorm::hermitian({{2, 1}, {1, 2}})}});
  CHECK_THROWS_WITH(hn_filtration_diagonal(nd), "requires simultaneously orthogonal family");
}

TEST_CASE("oracle matches the top HN threshold on random diagonal bundles") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(1, 9), dim(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    int r = dim(rng);
    std::vector<Rational> l0, l2;
    for (int i = 0; i < r; ++i) {
      l0.push_back(Rational(num(rng), num(rng)));
      l2.push_back(Rational(1, 1 << (num(rng) % 3)));
    }
    for (auto& x : l0) x.canonicalize();
    AdelicVectorBundle E(AdelicCurve::rationals(), r, {{"inf", LocalNorm::diagonal(l0)}, {"2", LocalNorm::diagonal(l2)}});
    CHECK(max_slope_bruteforce(E, 1).slope == hn_filtration_diagonal(E).front().threshold);
  }
}

TEST_CASE("spectral norms of monomials") {
  auto trivial = [](int level) { return AdelicVectorBundle(AdelicCurve::rationals(), level + 1); };
  CHECK(spectral_norm_diagonal(0, 1, trivial, 8).value == doctest::Approx(1.0));
  CHECK(spectral_norm_diagonal(1, 2, trivial, 8).value == doctest::Approx(1.0));
  const double m = 0.3;
  auto scaled = [&](int level) {
    return AdelicVectorBundle(AdelicCurve::rationals(), level + 1,
                              {{"inf", LocalNorm::diagonal_log(std::vector<double>(static_cast<std::size_t>(level + 1), -level * m))}});
  };
  auto s = spectral_norm_diagonal(0, 1, scaled, 6);
  CHECK(s.value == doctest::Approx(std::exp(-m)));
  CHECK(s.trace.size() == 6);
}
