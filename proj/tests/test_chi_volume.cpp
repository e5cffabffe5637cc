#include <doctest.h>

#include <cmath>
#include <random>

#include "adelic/chi_volume.hpp"
#include "adelic/dynamics.hpp"

using namespace adelic;

namespace {

const AdelicCurve Q = AdelicCurve::rationals();

Roof tent() { return Roof({0, Rational(1, 2), 1}, {0, 0.5, 0}); }
Roof flat(double m) { return Roof({0, 1}, {m, m}); }

MetricFamily at_inf(Roof r, int level = 1) { return toric_family(Q, level, {{"inf", std::move(r)}}); }

Roof random_roof(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Rational> x{0, Rational(1, 3), Rational(1, 2), 1};
  double s0 = u(rng) + 2, s1 = s0 - 1 - u(rng) * u(rng), s2 = s1 - 1.5;
  double y0 = u(rng);
  return Roof(x, {y0, y0 + s0 / 3, y0 + s0 / 3 + s1 / 6, y0 + s0 / 3 + s1 / 6 + s2 / 2});
}

MetricFamily random_family(std::mt19937_64& rng) {
  return toric_family(Q, 1, {{"inf", random_roof(rng)}, {"2", random_roof(rng)}, {"5", random_roof(rng)}});
}

}  // namespace

TEST_CASE("closed-form chi-volumes") {
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  CHECK(chi_volume_closed_form(can) == 0.0);
  CHECK(chi_volume_closed_form(at_inf(flat(0.7))) == doctest::Approx(1.4));
  CHECK(chi_volume_closed_form(at_inf(tent())) == doctest::Approx(0.5));
  CHECK(chi_volume_closed_form(MetricFamily()) == 0.0);
  // Level m scales the closed form by m^2.
  CHECK(chi_volume_closed_form(at_inf(tent(), 3)) == doctest::Approx(4.5));
  // A nonzero default roof would give a divergent sum over the primes.
  CHECK_THROWS_WITH(chi_volume_closed_form(MetricFamily(Q, LocalMetric::toric(1, flat(1)))), "divergent integral");
}

TEST_CASE("lattice estimates") {
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  CHECK(std::fabs(chi_volume_lattice_estimate(can, 10).estimate) <= 1e-9);
  auto e = chi_volume_lattice_estimate(at_inf(flat(0.5)), 10);
  CHECK(e.estimate == doctest::Approx(1.0 * (1 + 1.0 / 10)));
  REQUIRE(e.closed_form.has_value());
  CHECK(*e.closed_form == doctest::Approx(1.0));
  double prev = 1e9;
  for (int n : {5, 10, 20, 40}) {
    double err = std::fabs(chi_volume_lattice_estimate(at_inf(tent()), n).estimate - 0.5);
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
  CHECK_THROWS_AS(chi_volume_lattice_estimate(can, 0), Error);
}

TEST_CASE("section filtrations and concave transforms") {
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  CHECK(section_filtration(can, 6, 0.0).size() == 7);
  CHECK(section_filtration(can, 6, 1e-9).empty());
  CHECK(section_filtration(at_inf(flat(0.3)), 4, 0.3).size() == 5);
  CHECK(section_filtration(at_inf(flat(0.3)), 4, 0.31).empty());
  CHECK(section_filtration(MetricFamily(), 3, 0.0).size() == 4);
  // The tent keeps the middle monomials as t grows.
  CHECK(section_filtration(at_inf(tent()), 4, 0.25).size() == 3);

  auto G = concave_transform(at_inf(tent()), 8);
  CHECK(G(0.5) == doctest::Approx(0.5));
  CHECK(G.mu_max == doctest::Approx(0.5));
  CHECK(concave_transform(can, 20).normalized.max() == 0.0);
  CHECK(concave_transform(at_inf(flat(2)), 4)(0.3) == doctest::Approx(2.0));

  // Homogeneity: G_{n phi}(n x) = n G_phi(x).
  auto G3 = concave_transform(at_inf(tent(), 3), 4);
  for (double x : {0.0, 0.25, 0.5, 1.0}) CHECK(G3(3 * x) == doctest::Approx(3 * G(x)));

  MetricFamily non_toric(Q, LocalMetric(), {{"inf", LocalMetric::fs_hermitian({{1, 0}, {0, 2}})}});
  CHECK_THROWS_AS(concave_transform(non_toric, 4), Error);
  CHECK_THROWS_AS(section_filtration(non_toric, 4, 0), Error);
}

TEST_CASE("relative volumes") {
  const Place inf = Q.place("inf");
  LocalMetric phi = LocalMetric::toric(1, tent());
  CHECK(relative_volume_estimate(phi, phi, inf, 10).estimate == 0.0);
  LocalMetric psi = LocalMetric::toric(1, tent().shifted(-0.4));
  auto rv = relative_volume_estimate(phi, psi, inf, 10);
  CHECK(*rv.closed_form == doctest::Approx(0.8));
  CHECK(rv.estimate == doctest::Approx(0.8 * (1 + 1.0 / 10)));
  CHECK_THROWS_AS(relative_volume_estimate(phi, LocalMetric::toric(2, tent()), inf, 10), Error);

  // Decomposition of the chi difference into local pieces.
  std::mt19937_64 rng(5);
  MetricFamily a = random_family(rng), b = random_family(rng);
  double sum = 0;
  for (const char* id : {"inf", "2", "5"})
    sum += Q.place(id).weight * *relative_volume_estimate(a.at(id), b.at(id), Q.place(id), 4).closed_form;
  CHECK(std::fabs(sum - (chi_volume_closed_form(a) - chi_volume_closed_form(b))) <= 1e-9);
}

TEST_CASE("Gateaux derivative") {
  TestFunctionFamily one;
  one.local["inf"] = LocalTestFunction::constant(1.0);
  auto g = gateaux_derivative(at_inf(tent()), one);
  CHECK(g.derivative == doctest::Approx(2.0));
  CHECK(g.finite_difference == doctest::Approx(2.0));
  CHECK(gateaux_derivative(at_inf(tent()), TestFunctionFamily{}).derivative == 0.0);

  // Canonical z^2: derivative 2 h(0) for a toric profile h.
  MetricFamily can = canonical_metric_family(Endomorphism::parse("z^2"), 1e-12);
  TestFunctionFamily h;
  h.local["inf"] = LocalTestFunction::toric(Profile({-1, 0.5, 2}, {0.2, 0.7, -0.1}));
  auto gc = gateaux_derivative(can, h);
  double h0 = 0.2 + (0.7 - 0.2) / 1.5;
  CHECK(gc.derivative == doctest::Approx(2 * h0).epsilon(1e-12));
  CHECK(std::fabs(gc.derivative - gc.measure_route) <= 1e-10);

  // An f with knots at the kinks of u and small jumps keeps u + h f convex,
  // so chi is linear in h.
  MetricFamily phi = at_inf(tent());
  TestFunctionFamily adapted;
  adapted.local["inf"] = LocalTestFunction::toric(Profile({-1, 1}, {0.3, 0.2}));
  auto ga = gateaux_derivative(phi, adapted);
  CHECK(std::fabs(ga.derivative - ga.finite_difference) <= 1e-9);
  CHECK(std::fabs(ga.derivative - ga.measure_route) <= 1e-10);
}

TEST_CASE("maximal slopes and concavity") {
  CHECK(asymptotic_max_slope(at_inf(tent()), 8).value == doctest::Approx(0.5));
  CHECK(asymptotic_max_slope(at_inf(flat(1.5)), 4).value == doctest::Approx(1.5));
  auto tr = asymptotic_max_slope(at_inf(tent()), 6);
  CHECK(tr.mu_max.size() == 6);
  for (double v : tr.mu_max) CHECK(v <= 0.5 + 1e-12);

  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    MetricFamily a = random_family(rng), b = random_family(rng);
    for (double d : {0.25, 0.5, 0.75}) CHECK(concavity_slack(a, b, d) >= -1e-12);
    CHECK(superadditivity_slack(a, b, 0.3, 0.6) >= -1e-12);
    double chi = chi_volume_closed_form(a);
    CHECK(asymptotic_max_slope(a, 2).value >= chi / 2 - 1e-12);
    // Lipschitz bound in the sup distance.
    double dist = 0;
    for (const char* id : {"inf", "2", "5"}) dist += Q.place(id).weight * metric_distance(a.at(id), b.at(id));
    CHECK(std::fabs(chi - chi_volume_closed_form(b)) <= 2 * dist + 1e-12);
  }
  MetricFamily t = toric_tensor(at_inf(tent()), at_inf(flat(1)));
  CHECK(t.level() == 2);
  CHECK(chi_volume_closed_form(t) == doctest::Approx(5.5));
}
