#include "adelic/equidistribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "adelic/factor.hpp"

namespace adelic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The default metric of an infinite curve must be the naive one so that
// unlisted places only see the naive potential.
void require_naive_default(const MetricFamily& phi) {
  if (phi.curve().all_places()) return;
  const LocalMetric& d = phi.default_metric();
  if (!d.is_toric() || d.toric_potential().sup_distance(ToricPotential::naive()) > 1e-15)
    throw Error("divergent integral");
}

// Places contributing to a height or orbit sum of Y.
std::vector<Place> height_places(const ClosedPoint& Y, const MetricFamily& phi) {
  const AdelicCurve& C = phi.curve();
  if (auto all = C.all_places()) return *all;
  std::set<std::string> ids;
  for (const auto& w : phi.listed_places()) ids.insert(w.id);
  ids.insert("inf");
  if (!Y.infinity) {
    QPoly m = Y.minimal.monic();
    for (const auto& c : m.coeffs())
      for (const auto& p : prime_factors(c.get_den())) ids.insert(to_string(p));
  }
  std::vector<Place> out;
  for (const auto& id : ids) out.push_back(C.place(id));
  std::sort(out.begin(), out.end());
  return out;
}

// Orbit average of phi_w (the potential of -ln|1|_phi, or of -ln|z|_phi at infinity).
double local_height(const ClosedPoint& Y, const LocalMetric& m, const Place& w, const RootOptions& opt) {
  if (Y.infinity) return m.potential_at_infinity();
  if (!w.archimedean() && m.kind() == LocalMetric::Kind::Dynamical) {
    auto r = Y.as_rational();
    if (!r) throw Error("dynamical metrics at bad primes are evaluated at rational points only");
    return dynamic_cast<const DynamicalPotential&>(m.source()).potential_rational(r);
  }
  LocalMeasure mu = galois_orbit_local_points(Y, w, opt);
  if (w.archimedean()) return mu.integrate([&](CPoint z, bool) { return m.potential(z); }).mean;
  double s = 0;
  for (const auto& a : mu.segment_atoms())
    s += a.mass * (std::isinf(a.t) ? m.potential(CPoint(0, 0)) : m.radial_potential(a.t));
  return s;
}

bool squarefree_fiber(const std::vector<std::pair<QPoly, int>>& fac) {
  return std::all_of(fac.begin(), fac.end(), [](const auto& f) { return f.second == 1; });
}

}  // namespace

QPoly preimage_polynomial(const Endomorphism& f, const Rational& target, int n) {
  if (n < 0) throw Error("iteration count must be nonnegative");
  const int d = f.degree();
  QPoly A = QPoly::x(), B = QPoly::constant(1);
  for (int it = 0; it < n; ++it) {
    std::vector<QPoly> Ap{QPoly::constant(1)}, Bp{QPoly::constant(1)};
    for (int i = 1; i <= d; ++i) {
      Ap.push_back(Ap.back() * A);
      Bp.push_back(Bp.back() * B);
    }
    QPoly A2, B2;
    for (int i = 0; i <= d; ++i) {
      QPoly mon = Ap[i] * Bp[d - i];
      const Rational& a = f.lift(0)[i];
      const Rational& b = f.lift(1)[i];
      if (a != 0) A2 = A2 + mon * a;
      if (b != 0) B2 = B2 + mon * b;
    }
    A = std::move(A2);
    B = std::move(B2);
  }
  return A - B * target;
}

GenericSequence small_sequence_generate(const Endomorphism& f, const Rational& target, int N) {
  if (N < 1) throw Error("sequence length must be at least 1");
  GenericSequence S;
  S.descriptor = "roots of f^n(z) = " + to_string(target) + " for f = " + f.describe();
  HeightResult ht = canonical_height(f, ClosedPoint::rational(target));
  double h = ht.preperiodic ? 0.0 : ht.value;
  double scale = 1;
  for (int n = 1; n <= N; ++n) {
    QPoly P = preimage_polynomial(f, target, n);
    if (P.is_zero()) throw Error("choose a non-exceptional target");
    auto fac = factor(P);
    if (!squarefree_fiber(fac) || fac.empty()) throw Error("choose a non-exceptional target");
    const QPoly* best = nullptr;
    for (const auto& [q, e] : fac)
      if (!best || q.degree() > best->degree() || (q.degree() == best->degree() && lex_less(q, *best))) best = &q;
    S.points.push_back(ClosedPoint{best->monic(), false});
    scale *= f.degree();
    S.heights.push_back(h / scale);
  }
  S.generic = true;
  for (std::size_t i = 0; i < S.points.size() && S.generic; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (S.points[i] == S.points[j]) {
        S.generic = false;
        break;
      }
  return S;
}

LocalMeasure galois_orbit_local_points(const ClosedPoint& Y, const Place& w, const RootOptions& opt) {
  if (w.archimedean()) {
    if (Y.infinity) return LocalMeasure::points({{CPoint(kInf, 0), 1.0}});
    RootResult R = complex_roots(Y.minimal, opt);
    const double mass = 1.0 / static_cast<double>(R.roots.size());
    std::vector<PointAtom> atoms;
    for (const auto& z : R.roots) atoms.push_back({CPoint(static_cast<double>(z.real()), static_cast<double>(z.imag())), mass});
    return LocalMeasure::points(std::move(atoms));
  }
  if (w.kind != PlaceKind::Prime) throw Error("closed points are defined over Q");
  if (Y.infinity) return LocalMeasure::segments({{kInf, 1.0}});
  NewtonPolygon np = newton_polygon(Y.minimal, w.prime);
  const double D = Y.degree(), lp = std::log(w.prime.get_d());
  std::vector<SegmentAtom> atoms;
  if (np.zero_roots > 0) atoms.push_back({-kInf, np.zero_roots / D});
  for (const auto& [v, count] : np.slopes) atoms.push_back({-v.get_d() * lp, count / D});
  return LocalMeasure::segments(std::move(atoms));
}

double delta_functional(const ClosedPoint& Y, const AdelicCurve& curve, const TestFunctionFamily& f,
                        const PlacePredicate& omega, const RootOptions& opt) {
  double s = 0;
  for (const auto& [id, fl] : f.local) {
    Place w = curve.place(id);
    if ((omega && !omega(w)) || w.weight == 0 || fl.is_zero()) continue;
    s += w.weight * galois_orbit_local_points(Y, w, opt).integrate(fl).mean;
  }
  return s;
}

MonteCarlo limit_functional(const MetricFamily& phi, const TestFunctionFamily& f, const PlacePredicate& omega,
                            const MeasureOptions& opt) {
  MonteCarlo r = integrate_global(monge_ampere(phi, opt), f, omega);
  r.mean /= phi.level();
  r.stderr_ /= phi.level();
  return r;
}

double normalized_height(const ClosedPoint& Y, const MetricFamily& phi, const RootOptions& opt) {
  if (phi.curve().base() == BaseKind::FqT) throw Error("closed points are defined over Q");
  require_naive_default(phi);
  double s = 0;
  for (const auto& w : height_places(Y, phi))
    if (w.weight > 0) s += w.weight * local_height(Y, phi.at(w.id), w, opt);
  return s / phi.level();
}

SpaceHeight normalized_height_space(const MetricFamily& phi, int n_max) {
  SpaceHeight H;
  const double two_m = 2.0 * phi.level();
  if (phi.toric()) H.value = chi_volume_closed_form(phi) / two_m;
  for (int n = 1; n <= n_max; ++n) H.trace.push_back(chi_volume_lattice_estimate(phi, n).estimate / two_m);
  if (!phi.toric()) {
    if (H.trace.empty()) throw Error("lattice trace needs n_max >= 1");
    H.value = H.trace.back();
  }
  return H;
}

EssentialMinimum essential_minimum_estimate(const MetricFamily& phi, const EssMinOptions& opt) {
  if (opt.degree_bound < 1 || opt.height_budget < 1 || opt.exclusion < 0) throw Error("invalid enumeration bounds");
  const AdelicCurve& C = phi.curve();
  require_naive_default(phi);
  const double m = phi.level();

  // Lower bound: h(P) >= h_naive(P) + sum nu inf(phi - naive) / level.
  double lower = 0;
  for (const auto& w : phi.listed_places()) {
    if (w.weight == 0) continue;
    const LocalMetric& lm = phi.at(w.id);
    double e;
    if (lm.is_toric()) {
      e = lm.toric_potential().min_excess_over_naive();
    } else if (w.archimedean()) {
      e = (lm.potential(CPoint(0, 0))) / m;
      e = std::min(e, lm.potential_at_infinity() / m);
      for (const auto& z : VerificationGrid().refined().points())
        e = std::min(e, (lm.potential(z) - m * std::max(0.0, std::log(std::abs(z)))) / m);
    } else {
      e = -kInf;
    }
    lower += w.weight * e;
  }
  if (opt.nonnegative) lower = std::max(lower, 0.0);

  std::vector<std::pair<double, std::string>> hs;
  if (C.base() == BaseKind::FqT) {
    // Nonzero constants: |c| = 1 everywhere, so each place sees u(0).
    double h = 0;
    for (const auto& w : phi.listed_places()) {
      const LocalMetric& lm = phi.at(w.id);
      if (!lm.is_toric()) throw Error("metrics over F_q(T) must be toric");
      h += w.weight * lm.toric_potential()(0.0);
    }
    for (std::uint32_t c = 1; c < C.q(); ++c) hs.push_back({h, std::to_string(c)});
  } else {
    std::vector<ClosedPoint> cand{ClosedPoint::at_infinity()};
    const int B = opt.height_budget;
    for (int b = 1; b <= B; ++b)
      for (int a = -B; a <= B; ++a)
        if (std::gcd(a, b) == 1 || (a == 0 && b == 1)) cand.push_back(ClosedPoint::rational(Rational(a, b)));
    for (unsigned k = 3; k <= 400; ++k) {
      unsigned e = euler_phi(k);
      if (static_cast<int>(e) <= opt.degree_bound) cand.push_back(ClosedPoint::from_polynomial(QPoly::from_integer(cyclotomic(k))));
    }
    if (opt.degree_bound >= 2)
      for (int b = -B; b <= B; ++b)
        for (int c = -B; c <= B; ++c) {
          Integer disc = Integer(b) * b - 4 * Integer(c);
          if (disc >= 0 && mpz_perfect_square_p(disc.get_mpz_t())) continue;
          QPoly q(std::vector<Rational>{Rational(c), Rational(b), Rational(1)});
          if (std::find(cand.begin(), cand.end(), ClosedPoint{q, false}) == cand.end()) cand.push_back(ClosedPoint{q, false});
        }
    for (const auto& Y : cand) {
      try {
        hs.push_back({normalized_height(Y, phi), Y.describe()});
      } catch (const Error&) {
        // points whose local data is unavailable are left out
      }
    }
  }
  if (hs.empty()) throw Error("empty enumeration");
  std::stable_sort(hs.begin(), hs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(opt.exclusion), hs.size() - 1);
  EssentialMinimum E;
  E.candidates = hs.size();
  E.upper = hs[k].first;
  E.witness = hs[k].second;
  E.lower = std::min(lower, E.upper);
  return E;
}

ConvergenceReport convergence_report(const GenericSequence& seq, const MetricFamily& phi,
                                     const std::vector<NamedTest>& bank, const PlacePredicate& omega,
                                     const MeasureOptions& opt) {
  ConvergenceReport R;
  R.seq = seq.descriptor;
  R.heights = seq.heights;
  const AdelicCurve& C = phi.curve();
  std::set<std::string> ids;
  for (const auto& t : bank)
    for (const auto& [id, fl] : t.f.local) ids.insert(id);

  std::vector<double> limits;
  for (const auto& t : bank) {
    R.f_ids.push_back(t.id);
    limits.push_back(limit_functional(phi, t.f, omega, opt).mean);
  }
  R.gaps.assign(bank.size(), {});
  for (std::size_t n = 0; n < seq.points.size(); ++n) {
    std::map<std::string, LocalMeasure> orbit;
    for (const auto& id : ids) {
      Place w = C.place(id);
      if ((omega && !omega(w)) || w.weight == 0) continue;
      orbit.emplace(id, galois_orbit_local_points(seq.points[n], w));
    }
    for (std::size_t j = 0; j < bank.size(); ++j) {
      double dn = 0;
      for (const auto& [id, fl] : bank[j].f.local) {
        auto it = orbit.find(id);
        if (it == orbit.end() || fl.is_zero()) continue;
        dn += C.place(id).weight * it->second.integrate(fl).mean;
      }
      ConvergenceRow row{static_cast<int>(n + 1), bank[j].id, dn, limits[j], std::fabs(dn - limits[j]), seq.heights[n]};
      R.rows.push_back(row);
      R.gaps[j].push_back(row.gap);
    }
  }
  for (const auto& g : R.gaps) {
    double c = 0;
    bool mono = true;
    for (std::size_t n = 0; n < g.size(); ++n) {
      c = std::max(c, g[n] * std::pow(2.0, 0.5 * static_cast<double>(n + 1)));
      if (n > 0 && g[n] > g[n - 1] + 1e-15) mono = false;
    }
    R.rate_constant.push_back(c);
    R.nonincreasing.push_back(mono);
  }
  return R;
}

std::vector<NamedTest> lipschitz_test_bank() {
  auto fam = [](std::optional<Profile> at_inf, std::optional<Profile> at_2) {
    TestFunctionFamily f;
    if (at_inf) f.local["inf"] = LocalTestFunction::toric(*at_inf);
    if (at_2) f.local["2"] = LocalTestFunction::toric(*at_2);
    return f;
  };
  Profile vee({-1, 0, 1}, {1, 0, 1});
  return {
      {"abs_inf", fam(vee, std::nullopt)},
      {"abs_2", fam(std::nullopt, vee)},
      {"ramp", fam(Profile({-1, 1}, {-1, 1}), Profile({-1, 1}, {1, -1}))},
      {"clipped", fam(Profile({-0.5, 0, 0.5}, {0.5, 0, 0.5}), Profile({-0.5, 0, 0.5}, {0.5, 0, 0.5}))},
      {"tent", fam(Profile({-1.1, -0.1, 0.9}, {0, 1, 0}), Profile({0, 1}, {0, 1}))},
  };
}

}  // namespace adelic
