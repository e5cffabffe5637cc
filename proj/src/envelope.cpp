#include "adelic/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adelic/linalg.hpp"

namespace adelic {

namespace {

std::vector<double> sample_radii(const EnvelopeOptions& opt, double t_x) {
  if (opt.sup_radii < 2 || !(opt.sup_log_radius > 0)) throw Error("envelope sample needs at least two radii");
  std::vector<double> ts;
  for (int i = 0; i < opt.sup_radii; ++i)
    ts.push_back(-opt.sup_log_radius + 2 * opt.sup_log_radius * i / (opt.sup_radii - 1));
  ts.push_back(t_x);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

}  // namespace

RadialQuotient radial_quotient(const std::function<double(double)>& P, int n, const std::function<double(double)>& F,
                               double t_x, const EnvelopeOptions& opt, const std::vector<double>* warm,
                               double floor_value) {
  if (n < 0) throw Error("level must be nonnegative");
  const std::size_t K = static_cast<std::size_t>(n) + 1;
  auto ts = sample_radii(opt, t_x);
  const std::size_t R = ts.size();
  const int M = opt.sup_angles > 0 ? opt.sup_angles : std::max(64, 4 * n + 4);

  std::vector<double> Pr(R), Fr(R);
  for (std::size_t r = 0; r < R; ++r) {
    Pr[r] = P(ts[r]);
    Fr[r] = F(ts[r]);
    if (!std::isfinite(Pr[r]) || !std::isfinite(Fr[r])) throw Error("potential or weight not finite on the sample");
  }
  // Basis z^k scaled by s_k = 1 / max_r e^{k t - P}.
  std::vector<double> log_s(K);
  for (std::size_t k = 0; k < K; ++k) {
    double m = -INFINITY;
    for (std::size_t r = 0; r < R; ++r) m = std::max(m, static_cast<double>(k) * ts[r] - Pr[r]);
    log_s[k] = -m;
  }
  std::vector<std::vector<double>> b(R, std::vector<double>(K));
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t k = 0; k < K; ++k) b[r][k] = std::exp(log_s[k] + static_cast<double>(k) * ts[r] - Pr[r] - Fr[r]);
  const double Px = P(t_x);
  std::vector<double> g(K);
  for (std::size_t k = 0; k < K; ++k) g[k] = std::exp(log_s[k] + static_cast<double>(k) * t_x - Px);

  std::vector<std::vector<double>> cs(static_cast<std::size_t>(M), std::vector<double>(K)),
      sn(static_cast<std::size_t>(M), std::vector<double>(K));
  for (int m = 0; m < M; ++m) {
    double th = std::numbers::pi * m / (M - 1);
    for (std::size_t k = 0; k < K; ++k) {
      cs[m][k] = std::cos(static_cast<double>(k) * th);
      sn[m][k] = std::sin(static_cast<double>(k) * th);
    }
  }

  std::vector<double> err(R * static_cast<std::size_t>(M));
  auto evaluate = [&](const std::vector<double>& a) {
    double mx = 0;
    std::vector<double> c(K);
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t k = 0; k < K; ++k) c[k] = a[k] * b[r][k];
      for (int m = 0; m < M; ++m) {
        double re = 0, im = 0;
        for (std::size_t k = 0; k < K; ++k) {
          re += c[k] * cs[m][k];
          im += c[k] * sn[m][k];
        }
        double e = std::hypot(re, im);
        err[r * M + m] = e;
        mx = std::max(mx, e);
      }
    }
    return mx;
  };
  auto normalize = [&](std::vector<double> a) {
    double s = 0;
    for (std::size_t k = 0; k < K; ++k) s += g[k] * a[k];
    if (s == 0 || !std::isfinite(s)) throw Error("section vanishes at the evaluation point");
    for (auto& v : a) v /= s;
    return a;
  };

  RadialQuotient res;
  std::vector<double> best_a;
  double best = INFINITY;
  std::vector<double> w(R * static_cast<std::size_t>(M), 1.0 / (R * M));
  if (warm) {
    if (warm->size() != K) throw Error("warm start has the wrong degree");
    std::vector<double> a(K);
    for (std::size_t k = 0; k < K; ++k) a[k] = (*warm)[k] * std::exp(-log_s[k]);
    a = normalize(a);
    best = evaluate(a);
    best_a = a;
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) s += (w[i] = std::pow(err[i] / best, 8));
    for (auto& v : w) v /= s;
  }

  double lower = 0;
  if (K == 1) {
    std::vector<double> a{1.0 / g[0]};
    double v = evaluate(a);
    if (v < best) {
      best = v;
      best_a = a;
    }
    lower = best;
  } else {
    for (int it = 0; it < opt.max_iterations; ++it) {
      if (best <= std::max(lower, floor_value) * (1 + opt.stop_gap)) break;
      res.iterations = it + 1;
      // Weighted Gram matrix of the real quadratic form sum w |s|^2.
      Matrix G(K, std::vector<double>(K, 0.0));
      std::vector<double> T(K);
      for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t d = 0; d < K; ++d) {
          double s = 0;
          for (int m = 0; m < M; ++m) s += w[r * M + m] * cs[m][d];
          T[d] = s;
        }
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t l = 0; l <= k; ++l) G[k][l] += b[r][k] * b[r][l] * T[k - l];
      }
      double tr = 0;
      for (std::size_t k = 0; k < K; ++k) tr += G[k][k];
      for (std::size_t k = 0; k < K; ++k) {
        G[k][k] += 1e-14 * tr;
        for (std::size_t l = 0; l < k; ++l) G[l][k] = G[k][l];
      }
      auto L = cholesky(G);
      if (!L) break;
      auto y = cholesky_solve(*L, g);
      double gy = 0;
      for (std::size_t k = 0; k < K; ++k) gy += g[k] * y[k];
      if (!(gy > 0)) break;
      lower = std::max(lower, 1 / std::sqrt(gy));
      std::vector<double> a(K);
      for (std::size_t k = 0; k < K; ++k) a[k] = y[k] / gy;
      double v = evaluate(a);
      if (v < best) {
        best = v;
        best_a = a;
      }
      double s = 0;
      for (std::size_t i = 0; i < w.size(); ++i) s += (w[i] *= err[i]);
      if (!(s > 0)) break;
      for (auto& x : w) x /= s;
    }
  }
  res.value = best;
  res.lower = std::min(lower, best);
  res.coeffs.resize(K);
  for (std::size_t k = 0; k < K; ++k) res.coeffs[k] = best_a[k] * std::exp(log_s[k]);
  return res;
}

double fs_potential_of_sup(const LocalMetric& phi, double t, const EnvelopeOptions& opt) {
  auto P = [&](double s) { return phi.radial_potential(s); };
  auto F = [](double) { return 0.0; };
  auto q = radial_quotient(P, phi.level(), F, t, opt);
  return P(t) - std::log(q.value);
}

double fs_potential_of_sum(const LocalMetric& phi, const LocalMetric& psi, double t, const EnvelopeOptions& opt) {
  EnvelopeOptions o = opt;
  if (o.sup_angles <= 0) o.sup_angles = std::max(64, 4 * (phi.level() + psi.level() + 1));
  auto P1 = [&](double s) { return phi.radial_potential(s); };
  auto P2 = [&](double s) { return psi.radial_potential(s); };
  auto P = [&](double s) { return P1(s) + P2(s); };
  auto F = [](double) { return 0.0; };
  auto q1 = radial_quotient(P1, phi.level(), F, t, o);
  auto q2 = radial_quotient(P2, psi.level(), F, t, o);
  auto warm = convolve(q1.coeffs, q2.coeffs);
  auto q = radial_quotient(P, phi.level() + psi.level(), F, t, o, &warm);
  return P(t) - std::log(std::min(q.value, q1.value * q2.value));
}

std::vector<EnvelopePoint> fs_envelope(const LocalMetric& phi, const LocalTestFunction& f, const std::vector<double>& ts,
                                       int n_max, const EnvelopeOptions& opt) {
  if (phi.kind() != LocalMetric::Kind::FSQuotient || phi.level() != 1 || !phi.radial())
    throw Error("envelope requires a diagonal Hermitian quotient metric on O(1)");
  const auto& G = phi.gram();
  double h0 = 1 / G[0][0], h1 = 1 / G[1][1];
  if (n_max < 0) throw Error("level must be nonnegative");

  auto fr = [&](double t) { return f(CPoint(std::exp(t), 0)); };
  for (double t : sample_radii(opt, 0.0))
    if (fr(t) < 0) throw Error("envelope requires f ≥ 0");
  for (double t : ts)
    if (fr(t) < 0) throw Error("envelope requires f ≥ 0");

  EnvelopeOptions o = opt;
  if (o.sup_angles <= 0) o.sup_angles = std::max(64, 4 * (n_max + 1));

  std::vector<EnvelopePoint> out;
  for (double tx : ts) {
    EnvelopePoint ep;
    ep.t = tx;
    ep.f = fr(tx);
    const double floor_value = std::exp(-ep.f);
    // Level 0: the constant section.
    double v0 = 0;
    for (double t : sample_radii(o, tx)) v0 = std::max(v0, std::exp(-fr(t)));
    double V = v0;
    ep.fn.push_back(std::min(ep.f, -std::log(V)));
    ep.iterations.push_back(0);
    std::vector<double> coeffs{1.0};
    // Representer of evaluation at x for the Hermitian norm, normalized so
    // that its pointwise size is <= 1 with equality at x.
    double x = std::exp(tx);
    double nt = std::sqrt(h0 + h1 * x * x);
    std::vector<double> tau{h0 / nt, h1 * x / nt};
    for (int n = 1; n <= n_max; ++n) {
      auto warm = convolve(coeffs, tau);
      int iters = 0;
      if (ep.f > 0 && V > floor_value * (1 + o.stop_gap)) {
        auto P = [&](double s) { return n * phi.radial_potential(s); };
        auto q = radial_quotient(P, n, fr, tx, o, &warm, floor_value);
        iters = q.iterations;
        if (q.value < V) {
          V = q.value;
          coeffs = q.coeffs;
        } else {
          coeffs = warm;
        }
      } else {
        coeffs = warm;
      }
      ep.fn.push_back(std::min(ep.f, -std::log(V)));
      ep.iterations.push_back(iters);
    }
    out.push_back(std::move(ep));
  }
  return out;
}

}  // namespace adelic
