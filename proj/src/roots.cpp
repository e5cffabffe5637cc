#include "adelic/roots.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <sstream>

namespace adelic {

namespace {

std::vector<Complex> scaled_coeffs(const QPoly& p) {
  // Scale by a common power of two so huge or tiny coefficients stay finite.
  long emax = LONG_MIN;
  std::vector<std::pair<long double, long>> parts;
  for (const auto& c : p.coeffs()) {
    if (c == 0) {
      parts.emplace_back(0.0L, 0);
      continue;
    }
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, c.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, c.get_den_mpz_t());
    parts.emplace_back(static_cast<long double>(mn) / md, en - ed);
    emax = std::max(emax, en - ed);
  }
  std::vector<Complex> out;
  for (auto [m, e] : parts) out.emplace_back(m == 0 ? 0.0L : std::ldexp(m, static_cast<int>(e - emax)), 0.0L);
  return out;
}

// Newton correction p(z)/p'(z), evaluated on the reversed polynomial when
// |z| > 1 to avoid overflow at high degree.
Complex newton_ratio(const std::vector<Complex>& c, Complex z) {
  std::size_t n = c.size() - 1;
  if (std::abs(z) <= 1) {
    Complex p = c[n], dp = 0;
    for (std::size_t i = n; i-- > 0;) {
      dp = dp * z + p;
      p = p * z + c[i];
    }
    return p / dp;
  }
  Complex w = 1.0L / z;
  Complex q = c[0], dq = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    dq = dq * w + q;
    q = q * w + c[i];
  }
  // p(z) = z^n q(w), p'(z) = z^{n-1} (n q(w) - w q'(w))
  return z * q / (static_cast<long double>(n) * q - w * dq);
}

}  // namespace

long double relative_residual(const std::vector<Complex>& c, Complex z) {
  std::size_t n = c.size() - 1;
  long double az = std::abs(z);
  if (az <= 1) {
    Complex p = 0;
    long double s = 0;
    for (std::size_t i = n + 1; i-- > 0;) {
      p = p * z + c[i];
      s = s * az + std::abs(c[i]);
    }
    return s == 0 ? 0 : std::abs(p) / s;
  }
  Complex w = 1.0L / z;
  long double aw = 1.0L / az;
  Complex q = 0;
  long double s = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    q = q * w + c[i];
    s = s * aw + std::abs(c[i]);
  }
  return s == 0 ? 0 : std::abs(q) / s;
}

std::vector<std::pair<double, int>> log_radius_segments(const std::vector<Complex>& c) {
  // Upper convex hull of (i, log|c_i|); each edge gives a radius and a count.
  std::vector<std::pair<int, long double>> pts;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(c[i]) > 0) pts.emplace_back(static_cast<int>(i), std::log(std::abs(c[i])));
  std::vector<std::pair<int, long double>> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull.back();
      long double cross = (b.first - a.first) * (pt.second - a.second) - (b.second - a.second) * (pt.first - a.first);
      if (cross >= 0) hull.pop_back();
      else break;
    }
    hull.push_back(pt);
  }
  std::vector<std::pair<double, int>> segs;
  for (std::size_t k = 1; k < hull.size(); ++k) {
    int len = hull[k].first - hull[k - 1].first;
    double logr = static_cast<double>((hull[k - 1].second - hull[k].second) / len);
    segs.emplace_back(logr, len);
  }
  return segs;
}

RootResult complex_roots(const QPoly& p, const RootOptions& opt) {
  if (p.degree() < 1) throw Error("root finding needs a nonconstant polynomial");
  QPoly q = p;
  int zeros = 0;
  while (q.coeff(0) == 0) {
    q = q / QPoly::x();
    ++zeros;
  }
  RootResult res;
  if (q.degree() >= 1) res = complex_roots(scaled_coeffs(q), opt);
  res.roots.insert(res.roots.begin(), static_cast<std::size_t>(zeros), Complex(0.0L, 0.0L));
  return res;
}

RootResult complex_roots(std::vector<Complex> c, const RootOptions& opt) {
  while (!c.empty() && c.back() == Complex(0.0L, 0.0L)) c.pop_back();
  if (c.size() < 2) throw Error("root finding needs a nonconstant polynomial");
  RootResult res;
  std::size_t zeros = 0;
  while (c[zeros] == Complex(0.0L, 0.0L)) ++zeros;
  c.erase(c.begin(), c.begin() + static_cast<long>(zeros));
  res.roots.assign(zeros, Complex(0.0L, 0.0L));
  std::size_t n = c.size() - 1;
  if (n == 0) return res;
  if (n == 1) {
    res.roots.push_back(-c[0] / c[1]);
    return res;
  }

  std::vector<Complex> z;
  z.reserve(n);
  int seg_index = 0;
  for (auto [logr, count] : log_radius_segments(c)) {
    long double r = std::exp(static_cast<long double>(logr));
    for (int k = 0; k < count; ++k) {
      long double ang = 2 * std::numbers::pi_v<long double> * k / count + 0.4L + 0.7L * seg_index;
      z.emplace_back(r * std::cos(ang), r * std::sin(ang));
    }
    ++seg_index;
  }

  const long double eps = std::numeric_limits<long double>::epsilon();
  std::vector<bool> done(n, false);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    bool all = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      Complex ratio = newton_ratio(c, z[i]);
      Complex s = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s += 1.0L / (z[i] - z[j]);
      Complex w = ratio / (1.0L - ratio * s);
      if (!std::isfinite(std::abs(w))) w = ratio;
      z[i] -= w;
      if (std::abs(w) <= 8 * eps * std::max(1.0L, std::abs(z[i]))) done[i] = true;
      else all = false;
    }
    if (all) break;
  }
  res.iterations = it;
  for (auto& zi : z) res.max_residual = std::max(res.max_residual, relative_residual(c, zi));
  if (res.max_residual > opt.rel_residual) {
    std::ostringstream msg;
    msg << "root finder did not converge (relative residual " << static_cast<double>(res.max_residual) << ")";
    throw Error(msg.str());
  }
  res.roots.insert(res.roots.end(), z.begin(), z.end());
  return res;
}

NewtonPolygon newton_polygon(const QPoly& p, const Integer& prime) {
  if (p.is_zero()) throw Error("Newton polygon of zero");
  NewtonPolygon np;
  std::vector<std::pair<int, long>> pts;
  for (int i = 0; i <= p.degree(); ++i)
    if (p[i] != 0) pts.emplace_back(i, valuation(p[i], prime));
  np.zero_roots = pts.front().first;
  // Lower convex hull.
  std::vector<std::pair<int, long>> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull.back();
      long cross = static_cast<long>(b.first - a.first) * (pt.second - a.second) -
                   (b.second - a.second) * static_cast<long>(pt.first - a.first);
      if (cross <= 0) hull.pop_back();
      else break;
    }
    hull.push_back(pt);
  }
  for (std::size_t k = 1; k < hull.size(); ++k) {
    int len = hull[k].first - hull[k - 1].first;
    Rational v(hull[k - 1].second - hull[k].second, len);
    v.canonicalize();
    np.slopes.emplace_back(v, len);
  }
  std::sort(np.slopes.begin(), np.slopes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return np;
}

}  // namespace adelic
