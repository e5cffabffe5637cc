#include "adelic/factor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "adelic/finite_field.hpp"

namespace adelic {

namespace {

using ZPoly = std::vector<Integer>;

void ztrim(ZPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int zdeg(const ZPoly& a) { return static_cast<int>(a.size()) - 1; }

Integer content(const ZPoly& a) {
  Integer g = 0;
  for (const auto& c : a) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

Integer symmetric_mod(const Integer& v, const Integer& m) {
  Integer r = v % m;
  if (r < 0) r += m;
  if (2 * r > m) r -= m;
  return r;
}

ZPoly zmul_mod(const ZPoly& a, const ZPoly& b, const Integer& m) {
  if (a.empty() || b.empty()) return {};
  ZPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  for (auto& c : r) {
    c %= m;
    if (c < 0) c += m;
  }
  ztrim(r);
  return r;
}

FqPoly to_fp(const ZPoly& a, std::uint32_t p) {
  FqPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    Integer c = a[i] % p;
    if (c < 0) c += p;
    r[i] = static_cast<std::uint32_t>(c.get_ui());
  }
  fq::trim(r);
  return r;
}

ZPoly from_fp(const FqPoly& a) {
  ZPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  return r;
}

bool small_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Exact division of integer polynomials (divisor need not be monic); returns
// false when the quotient is not integral or the remainder is nonzero.
bool zdivide(const ZPoly& a, const ZPoly& b, ZPoly& q) {
  ZPoly r = a;
  int da = zdeg(r), db = zdeg(b);
  if (db < 0) return false;
  if (da < db) {
    if (da < 0) {
      q.clear();
      return true;
    }
    return false;
  }
  q.assign(static_cast<std::size_t>(da - db) + 1, 0);
  const Integer& lc = b.back();
  for (int i = da; i >= db; --i) {
    Integer& top = r[static_cast<std::size_t>(i)];
    if (top == 0) continue;
    if (!mpz_divisible_p(top.get_mpz_t(), lc.get_mpz_t())) return false;
    Integer f = top / lc;
    q[static_cast<std::size_t>(i - db)] = f;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(i - db + j)] -= f * b[static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < db; ++i)
    if (r[static_cast<std::size_t>(i)] != 0) return false;
  ztrim(q);
  return true;
}

ZPoly primitive(ZPoly a) {
  ztrim(a);
  if (a.empty()) return a;
  Integer g = content(a);
  if (a.back() < 0) g = -g;
  for (auto& c : a) c /= g;
  return a;
}

// Possible factor degrees from a modular factor degree pattern.
std::vector<bool> subset_sums(const std::vector<int>& degs, int n) {
  std::vector<bool> ok(static_cast<std::size_t>(n) + 1, false);
  ok[0] = true;
  for (int d : degs)
    for (int s = n; s >= d; --s)
      if (ok[static_cast<std::size_t>(s - d)]) ok[static_cast<std::size_t>(s)] = true;
  return ok;
}

struct ModularChoice {
  std::uint32_t p = 0;
  std::vector<FqPoly> factors;
};

// Lift monic factors g_i of F = lc^{-1} f mod p to monic factors mod p^a.
std::vector<ZPoly> hensel_lift(const ZPoly& f, const FiniteField& Fp, const std::vector<FqPoly>& g, std::uint32_t p,
                               unsigned a, Integer& modulus) {
  std::size_t r = g.size();
  // Partial fraction coefficients s_i with sum s_i prod_{j!=i} g_j = 1 mod p.
  std::vector<FqPoly> s(r);
  for (std::size_t i = 0; i < r; ++i) {
    FqPoly others{1};
    for (std::size_t j = 0; j < r; ++j)
      if (j != i) others = fq::mul(Fp, others, g[j]);
    FqPoly u, v;
    fq::xgcd(Fp, fq::rem(Fp, others, g[i]), g[i], u, v);
    s[i] = u;
  }
  Integer full;
  mpz_ui_pow_ui(full.get_mpz_t(), p, a);
  Integer lc_inv;
  Integer lc = f.back() % full;
  if (lc < 0) lc += full;
  mpz_invert(lc_inv.get_mpz_t(), lc.get_mpz_t(), full.get_mpz_t());
  ZPoly F(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    F[i] = (f[i] * lc_inv) % full;
    if (F[i] < 0) F[i] += full;
  }

  std::vector<ZPoly> G(r);
  for (std::size_t i = 0; i < r; ++i) G[i] = from_fp(g[i]);
  Integer pk = p;
  for (unsigned k = 1; k < a; ++k) {
    Integer next = pk * p;
    ZPoly prod{1};
    for (const auto& gi : G) prod = zmul_mod(prod, gi, next);
    ZPoly e(F.size(), 0);
    for (std::size_t i = 0; i < F.size(); ++i) {
      Integer d = F[i] - (i < prod.size() ? prod[i] : Integer(0));
      d %= next;
      if (d < 0) d += next;
      e[i] = d / pk;
    }
    ztrim(e);
    FqPoly ep = to_fp(e, p);
    if (!ep.empty()) {
      for (std::size_t i = 0; i < r; ++i) {
        FqPoly ai = fq::rem(Fp, fq::mul(Fp, ep, s[i]), g[i]);
        for (std::size_t j = 0; j < ai.size(); ++j) G[i][j] += pk * ai[j];
      }
    }
    pk = next;
  }
  modulus = full;
  return G;
}

std::vector<ZPoly> zassenhaus(const ZPoly& f, const FactorOptions& opt) {
  int n = zdeg(f);
  if (n <= 1) return {f};
  if (n > opt.max_zassenhaus_degree) throw Error("polynomial degree beyond factorization budget");

  // Try a handful of primes; intersect possible factor degrees and keep the
  // prime with the fewest modular factors.
  std::vector<bool> possible(static_cast<std::size_t>(n) + 1, true);
  ModularChoice best;
  int tried = 0;
  for (std::uint32_t p = 3; p < 65521 && tried < 6; p += 2) {
    if (!small_prime(p)) continue;
    if (mpz_divisible_ui_p(f.back().get_mpz_t(), p)) continue;
    FiniteField Fp(p);
    FqPoly fp = fq::monic(Fp, to_fp(f, p));
    if (fq::degree(fq::gcd(Fp, fp, fq::derivative(Fp, fp))) > 0) continue;
    ++tried;
    auto degs = fq::factor_degrees(Fp, fp);
    auto sums = subset_sums(degs, n);
    for (int d = 0; d <= n; ++d) possible[static_cast<std::size_t>(d)] = possible[static_cast<std::size_t>(d)] && sums[static_cast<std::size_t>(d)];
    if (best.p == 0 || degs.size() < best.factors.size()) {
      best.p = p;
      best.factors.clear();
      for (auto& [g, m] : fq::factor(Fp, fp)) best.factors.push_back(g);
    }
    bool irreducible = true;
    for (int d = 1; d < n; ++d) irreducible = irreducible && !possible[static_cast<std::size_t>(d)];
    if (irreducible) return {f};
  }
  if (best.p == 0) throw Error("no suitable prime for modular factorization");
  if (best.factors.size() == 1) return {f};

  // Mignotte-style bound on coefficients of lc * (factor).
  Integer norm2 = 0;
  for (const auto& c : f) norm2 += c * c;
  Integer root;
  mpz_sqrt(root.get_mpz_t(), norm2.get_mpz_t());
  Integer bound = abs(f.back()) * (root + 1);
  mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), static_cast<unsigned long>(n));
  bound = 2 * bound + 1;
  unsigned a = 1;
  Integer pa = best.p;
  while (pa <= bound) {
    pa *= best.p;
    ++a;
  }
  FiniteField Fp(best.p);
  Integer M;
  std::vector<ZPoly> lifted = hensel_lift(f, Fp, best.factors, best.p, a, M);

  std::vector<ZPoly> found;
  ZPoly rest = f;
  std::vector<ZPoly> pool = lifted;
  long budget = opt.max_recombinations;
  std::size_t s = 1;
  while (2 * s <= pool.size()) {
    bool progress = false;
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    while (true) {
      if (--budget < 0) throw Error("factor recombination budget exceeded");
      int d = 0;
      for (auto i : idx) d += zdeg(pool[i]);
      bool try_it = d <= zdeg(rest) && possible[static_cast<std::size_t>(std::min(d, n))];
      ZPoly cand;
      if (try_it) {
        // Constant term test before the full product.
        Integer c0 = rest.back();
        for (auto i : idx) c0 = (c0 * pool[i][0]) % M;
        c0 = symmetric_mod(c0, M);
        Integer t0 = rest.back() * rest[0];
        try_it = c0 != 0 && mpz_divisible_p(t0.get_mpz_t(), c0.get_mpz_t());
      }
      if (try_it) {
        cand = ZPoly{rest.back()};
        for (auto i : idx) cand = zmul_mod(cand, pool[i], M);
        for (auto& c : cand) c = symmetric_mod(c, M);
        cand = primitive(cand);
        ZPoly q;
        if (zdivide(rest, cand, q)) {
          found.push_back(cand);
          rest = primitive(q);
          std::vector<ZPoly> keep;
          for (std::size_t i = 0; i < pool.size(); ++i)
            if (std::find(idx.begin(), idx.end(), i) == idx.end()) keep.push_back(pool[i]);
          pool = std::move(keep);
          progress = true;
          break;
        }
      }
      // Next combination.
      std::size_t k = s;
      while (k > 0 && idx[k - 1] == pool.size() - s + k - 1) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (!progress) ++s;
  }
  if (zdeg(rest) > 0) found.push_back(rest);
  return found;
}

std::map<unsigned, ZPoly>& cyclotomic_cache() {
  static std::map<unsigned, ZPoly> cache;
  return cache;
}
std::mutex cyclotomic_mutex;

// Multiply by (z^d - 1) or divide exactly by it.
void mul_zd_minus_1(ZPoly& a, unsigned d) {
  ZPoly r(a.size() + d, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    r[i + d] += a[i];
    r[i] -= a[i];
  }
  a = std::move(r);
}

void div_zd_minus_1(ZPoly& a, unsigned d) {
  // a = q (z^d - 1): q_i = -(a_i) + q_{i-d}
  std::size_t n = a.size() - d;
  ZPoly q(n, 0);
  for (std::size_t i = 0; i < n; ++i) q[i] = -a[i] + (i >= d ? q[i - d] : Integer(0));
  a = std::move(q);
}

int mobius(unsigned n) {
  int mu = 1;
  for (unsigned p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

// Split off every cyclotomic factor; a numeric root test picks candidates and
// exact division confirms.
void extract_cyclotomic(ZPoly& f, std::vector<ZPoly>& out) {
  int n = zdeg(f);
  if (n < 1) return;
  // Cyclotomic factors force |a_0| = |lc| on the cofactor side only loosely;
  // the numeric screen is cheap so just run it.
  std::vector<std::complex<long double>> c(f.size());
  long double scale = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    long e = 0;
    double m = f[i] == 0 ? 0.0 : mpz_get_d_2exp(&e, f[i].get_mpz_t());
    c[i] = std::ldexp(static_cast<long double>(m), static_cast<int>(std::min(e, 16000L)));
    scale += std::abs(c[i]);
  }
  if (!std::isfinite(static_cast<double>(scale))) return;
  // Rosser-Schoenfeld: phi(m) > m / (e^gamma lnln m + 3 / lnln m) for m >= 3.
  unsigned limit = 30;
  while (true) {
    double ll = std::log(std::log(static_cast<double>(limit)));
    if (limit / (1.7811 * ll + 3.0 / ll) > n) break;
    ++limit;
  }
  for (unsigned m = 1; m <= limit && zdeg(f) >= 1; ++m) {
    if (euler_phi(m) > static_cast<unsigned>(zdeg(f))) continue;
    long double ang = 2 * std::numbers::pi_v<long double> / m;
    std::complex<long double> zeta(std::cos(ang), std::sin(ang));
    std::complex<long double> acc = 0;
    for (std::size_t i = f.size(); i-- > 0;) acc = acc * zeta + c[i];
    if (std::abs(acc) > 1e-9L * scale) continue;
    ZPoly phi = cyclotomic(m);
    ZPoly q;
    while (zdivide(f, phi, q)) {
      out.push_back(phi);
      f = q;
      c.assign(f.size(), 0);
      scale = 0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        long e = 0;
        double mm = f[i] == 0 ? 0.0 : mpz_get_d_2exp(&e, f[i].get_mpz_t());
        c[i] = std::ldexp(static_cast<long double>(mm), static_cast<int>(e));
        scale += std::abs(c[i]);
      }
    }
  }
}

void irreducible_factors(ZPoly f, const FactorOptions& opt, std::vector<ZPoly>& out) {
  f = primitive(f);
  if (zdeg(f) < 1) return;
  if (zdeg(f) == 1 || eisenstein_prime(f) != 0) {
    out.push_back(f);
    return;
  }
  extract_cyclotomic(f, out);
  f = primitive(f);
  if (zdeg(f) < 1) return;
  if (zdeg(f) == 1 || eisenstein_prime(f) != 0) {
    out.push_back(f);
    return;
  }
  for (auto& g : zassenhaus(f, opt)) out.push_back(primitive(g));
}

}  // namespace

unsigned euler_phi(unsigned m) {
  unsigned r = m, n = m;
  for (unsigned p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    r -= r / p;
  }
  if (n > 1) r -= r / n;
  return r;
}

std::vector<Integer> cyclotomic(unsigned m) {
  if (m == 0) throw Error("cyclotomic index must be positive");
  {
    std::lock_guard<std::mutex> lock(cyclotomic_mutex);
    auto it = cyclotomic_cache().find(m);
    if (it != cyclotomic_cache().end()) return it->second;
  }
  // Product over divisors d of (z^d - 1)^{mu(m/d)}: multiply first, then divide.
  ZPoly r{1};
  std::vector<unsigned> divs;
  for (unsigned d = 1; d <= m; ++d)
    if (m % d == 0) divs.push_back(d);
  for (unsigned d : divs)
    if (mobius(m / d) == 1) mul_zd_minus_1(r, d);
  for (unsigned d : divs)
    if (mobius(m / d) == -1) div_zd_minus_1(r, d);
  ztrim(r);
  std::lock_guard<std::mutex> lock(cyclotomic_mutex);
  cyclotomic_cache()[m] = r;
  return r;
}

Integer eisenstein_prime(const std::vector<Integer>& z0) {
  ZPoly z = z0;
  ztrim(z);
  if (zdeg(z) < 1) return 0;
  ZPoly lower(z.begin(), z.end() - 1);
  Integer g = content(lower);
  if (g == 0 || abs(g) == 1) return 0;
  for (const auto& p : prime_factors(g)) {
    if (mpz_divisible_p(z.back().get_mpz_t(), p.get_mpz_t())) continue;
    Integer p2 = p * p;
    if (mpz_divisible_p(z[0].get_mpz_t(), p2.get_mpz_t())) continue;
    return p;
  }
  return 0;
}

std::vector<std::pair<QPoly, int>> factor(const QPoly& p, const FactorOptions& opt) {
  if (p.is_zero()) throw Error("cannot factor the zero polynomial");
  std::vector<std::pair<QPoly, int>> result;
  if (p.degree() < 1) return result;

  QPoly f = p.monic();
  int zero_mult = 0;
  while (f.coeff(0) == 0) {
    f = f / QPoly::x();
    ++zero_mult;
  }
  if (zero_mult) result.emplace_back(QPoly::x(), zero_mult);

  // Yun squarefree decomposition over Q.
  int i = 1;
  QPoly c = gcd(f, f.derivative());
  QPoly w = f / c;
  while (w.degree() > 0) {
    QPoly y = gcd(w, c);
    QPoly z = w / y;
    if (z.degree() > 0) {
      std::vector<ZPoly> parts;
      irreducible_factors(z.primitive_integer(), opt, parts);
      for (auto& part : parts) result.emplace_back(QPoly::from_integer(part).monic(), i);
    }
    ++i;
    w = y;
    c = c / y;
  }
  std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
  return result;
}

bool is_irreducible(const QPoly& p, const FactorOptions& opt) {
  if (p.degree() < 1) return false;
  auto fs = factor(p, opt);
  return fs.size() == 1 && fs[0].second == 1;
}

}  // namespace adelic
