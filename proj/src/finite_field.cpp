#include "adelic/finite_field.hpp"

#include <algorithm>
#include <random>

namespace adelic {

namespace {

using Elem = FiniteField::Elem;

// Digit vectors for building GF(p^k) tables: element = sum d_i p^i.
std::vector<std::uint32_t> digits(std::uint32_t v, std::uint32_t p, std::uint32_t k) {
  std::vector<std::uint32_t> d(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    d[i] = v % p;
    v /= p;
  }
  return d;
}

std::uint32_t undigits(const std::vector<std::uint32_t>& d, std::uint32_t p) {
  std::uint32_t v = 0;
  for (std::size_t i = d.size(); i-- > 0;) v = v * p + d[i];
  return v;
}

// Multiply two residues modulo a monic degree-k polynomial over F_p.
std::vector<std::uint32_t> mul_mod(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                                   const std::vector<std::uint32_t>& modulus, std::uint32_t p) {
  std::size_t k = modulus.size() - 1;
  std::vector<std::uint64_t> prod(2 * k, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + std::uint64_t(a[i]) * b[j]) % p;
  for (std::size_t i = 2 * k - 1; i >= k; --i) {
    std::uint64_t c = prod[i];
    if (!c) continue;
    for (std::size_t j = 0; j <= k; ++j) prod[i - k + j] = (prod[i - k + j] + (p - c) * modulus[j]) % p;
  }
  return std::vector<std::uint32_t>(prod.begin(), prod.begin() + static_cast<long>(k));
}

bool has_factor_of_degree_at_most(const std::vector<std::uint32_t>& f, std::uint32_t p, std::size_t maxdeg) {
  // Brute force trial division by monic polynomials; only used to pick the
  // defining modulus of a small extension.
  std::size_t n = f.size() - 1;
  for (std::size_t d = 1; d <= maxdeg; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      std::vector<std::uint32_t> g(d + 1);
      std::uint64_t t = idx;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = static_cast<std::uint32_t>(t % p);
        t /= p;
      }
      g[d] = 1;
      std::vector<std::int64_t> r(f.begin(), f.end());
      for (std::size_t i = n; i >= d && i <= n; --i) {
        std::int64_t c = ((r[i] % p) + p) % p;
        if (c)
          for (std::size_t j = 0; j <= d; ++j) r[i - d + j] = ((r[i - d + j] - c * g[j]) % std::int64_t(p) + p) % p;
        if (i == d) break;
      }
      bool zero = true;
      for (std::size_t i = 0; i < d; ++i) zero = zero && (r[i] % std::int64_t(p) == 0);
      if (zero) return true;
    }
  }
  return false;
}

}  // namespace

FiniteField::FiniteField(std::uint32_t q) : q_(q) {
  if (q < 2 || q >= (1u << 16)) throw Error("field order out of range");
  std::uint32_t p = 0;
  for (std::uint32_t d = 2; d <= q; ++d)
    if (q % d == 0) {
      p = d;
      break;
    }
  std::uint32_t k = 0, t = q;
  while (t % p == 0) {
    t /= p;
    ++k;
  }
  if (t != 1) throw Error("field order must be a prime power");
  p_ = p;
  k_ = k;

  // Defining modulus: first monic irreducible of degree k (lexicographic).
  std::vector<std::uint32_t> modulus(k + 1, 0);
  modulus[k] = 1;
  if (k > 1) {
    for (std::uint32_t idx = 0; idx < q; ++idx) {
      auto d = digits(idx, p, k);
      std::copy(d.begin(), d.end(), modulus.begin());
      if (modulus[0] != 0 && !has_factor_of_degree_at_most(modulus, p, k / 2)) break;
    }
  }

  exp_.assign(2 * q, 0);
  log_.assign(q, 0);
  auto times = [&](std::uint32_t a, std::uint32_t b) -> std::uint32_t {
    if (k == 1) return static_cast<std::uint32_t>((std::uint64_t(a) * b) % p);
    return undigits(mul_mod(digits(a, p, k), digits(b, p, k), modulus, p), p);
  };
  for (std::uint32_t g = 2; g <= q; ++g) {
    std::uint32_t gen = (q == 2) ? 1 : g;
    if (gen >= q) break;
    std::uint32_t x = 1, order = 0;
    do {
      x = times(x, gen);
      ++order;
    } while (x != 1 && order < q);
    if (order == q - 1) {
      x = 1;
      for (std::uint32_t i = 0; i < 2 * q; ++i) {
        exp_[i] = x;
        if (i < q - 1) log_[x] = i;
        x = times(x, gen);
      }
      return;
    }
    if (q == 2) break;
  }
  throw Error("failed to find a primitive element");
}

Elem FiniteField::add(Elem a, Elem b) const {
  if (k_ == 1) return (a + b) % p_;
  Elem r = 0, mult = 1;
  for (std::uint32_t i = 0; i < k_; ++i) {
    r += ((a % p_ + b % p_) % p_) * mult;
    a /= p_;
    b /= p_;
    mult *= p_;
  }
  return r;
}

Elem FiniteField::neg(Elem a) const {
  if (k_ == 1) return a == 0 ? 0 : p_ - a;
  Elem r = 0, mult = 1;
  for (std::uint32_t i = 0; i < k_; ++i) {
    Elem d = a % p_;
    r += (d == 0 ? 0 : p_ - d) * mult;
    a /= p_;
    mult *= p_;
  }
  return r;
}

Elem FiniteField::sub(Elem a, Elem b) const { return add(a, neg(b)); }

Elem FiniteField::mul(Elem a, Elem b) const {
  if (a == 0 || b == 0) return 0;
  return exp_[log_[a] + log_[b]];
}

Elem FiniteField::inv(Elem a) const {
  if (a == 0) throw Error("inverse of zero in finite field");
  return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

Elem FiniteField::pow(Elem a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  return exp_[(std::uint64_t(log_[a]) * (e % (q_ - 1))) % (q_ - 1)];
}

Elem FiniteField::from_int(long v) const {
  long m = v % static_cast<long>(p_);
  if (m < 0) m += p_;
  return static_cast<Elem>(m);
}

namespace fq {

int degree(const FqPoly& a) { return static_cast<int>(a.size()) - 1; }

void trim(FqPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

FqPoly add(const FiniteField& F, const FqPoly& a, const FqPoly& b) {
  FqPoly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

FqPoly sub(const FiniteField& F, const FqPoly& a, const FqPoly& b) {
  FqPoly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

FqPoly mul(const FiniteField& F, const FqPoly& a, const FqPoly& b) {
  if (a.empty() || b.empty()) return {};
  FqPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (b[j]) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  }
  trim(r);
  return r;
}

FqPoly scale(const FiniteField& F, const FqPoly& a, Elem s) {
  FqPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = F.mul(a[i], s);
  trim(r);
  return r;
}

void divmod(const FiniteField& F, const FqPoly& a, const FqPoly& b, FqPoly& q, FqPoly& r) {
  if (b.empty()) throw Error("polynomial division by zero");
  r = a;
  trim(r);
  int db = degree(b);
  if (degree(r) < db) {
    q.clear();
    return;
  }
  q.assign(static_cast<std::size_t>(degree(r) - db) + 1, 0);
  Elem inv_lc = F.inv(b.back());
  for (int i = degree(r); i >= db; --i) {
    Elem c = F.mul(r[static_cast<std::size_t>(i)], inv_lc);
    if (!c) continue;
    q[static_cast<std::size_t>(i - db)] = c;
    for (int j = 0; j <= db; ++j) {
      auto idx = static_cast<std::size_t>(i - db + j);
      r[idx] = F.sub(r[idx], F.mul(c, b[static_cast<std::size_t>(j)]));
    }
  }
  r.resize(static_cast<std::size_t>(db));
  trim(r);
  trim(q);
}

FqPoly rem(const FiniteField& F, const FqPoly& a, const FqPoly& b) {
  FqPoly q, r;
  divmod(F, a, b, q, r);
  return r;
}

FqPoly quo(const FiniteField& F, const FqPoly& a, const FqPoly& b) {
  FqPoly q, r;
  divmod(F, a, b, q, r);
  return q;
}

FqPoly monic(const FiniteField& F, const FqPoly& a) {
  if (a.empty()) return a;
  return scale(F, a, F.inv(a.back()));
}

FqPoly gcd(const FiniteField& F, FqPoly a, FqPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    FqPoly r = rem(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(F, a);
}

FqPoly xgcd(const FiniteField& F, const FqPoly& a, const FqPoly& b, FqPoly& s, FqPoly& t) {
  FqPoly r0 = a, r1 = b, s0{1}, s1, t0, t1{1};
  trim(r0);
  trim(r1);
  while (!r1.empty()) {
    FqPoly q, r;
    divmod(F, r0, r1, q, r);
    FqPoly s2 = sub(F, s0, mul(F, q, s1));
    FqPoly t2 = sub(F, t0, mul(F, q, t1));
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.empty()) {
    s.clear();
    t.clear();
    return r0;
  }
  Elem inv = F.inv(r0.back());
  s = scale(F, s0, inv);
  t = scale(F, t0, inv);
  return scale(F, r0, inv);
}

FqPoly derivative(const FiniteField& F, const FqPoly& a) {
  if (a.size() <= 1) return {};
  FqPoly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = F.mul(a[i], F.from_int(static_cast<long>(i % F.characteristic())));
  trim(r);
  return r;
}

FqPoly powmod(const FiniteField& F, const FqPoly& a, const Integer& e, const FqPoly& m) {
  FqPoly result{1};
  result = rem(F, result, m);
  FqPoly base = rem(F, a, m);
  std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    result = rem(F, mul(F, result, result), m);
    if (mpz_tstbit(e.get_mpz_t(), i)) result = rem(F, mul(F, result, base), m);
  }
  return result;
}

namespace {

bool lex_less_fq(const FqPoly& a, const FqPoly& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

FqPoly pth_root(const FiniteField& F, const FqPoly& a) {
  std::uint32_t p = F.characteristic();
  std::uint64_t root_exp = 1;
  for (std::uint32_t i = 1; i < F.degree(); ++i) root_exp *= p;  // a^(q/p) is the p-th root
  FqPoly r(a.size() / p + 1, 0);
  for (std::size_t i = 0; i < a.size(); i += p) r[i / p] = F.pow(a[i], root_exp);
  trim(r);
  return r;
}

void squarefree(const FiniteField& F, const FqPoly& f, int mult, std::vector<std::pair<FqPoly, int>>& out) {
  if (degree(f) < 1) return;
  FqPoly c = gcd(F, f, derivative(F, f));
  FqPoly w = quo(F, f, c);
  int i = 1;
  while (degree(w) > 0) {
    FqPoly y = gcd(F, w, c);
    FqPoly z = quo(F, w, y);
    if (degree(z) > 0) out.emplace_back(monic(F, z), i * mult);
    ++i;
    w = y;
    c = quo(F, c, y);
  }
  if (degree(c) > 0) squarefree(F, pth_root(F, c), mult * static_cast<int>(F.characteristic()), out);
}

std::vector<std::pair<FqPoly, int>> distinct_degree(const FiniteField& F, FqPoly g) {
  std::vector<std::pair<FqPoly, int>> res;
  FqPoly x{0, 1};
  FqPoly h = x;
  Integer q(F.order());
  for (int i = 1; degree(g) >= 2 * i; ++i) {
    h = powmod(F, h, q, g);
    FqPoly d = gcd(F, sub(F, h, x), g);
    if (degree(d) > 0) {
      res.emplace_back(d, i);
      g = quo(F, g, d);
      h = rem(F, h, g);
    }
  }
  if (degree(g) > 0) res.emplace_back(monic(F, g), degree(g));
  return res;
}

void equal_degree(const FiniteField& F, const FqPoly& f, int d, std::mt19937_64& rng, std::vector<FqPoly>& out) {
  int n = degree(f);
  if (n == d) {
    out.push_back(monic(F, f));
    return;
  }
  std::uniform_int_distribution<std::uint32_t> coin(0, F.order() - 1);
  Integer qd;
  mpz_ui_pow_ui(qd.get_mpz_t(), F.order(), static_cast<unsigned long>(d));
  while (true) {
    FqPoly a(static_cast<std::size_t>(n));
    for (auto& v : a) v = coin(rng);
    trim(a);
    if (degree(a) < 1) continue;
    FqPoly b;
    if (F.characteristic() == 2) {
      // Absolute trace to F_2: a + a^2 + ... + a^(2^(k d - 1)).
      FqPoly t = a, acc = a;
      std::uint32_t steps = F.degree() * static_cast<std::uint32_t>(d);
      for (std::uint32_t i = 1; i < steps; ++i) {
        t = rem(F, mul(F, t, t), f);
        acc = add(F, acc, t);
      }
      b = acc;
    } else {
      Integer e = (qd - 1) / 2;
      b = sub(F, powmod(F, a, e, f), FqPoly{1});
    }
    FqPoly g = gcd(F, b, f);
    if (degree(g) > 0 && degree(g) < n) {
      equal_degree(F, g, d, rng, out);
      equal_degree(F, quo(F, f, g), d, rng, out);
      return;
    }
  }
}

}  // namespace

std::vector<std::pair<FqPoly, int>> factor(const FiniteField& F, const FqPoly& a0) {
  FqPoly a = a0;
  trim(a);
  if (a.empty()) throw Error("cannot factor the zero polynomial");
  std::vector<std::pair<FqPoly, int>> sqf;
  squarefree(F, monic(F, a), 1, sqf);
  std::mt19937_64 rng(0x5eed);
  std::vector<std::pair<FqPoly, int>> out;
  for (const auto& [g, mult] : sqf) {
    for (const auto& [block, d] : distinct_degree(F, g)) {
      std::vector<FqPoly> pieces;
      equal_degree(F, block, d, rng, pieces);
      for (auto& piece : pieces) out.emplace_back(std::move(piece), mult);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return lex_less_fq(x.first, y.first); });
  // Merge equal factors that arrived from different squarefree layers.
  std::vector<std::pair<FqPoly, int>> merged;
  for (auto& e : out) {
    if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
    else merged.push_back(std::move(e));
  }
  return merged;
}

std::vector<int> factor_degrees(const FiniteField& F, const FqPoly& a) {
  std::vector<int> degs;
  for (const auto& [block, d] : distinct_degree(F, monic(F, a)))
    for (int i = 0; i < degree(block) / d; ++i) degs.push_back(d);
  std::sort(degs.begin(), degs.end());
  return degs;
}

bool is_irreducible(const FiniteField& F, const FqPoly& a) {
  if (degree(a) < 1) return false;
  if (degree(gcd(F, a, derivative(F, a))) > 0) return false;
  auto degs = factor_degrees(F, a);
  return degs.size() == 1;
}

std::string to_string(const FqPoly& a, char var) {
  if (a.empty()) return "0";
  std::string out;
  for (int i = degree(a); i >= 0; --i) {
    Elem c = a[static_cast<std::size_t>(i)];
    if (!c) continue;
    if (!out.empty()) out += "+";
    if (c != 1 || i == 0) out += std::to_string(c);
    if (i > 0) {
      if (c != 1) out += "*";
      out += var;
      if (i > 1) out += "^" + std::to_string(i);
    }
  }
  return out;
}

}  // namespace fq

}  // namespace adelic
