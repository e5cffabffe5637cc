#include "adelic/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adelic {

namespace {

using RMatrix = std::vector<std::vector<Rational>>;

RMatrix rational_inverse(RMatrix a) {
  std::size_t n = a.size();
  RMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw Error("lattice basis must be square");
    inv[i][i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw Error("norm not definite");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    Rational s = 1 / a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] *= s;
      inv[c][j] *= s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

double log_abs_at(const Rational& x, const Place& w) {
  if (w.archimedean()) return log_abs(x);
  if (w.kind != PlaceKind::Prime) throw Error("exact norms need a place of Q");
  return -static_cast<double>(valuation(x, w.prime)) * w.log_base;
}

// k-subsets of {0..r-1} in lexicographic order.
std::vector<std::vector<int>> subsets(int r, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  if (k > r) return out;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == r - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

// Maximal minors of a k x r rational matrix, indexed like subsets(r, k).
std::vector<Rational> maximal_minors(const RMatrix& m, int r) {
  int k = static_cast<int>(m.size());
  std::vector<Rational> out;
  for (const auto& I : subsets(r, k)) {
    RMatrix sub(static_cast<std::size_t>(k), std::vector<Rational>(static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub[i][j] = m[i][I[j]];
    out.push_back(rational_det(sub));
  }
  return out;
}

// Measure of a subspace: Q = prod_w ||wedge||_w^2 (exact mode) or ln Q
// weighted by the place masses (float mode).
struct SubspaceMeasure {
  bool exact = true;
  Rational q = 1;
  double log_q = 0;
  int k = 0;
};

SubspaceMeasure subspace_measure(const AdelicVectorBundle& b, const std::vector<std::vector<Integer>>& vectors) {
  const int r = b.dimension();
  const int k = static_cast<int>(vectors.size());
  if (k < 1 || k > r) throw Error("subspace dimension out of range");
  RMatrix W(static_cast<std::size_t>(k), std::vector<Rational>(static_cast<std::size_t>(r)));
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(vectors[i].size()) != r) throw Error("vector dimension mismatch");
    for (int j = 0; j < r; ++j) W[i][j] = Rational(vectors[i][j]);
  }
  const auto I = subsets(r, k);
  const auto P = maximal_minors(W, r);
  if (std::all_of(P.begin(), P.end(), [](const Rational& x) { return x == 0; }))
    throw Error("spanning vectors are linearly dependent");

  const AdelicCurve& C = b.curve();
  if (C.base() == BaseKind::FqT) throw Error("the slope oracle supports Q and weighted-copies curves");
  SubspaceMeasure out;
  out.k = k;
  out.exact = b.exact() && C.base() == BaseKind::Q;

  std::vector<Place> places;
  if (auto all = C.all_places()) places = *all;
  else {
    places = C.infinite_places();
    for (const auto& [id, n] : b.norms()) {
      Place w = C.place(id);
      if (std::find(places.begin(), places.end(), w) == places.end()) places.push_back(w);
    }
  }

  auto lambda_prod = [&](const LocalNorm& n, const std::vector<int>& idx) {
    Rational s = 1;
    for (int i : idx) s *= n.lambda()[i];
    return s;
  };
  auto log_lambda_sum = [&](const LocalNorm& n, const Place& w, const std::vector<int>& idx) {
    auto ld = n.log_diagonal(w);
    double s = 0;
    for (int i : idx) s += ld[i];
    return s;
  };

  Integer g = 0;  // gcd of the integer Plucker coordinates
  for (const auto& x : P) g = gcd(g, Integer(x.get_num()));

  Rational listed_gpart = 1;
  for (const auto& w : places) {
    LocalNorm n = b.norm_at(w.id);
    if (w.archimedean()) {
      if (out.exact && n.kind() == LocalNorm::Kind::Diagonal && !n.lambda().empty()) {
        Rational s = 0;
        for (std::size_t j = 0; j < I.size(); ++j) {
          Rational l = lambda_prod(n, I[j]);
          s += P[j] * P[j] * l * l;
        }
        out.q *= s;
      }
      double lq;
      if (n.kind() == LocalNorm::Kind::Hermitian) {
        Matrix G(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
        for (int a = 0; a < k; ++a)
          for (int c = 0; c < k; ++c)
            for (int i = 0; i < r; ++i)
              for (int j = 0; j < r; ++j) G[a][c] += W[a][i].get_d() * n.gram()[i][j] * W[c][j].get_d();
        lq = spd_log_det(G);
      } else {
        double m = -INFINITY;
        std::vector<double> terms;
        for (std::size_t j = 0; j < I.size(); ++j) {
          if (P[j] == 0) continue;
          double t = 2 * (log_abs(P[j]) + log_lambda_sum(n, w, I[j]));
          terms.push_back(t);
          m = std::max(m, t);
        }
        double s = 0;
        for (double t : terms) s += std::exp(t - m);
        lq = m + std::log(s);
      }
      out.log_q += w.weight * lq;
      continue;
    }
    // Nonarchimedean place of Q.
    if (g != 0) listed_gpart *= pow(Rational(w.prime), static_cast<unsigned long>(valuation(g, w.prime)));
    std::vector<Rational> coords = P;
    if (n.kind() == LocalNorm::Kind::Lattice) {
      RMatrix M(static_cast<std::size_t>(k), std::vector<Rational>(static_cast<std::size_t>(r), Rational(0)));
      const auto& Binv = n.basis_inverse();
      for (int a = 0; a < k; ++a)
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) M[a][i] += Binv[i][j] * W[a][j];
      coords = maximal_minors(M, r);
    }
    double best_log = -INFINITY;
    Rational best = 0;
    for (std::size_t j = 0; j < I.size(); ++j) {
      if (coords[j] == 0) continue;
      if (n.kind() == LocalNorm::Kind::Diagonal && !n.lambda().empty() && out.exact) {
        Rational v = Rational(n.kind() == LocalNorm::Kind::Diagonal ? lambda_prod(n, I[j]) : Rational(1));
        long e = valuation(coords[j], w.prime);
        Rational pe = pow(Rational(w.prime), static_cast<unsigned long>(std::labs(e)));
        Rational a = (e >= 0 ? Rational(1 / pe) : pe) * v;
        if (a > best) best = a;
      } else if (n.kind() == LocalNorm::Kind::Lattice && out.exact) {
        long e = valuation(coords[j], w.prime);
        Rational pe = pow(Rational(w.prime), static_cast<unsigned long>(std::labs(e)));
        Rational a = e >= 0 ? Rational(1 / pe) : pe;
        if (a > best) best = a;
      }
      double t = log_abs_at(coords[j], w);
      if (n.kind() == LocalNorm::Kind::Diagonal) t += log_lambda_sum(n, w, I[j]);
      best_log = std::max(best_log, t);
    }
    if (out.exact) out.q *= best * best;
    out.log_q += w.weight * 2 * best_log;
  }
  // Unlisted primes: ||wedge||_p = |g|_p; the product over them is listed_gpart / g.
  if (C.base() == BaseKind::Q) {
    Rational rest = listed_gpart / Rational(g);
    if (out.exact) out.q *= rest * rest;
    out.log_q += 2 * log_abs(rest);
  }
  if (out.exact) out.log_q = log_abs(out.q);
  return out;
}

double slope_of(const SubspaceMeasure& m) { return -m.log_q / (2.0 * m.k); }

// True when a has strictly larger slope than b.
bool steeper(const SubspaceMeasure& a, const SubspaceMeasure& b) {
  if (a.exact && b.exact) {
    Rational lhs = pow(a.q, static_cast<unsigned long>(b.k)), rhs = pow(b.q, static_cast<unsigned long>(a.k));
    return lhs < rhs;
  }
  return slope_of(a) > slope_of(b);
}

bool same_slope(const SubspaceMeasure& a, const SubspaceMeasure& b) {
  if (a.exact && b.exact)
    return pow(a.q, static_cast<unsigned long>(b.k)) == pow(b.q, static_cast<unsigned long>(a.k));
  return slope_of(a) == slope_of(b);
}

std::vector<Integer> primitive_row(const std::vector<Rational>& row) {
  Integer l = 1;
  for (const auto& x : row) l = lcm(l, Integer(x.get_den()));
  std::vector<Integer> v;
  Integer g = 0;
  for (const auto& x : row) {
    Integer z = Integer(x.get_num()) * (l / Integer(x.get_den()));
    v.push_back(z);
    g = gcd(g, z);
  }
  if (g != 0 && g != 1)
    for (auto& z : v) z /= g;
  return v;
}

}  // namespace

// ---------------------------------------------------------------- local norms

LocalNorm LocalNorm::diagonal(std::vector<Rational> lambda) {
  if (lambda.empty()) throw Error("norm needs positive dimension");
  for (const auto& l : lambda)
    if (l <= 0) throw Error("norm not definite");
  LocalNorm n;
  n.dim_ = static_cast<int>(lambda.size());
  n.lambda_ = std::move(lambda);
  return n;
}

LocalNorm LocalNorm::diagonal_log(std::vector<double> log_lambda) {
  if (log_lambda.empty()) throw Error("norm needs positive dimension");
  for (double l : log_lambda)
    if (!std::isfinite(l)) throw Error("norm not definite");
  LocalNorm n;
  n.dim_ = static_cast<int>(log_lambda.size());
  n.log_lambda_ = std::move(log_lambda);
  return n;
}

LocalNorm LocalNorm::lattice(std::vector<std::vector<Rational>> basis) {
  LocalNorm n;
  n.kind_ = Kind::Lattice;
  n.dim_ = static_cast<int>(basis.size());
  if (n.dim_ == 0) throw Error("norm needs positive dimension");
  n.basis_inv_ = rational_inverse(basis);
  n.basis_ = std::move(basis);
  return n;
}

LocalNorm LocalNorm::hermitian(Matrix gram) {
  if (gram.empty() || !is_symmetric(gram) || !cholesky(gram)) throw Error("norm not definite");
  LocalNorm n;
  n.kind_ = Kind::Hermitian;
  n.dim_ = static_cast<int>(gram.size());
  n.gram_ = std::move(gram);
  return n;
}

bool LocalNorm::is_diagonal() const {
  auto offdiag_zero = [&](auto const& m) {
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j)
        if (i != j && m[i][j] != 0) return false;
    return true;
  };
  switch (kind_) {
    case Kind::Diagonal: return true;
    case Kind::Lattice: return offdiag_zero(basis_);
    case Kind::Hermitian: return offdiag_zero(gram_);
  }
  return false;
}

bool LocalNorm::exact() const { return kind_ == Kind::Lattice || (kind_ == Kind::Diagonal && !lambda_.empty()); }

std::vector<double> LocalNorm::log_diagonal(const Place& w) const {
  if (!is_diagonal()) throw Error("requires simultaneously orthogonal family");
  std::vector<double> out(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    switch (kind_) {
      case Kind::Diagonal: out[i] = lambda_.empty() ? log_lambda_[i] : log_abs(lambda_[i]); break;
      case Kind::Lattice:
        if (w.archimedean()) throw Error("lattice norms live at nonarchimedean places");
        out[i] = -log_abs_at(basis_[i][i], w);
        break;
      case Kind::Hermitian: out[i] = 0.5 * std::log(gram_[i][i]); break;
    }
  }
  return out;
}

double LocalNorm::log_det_norm(const Place& w) const {
  switch (kind_) {
    case Kind::Diagonal: {
      double s = 0;
      for (double v : log_diagonal(w)) s += v;
      return s;
    }
    case Kind::Lattice:
      if (w.archimedean()) throw Error("lattice norms live at nonarchimedean places");
      return -log_abs_at(rational_det(basis_), w);
    case Kind::Hermitian: return 0.5 * spd_log_det(gram_);
  }
  return 0;
}

// ---------------------------------------------------------------- bundles

AdelicVectorBundle::AdelicVectorBundle(AdelicCurve curve, int dim, std::map<std::string, LocalNorm> norms,
                                       std::vector<std::string> labels)
    : curve_(std::move(curve)), dim_(dim), labels_(std::move(labels)) {
  if (dim < 1) throw Error("bundle dimension must be positive");
  if (labels_.empty())
    for (int i = 0; i < dim; ++i) labels_.push_back("e" + std::to_string(i));
  if (static_cast<int>(labels_.size()) != dim) throw Error("one label per basis vector");
  for (auto& [id, n] : norms) {
    Place w = curve_.place(id);
    if (n.dimension() != dim) throw Error("bundle dimensions disagree across places");
    if (n.kind() == LocalNorm::Kind::Hermitian && !w.archimedean())
      throw Error("Hermitian norms live at archimedean places");
    if (n.kind() == LocalNorm::Kind::Lattice && w.archimedean())
      throw Error("lattice norms live at nonarchimedean places");
    norms_.insert_or_assign(w.id, n);
  }
}

LocalNorm AdelicVectorBundle::norm_at(const std::string& place_id) const {
  auto it = norms_.find(curve_.place(place_id).id);
  return it == norms_.end() ? LocalNorm::unit(dim_) : it->second;
}

bool AdelicVectorBundle::diagonal() const {
  return std::all_of(norms_.begin(), norms_.end(), [](const auto& kv) { return kv.second.is_diagonal(); });
}

bool AdelicVectorBundle::exact() const {
  return std::all_of(norms_.begin(), norms_.end(), [](const auto& kv) { return kv.second.exact(); });
}

double arithmetic_degree(const AdelicVectorBundle& b) {
  PlaceFunction pf;
  for (const auto& [id, n] : b.norms()) pf.values[id] = -n.log_det_norm(b.curve().place(id));
  return b.curve().integrate(pf);
}

double slope(const AdelicVectorBundle& b) { return arithmetic_degree(b) / b.dimension(); }

double subspace_slope(const AdelicVectorBundle& b, const std::vector<std::vector<Integer>>& vectors) {
  return slope_of(subspace_measure(b, vectors));
}

OracleResult max_slope_bruteforce(const AdelicVectorBundle& b, int height_bound) {
  const int r = b.dimension();
  if (r > 4) throw Error("oracle scale exceeded");
  if (height_bound < 1) throw Error("height bound must be positive");
  std::vector<Rational> E{Rational(0)};
  for (int a = 1; a <= height_bound; ++a)
    for (int c = 1; c <= height_bound; ++c) {
      Rational x(a, c);
      x.canonicalize();
      E.push_back(x);
      E.push_back(-x);
    }
  std::sort(E.begin(), E.end());
  E.erase(std::unique(E.begin(), E.end()), E.end());

  // Count candidates first so oversized searches fail fast.
  double total = 0;
  for (int k = 1; k <= r; ++k)
    for (const auto& piv : subsets(r, k)) {
      int free = 0;
      for (int i = 0; i < k; ++i)
        for (int j = piv[i] + 1; j < r; ++j)
          if (std::find(piv.begin(), piv.end(), j) == piv.end()) ++free;
      total += std::pow(static_cast<double>(E.size()), free);
    }
  if (total > 2e6) throw Error("oracle scale exceeded");

  OracleResult res;
  std::optional<SubspaceMeasure> best;
  for (int k = 1; k <= r; ++k) {
    for (const auto& piv : subsets(r, k)) {
      std::vector<std::pair<int, int>> slots;
      for (int i = 0; i < k; ++i)
        for (int j = piv[i] + 1; j < r; ++j)
          if (std::find(piv.begin(), piv.end(), j) == piv.end()) slots.emplace_back(i, j);
      std::vector<std::size_t> digit(slots.size(), 0);
      while (true) {
        RMatrix rows(static_cast<std::size_t>(k), std::vector<Rational>(static_cast<std::size_t>(r), Rational(0)));
        for (int i = 0; i < k; ++i) rows[i][piv[i]] = 1;
        for (std::size_t s = 0; s < slots.size(); ++s) rows[slots[s].first][slots[s].second] = E[digit[s]];
        std::vector<std::vector<Integer>> vecs;
        for (const auto& row : rows) vecs.push_back(primitive_row(row));
        SubspaceMeasure m = subspace_measure(b, vecs);
        ++res.candidates;
        if (!best || steeper(m, *best) || (same_slope(m, *best) && m.k > best->k)) {
          best = m;
          res.basis = vecs;
        }
        std::size_t s = 0;
        while (s < digit.size() && ++digit[s] == E.size()) digit[s++] = 0;
        if (s == digit.size()) break;
      }
    }
  }
  res.slope = slope_of(*best);
  return res;
}

std::vector<double> line_degrees(const AdelicVectorBundle& b) {
  if (!b.diagonal()) throw Error("requires simultaneously orthogonal family");
  std::vector<double> deg(static_cast<std::size_t>(b.dimension()), 0.0);
  for (int i = 0; i < b.dimension(); ++i) {
    PlaceFunction pf;
    for (const auto& [id, n] : b.norms()) pf.values[id] = -n.log_diagonal(b.curve().place(id))[i];
    deg[i] = b.curve().integrate(pf);
  }
  return deg;
}

std::vector<FiltrationStep> hn_filtration_diagonal(const AdelicVectorBundle& b) {
  if (!b.diagonal()) throw Error("requires simultaneously orthogonal family");
  const int r = b.dimension();
  auto unit = [&](int i) {
    std::vector<Integer> v(static_cast<std::size_t>(r), Integer(0));
    v[i] = 1;
    return v;
  };
  bool use_measure = b.curve().base() != BaseKind::FqT;
  std::vector<double> deg = use_measure ? std::vector<double>() : line_degrees(b);
  std::vector<SubspaceMeasure> m;
  if (use_measure)
    for (int i = 0; i < r; ++i) m.push_back(subspace_measure(b, {unit(i)}));
  std::vector<int> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), 0);
  auto higher = [&](int a, int c) { return use_measure ? steeper(m[a], m[c]) : deg[a] > deg[c]; };
  auto equal = [&](int a, int c) { return use_measure ? same_slope(m[a], m[c]) : deg[a] == deg[c]; };
  std::stable_sort(order.begin(), order.end(), higher);

  std::vector<FiltrationStep> steps;
  std::vector<int> span;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::vector<int> group;
    while (j < order.size() && equal(order[i], order[j])) group.push_back(order[j++]);
    std::sort(group.begin(), group.end());
    FiltrationStep st;
    if (use_measure) {
      std::vector<std::vector<Integer>> vecs;
      for (int g : group) vecs.push_back(unit(g));
      st.threshold = subspace_slope(b, vecs);
    } else {
      st.threshold = deg[group.front()];
    }
    span.insert(span.end(), group.begin(), group.end());
    std::sort(span.begin(), span.end());
    st.indices = span;
    steps.push_back(st);
    i = j;
  }
  return steps;
}

SpectralTrace spectral_norm_diagonal(int k, int n, const std::function<AdelicVectorBundle(int)>& family, int N_max) {
  if (N_max < 1 || n < 1 || k < 0) throw Error("spectral norm needs N_max >= 1, n >= 1, k >= 0");
  SpectralTrace out;
  for (int N = 1; N <= N_max; ++N) {
    AdelicVectorBundle b = family(n * N);
    if (k * N >= b.dimension()) throw Error("section index outside the level's basis");
    double d = line_degrees(b)[static_cast<std::size_t>(k * N)];
    out.trace.push_back(std::exp(-d / N));
  }
  out.value = out.trace.back();
  return out;
}

}  // namespace adelic
