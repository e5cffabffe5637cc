#include "adelic/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace adelic {

QPoly::QPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

QPoly QPoly::constant(const Rational& c) { return QPoly({c}); }

QPoly QPoly::monomial(const Rational& c, int degree) {
  std::vector<Rational> v(static_cast<std::size_t>(degree) + 1);
  v.back() = c;
  return QPoly(std::move(v));
}

QPoly QPoly::x() { return monomial(1, 1); }

void QPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational QPoly::coeff(int i) const {
  if (i < 0 || i > degree()) return 0;
  return c_[static_cast<std::size_t>(i)];
}

QPoly QPoly::operator+(const QPoly& o) const {
  std::vector<Rational> r(std::max(c_.size(), o.c_.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i < c_.size()) r[i] += c_[i];
    if (i < o.c_.size()) r[i] += o.c_[i];
  }
  return QPoly(std::move(r));
}

QPoly QPoly::operator-() const {
  std::vector<Rational> r(c_);
  for (auto& v : r) v = -v;
  return QPoly(std::move(r));
}

QPoly QPoly::operator-(const QPoly& o) const { return *this + (-o); }

QPoly QPoly::operator*(const QPoly& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<Rational> r(c_.size() + o.c_.size() - 1);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  return QPoly(std::move(r));
}

QPoly QPoly::operator*(const Rational& s) const {
  std::vector<Rational> r(c_);
  for (auto& v : r) v *= s;
  return QPoly(std::move(r));
}

void QPoly::divmod(const QPoly& d, QPoly& q, QPoly& r) const {
  if (d.is_zero()) throw Error("polynomial division by zero");
  std::vector<Rational> rem(c_);
  int dd = d.degree();
  int n = degree();
  if (n < dd) {
    q = {};
    r = *this;
    return;
  }
  std::vector<Rational> quo(static_cast<std::size_t>(n - dd) + 1);
  Rational inv_lc = 1 / d.leading();
  for (int i = n; i >= dd; --i) {
    Rational f = rem[static_cast<std::size_t>(i)] * inv_lc;
    if (f == 0) continue;
    quo[static_cast<std::size_t>(i - dd)] = f;
    for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(i - dd + j)] -= f * d.c_[static_cast<std::size_t>(j)];
  }
  q = QPoly(std::move(quo));
  rem.resize(static_cast<std::size_t>(dd));
  r = QPoly(std::move(rem));
}

QPoly QPoly::operator%(const QPoly& d) const {
  QPoly q, r;
  divmod(d, q, r);
  return r;
}

QPoly QPoly::operator/(const QPoly& d) const {
  QPoly q, r;
  divmod(d, q, r);
  return q;
}

QPoly QPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> r(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<long>(i);
  return QPoly(std::move(r));
}

QPoly QPoly::monic() const {
  if (is_zero()) return {};
  return *this * (1 / leading());
}

QPoly QPoly::pow(unsigned e) const {
  QPoly result = constant(1), base = *this;
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

QPoly QPoly::compose(const QPoly& q) const {
  QPoly r;
  for (int i = degree(); i >= 0; --i) r = r * q + constant(c_[static_cast<std::size_t>(i)]);
  return r;
}

Rational QPoly::eval(const Rational& z) const {
  Rational r = 0;
  for (int i = degree(); i >= 0; --i) r = r * z + c_[static_cast<std::size_t>(i)];
  return r;
}

std::complex<long double> QPoly::eval(std::complex<long double> z) const {
  std::complex<long double> r = 0;
  for (int i = degree(); i >= 0; --i) r = r * z + static_cast<long double>(c_[static_cast<std::size_t>(i)].get_d());
  return r;
}

std::vector<Integer> QPoly::primitive_integer() const {
  if (is_zero()) return {};
  Integer l = 1;
  for (const auto& v : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  std::vector<Integer> z(c_.size());
  Integer g = 0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    z[i] = c_[i].get_num() * (l / c_[i].get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z[i].get_mpz_t());
  }
  if (z.back() < 0) g = -g;
  for (auto& v : z) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
  return z;
}

QPoly QPoly::from_integer(const std::vector<Integer>& z) {
  std::vector<Rational> r(z.begin(), z.end());
  return QPoly(std::move(r));
}

std::string QPoly::to_string(char var) const {
  if (is_zero()) return "0";
  std::string out;
  for (int i = degree(); i >= 0; --i) {
    const Rational& a = c_[static_cast<std::size_t>(i)];
    if (a == 0) continue;
    Rational mag = abs(a);
    if (!out.empty()) out += a < 0 ? " - " : " + ";
    else if (a < 0) out += "-";
    bool unit = mag == 1;
    if (i == 0 || !unit) out += adelic::to_string(mag);
    if (i > 0) {
      if (!unit) out += "*";
      out += var;
      if (i > 1) out += "^" + std::to_string(i);
    }
  }
  return out;
}

namespace {

// Recursive descent over + - * / ^ and parentheses. Values are kept as
// numerator/denominator pairs so rational maps parse with the same grammar.
struct Frac {
  QPoly num, den;
};

Frac frac_mul(const Frac& a, const Frac& b) { return {a.num * b.num, a.den * b.den}; }

class PolyParser {
 public:
  explicit PolyParser(const std::string& s) {
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) s_.push_back(c);
  }

  Frac parse() {
    if (s_.empty()) throw Error("malformed polynomial: empty");
    Frac f = expr();
    if (pos_ != s_.size()) fail();
    return f;
  }

 private:
  [[noreturn]] void fail() const { throw Error("malformed polynomial: '" + s_ + "'"); }

  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  Frac expr() {
    Frac acc = unary();
    while (peek('+') || peek('-')) {
      bool minus = s_[pos_++] == '-';
      Frac t = unary();
      if (minus) t.num = -t.num;
      acc = {acc.num * t.den + t.num * acc.den, acc.den * t.den};
    }
    return acc;
  }

  Frac unary() {
    if (peek('-')) {
      ++pos_;
      Frac t = unary();
      t.num = -t.num;
      return t;
    }
    if (peek('+')) ++pos_;
    return term();
  }

  Frac term() {
    Frac acc = power();
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '*') {
        ++pos_;
        acc = frac_mul(acc, power());
      } else if (c == '/') {
        ++pos_;
        Frac d = power();
        if (d.num.is_zero()) throw Error("malformed polynomial: division by zero");
        acc = frac_mul(acc, {d.den, d.num});
      } else if (c == '(' || std::isalpha(static_cast<unsigned char>(c))) {
        acc = frac_mul(acc, power());  // implicit product such as 3z or 2(z+1)
      } else {
        break;
      }
    }
    return acc;
  }

  Frac power() {
    Frac base = atom();
    if (peek('^')) {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail();
      unsigned long e = std::stoul(s_.substr(start, pos_ - start));
      base = {base.num.pow(static_cast<unsigned>(e)), base.den.pow(static_cast<unsigned>(e))};
    }
    return base;
  }

  Frac atom() {
    if (pos_ >= s_.size()) fail();
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Frac f = expr();
      if (!peek(')')) fail();
      ++pos_;
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      return {QPoly::constant(parse_rational(s_.substr(start, pos_ - start))), QPoly::constant(1)};
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      if (var_ == 0) var_ = c;
      if (c != var_) fail();
      ++pos_;
      return {QPoly::x(), QPoly::constant(1)};
    }
    fail();
  }

  std::string s_;
  std::size_t pos_ = 0;
  char var_ = 0;
};

}  // namespace

std::pair<QPoly, QPoly> parse_rational_function(const std::string& text) {
  Frac f = PolyParser(text).parse();
  QPoly g = gcd(f.num, f.den);
  QPoly num = f.num / g, den = f.den / g;
  Rational lc = den.leading();
  return {num * (1 / lc), den * (1 / lc)};
}

QPoly QPoly::parse(const std::string& text) {
  auto [num, den] = parse_rational_function(text);
  if (den.degree() != 0) throw Error("malformed polynomial: '" + text + "' has a nonconstant denominator");
  return num * (1 / den.leading());
}


QPoly gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

bool is_squarefree(const QPoly& p) { return gcd(p, p.derivative()).degree() == 0; }

bool lex_less(const QPoly& a, const QPoly& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = a.degree(); i >= 0; --i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

double l1_norm(const QPoly& p) {
  double s = 0;
  for (const auto& c : p.coeffs()) s += std::fabs(c.get_d());
  return s;
}

std::size_t max_coeff_bits(const QPoly& p) {
  std::size_t b = 0;
  for (const auto& c : p.coeffs()) b = std::max(b, bit_size(c));
  return b;
}

QPoly inverse_mod(const QPoly& a, const QPoly& m) {
  // Extended Euclid tracking only the coefficient of a.
  QPoly r0 = m, r1 = a % m, s0, s1 = QPoly::constant(1);
  while (!r1.is_zero()) {
    QPoly q, r;
    r0.divmod(r1, q, r);
    QPoly s = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r0.degree() != 0) throw Error("element not invertible modulo polynomial");
  return (s0 * (1 / r0.leading())) % m;
}

QPoly char_poly_mod(const QPoly& element, const QPoly& modulus) {
  const int n = modulus.degree();
  if (n < 1) throw Error("modulus must be nonconstant");
  // Matrix of multiplication by element in the basis 1, w, ..., w^{n-1}.
  std::vector<std::vector<Rational>> h(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
  QPoly col = element % modulus;
  QPoly w = QPoly::x();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = col.coeff(i);
    col = (col * w) % modulus;
  }
  auto at = [&](int i, int j) -> Rational& { return h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };

  // Reduction to upper Hessenberg form by similarity transforms.
  for (int m = 1; m < n - 1; ++m) {
    int piv = -1;
    for (int i = m; i < n; ++i)
      if (at(i, m - 1) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != m) {
      std::swap(h[static_cast<std::size_t>(piv)], h[static_cast<std::size_t>(m)]);
      for (int i = 0; i < n; ++i) std::swap(at(i, piv), at(i, m));
    }
    for (int i = m + 1; i < n; ++i) {
      if (at(i, m - 1) == 0) continue;
      Rational u = at(i, m - 1) / at(m, m - 1);
      for (int j = 0; j < n; ++j) at(i, j) -= u * at(m, j);
      for (int j = 0; j < n; ++j) at(j, m) += u * at(j, i);
    }
  }

  // Characteristic polynomial of the Hessenberg matrix by the standard
  // recurrence on leading principal blocks.
  std::vector<QPoly> p(static_cast<std::size_t>(n) + 1);
  p[0] = QPoly::constant(1);
  for (int m = 1; m <= n; ++m) {
    QPoly acc = (QPoly::x() - QPoly::constant(at(m - 1, m - 1))) * p[static_cast<std::size_t>(m - 1)];
    Rational t = 1;
    for (int i = 1; i < m; ++i) {
      t *= at(m - i, m - i - 1);
      if (t == 0) break;
      acc = acc - p[static_cast<std::size_t>(m - i - 1)] * (t * at(m - i - 1, m - 1));
    }
    p[static_cast<std::size_t>(m)] = std::move(acc);
  }
  return p[static_cast<std::size_t>(n)];
}

}  // namespace adelic
