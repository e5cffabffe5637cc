#include "adelic/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace adelic {

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Integer parse_integer(std::string s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.erase(0, 1);
  }
  if (!all_digits(s)) throw Error("malformed rational: '" + s + "'");
  Integer z(s, 10);
  return neg ? Integer(-z) : z;
}

}  // namespace

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  if (text.empty()) throw Error("malformed rational: empty string");

  if (auto slash = text.find('/'); slash != std::string::npos) {
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw Error("malformed rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (auto dot = text.find('.'); dot != std::string::npos) {
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || (!frac.empty() && !all_digits(frac)))
      throw Error("malformed rational: '" + raw + "'");
    Integer num(whole + frac, 10);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational q(neg ? Integer(-num) : num, den);
    q.canonicalize();
    return q;
  }
  return Rational(parse_integer(text));
}

std::string to_string(const Integer& z) { return z.get_str(10); }

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str(10);
  return q.get_num().get_str(10) + "/" + q.get_den().get_str(10);
}

double log_abs(const Integer& z) {
  if (z == 0) throw Error("log of zero");
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

double log_abs(const Rational& q) { return log_abs(q.get_num()) - log_abs(q.get_den()); }

long valuation(const Integer& z, const Integer& p) {
  if (z == 0) throw Error("valuation of zero");
  Integer r = z;
  long v = 0;
  while (mpz_divisible_p(r.get_mpz_t(), p.get_mpz_t())) {
    mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t());
    ++v;
  }
  return v;
}

long valuation(const Rational& q, const Integer& p) {
  return valuation(q.get_num(), p) - valuation(q.get_den(), p);
}

bool is_probable_prime(const Integer& z) {
  return z > 1 && mpz_probab_prime_p(z.get_mpz_t(), 30) > 0;
}

namespace {

Integer pollard_rho(const Integer& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    Integer x = 2, y = 2, d = 1;
    auto step = [&](Integer& v) {
      v = v * v + c;
      v %= n;
    };
    while (d == 1) {
      step(x);
      step(y);
      step(y);
      Integer diff = x - y;
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != n) return d;
  }
}

void factor_into(const Integer& n, std::vector<Integer>& out) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    out.push_back(n);
    return;
  }
  Integer d = pollard_rho(n);
  factor_into(d, out);
  factor_into(Integer(n / d), out);
}

}  // namespace

std::vector<Integer> prime_factors(const Integer& z) {
  if (z == 0) throw Error("zero has no prime factorization");
  Integer n = abs(z);
  std::vector<Integer> out;
  for (unsigned long p = 2; p < 10000 && n > 1; ++p) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      out.emplace_back(p);
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
    }
  }
  std::vector<Integer> big;
  factor_into(n, big);
  out.insert(out.end(), big.begin(), big.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Rational pow(const Rational& q, unsigned long e) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), q.get_den_mpz_t(), e);
  r.canonicalize();
  return r;
}

std::size_t bit_size(const Rational& q) {
  return std::max(mpz_sizeinbase(q.get_num_mpz_t(), 2), mpz_sizeinbase(q.get_den_mpz_t(), 2));
}

}  // namespace adelic
