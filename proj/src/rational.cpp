#include "permchan/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace permchan {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::optional<Rational> parse_rational_token(const std::string& token) {
  if (token.empty()) return std::nullopt;
  std::string body = token;
  bool negative = false;
  if (body[0] == '+' || body[0] == '-') {
    negative = body[0] == '-';
    body = body.substr(1);
  }

  auto slash = body.find('/');
  if (slash != std::string::npos) {
    std::string num = body.substr(0, slash);
    std::string den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    BigInt d(den);
    if (d == 0) return std::nullopt;
    Rational r(BigInt(num), d);
    return negative ? -r : r;
  }

  auto dot = body.find('.');
  std::string integral = dot == std::string::npos ? body : body.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : body.substr(dot + 1);
  if (integral.empty() && frac.empty()) return std::nullopt;
  if (!integral.empty() && !all_digits(integral)) return std::nullopt;
  if (!frac.empty() && !all_digits(frac)) return std::nullopt;

  BigInt num = integral.empty() ? BigInt(0) : BigInt(integral);
  BigInt den(1);
  for (char c : frac) {
    num = num * 10 + (c - '0');
    den *= 10;
  }
  Rational r(num, den);
  return negative ? -r : r;
}

double log_rational(const Rational& r) {
  if (r <= 0) throw std::domain_error("log_rational: nonpositive argument");
  using Float = boost::multiprecision::cpp_bin_float_50;
  Float num(boost::multiprecision::numerator(r));
  Float den(boost::multiprecision::denominator(r));
  return static_cast<double>(log(num) - log(den));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

BigInt factorial_exact(long long n) {
  if (n < 0) throw std::domain_error("factorial_exact: negative argument");
  BigInt out = 1;
  for (long long i = 2; i <= n; ++i) out *= i;
  return out;
}

BigInt binomial_exact(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt out = 1;
  for (long long i = 1; i <= k; ++i) {
    out = out * (n - k + i) / i;
  }
  return out;
}

}  // namespace permchan
