#include "permchan/ntype.hpp"

#include <cmath>
#include <stdexcept>

namespace permchan {

NTypeVector::NTypeVector(std::vector<long long> c) : counts(std::move(c)) {
  if (counts.empty()) throw std::invalid_argument("NTypeVector: empty");
  for (long long v : counts) {
    if (v < 0) throw std::invalid_argument("NTypeVector: negative count");
  }
}

long long NTypeVector::n() const {
  long long total = 0;
  for (long long v : counts) total += v;
  return total;
}

ProbVector NTypeVector::distribution() const {
  long long total = n();
  if (total <= 0) throw std::invalid_argument("NTypeVector: n must be positive");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return ProbVector(std::move(p));
}

std::vector<Rational> NTypeVector::distribution_exact() const {
  long long total = n();
  if (total <= 0) throw std::invalid_argument("NTypeVector: n must be positive");
  std::vector<Rational> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[i] = Rational(counts[i], total);
  }
  return p;
}

unsigned long long composition_count(long long n, int q, unsigned long long max_count) {
  if (n < 0 || q < 1) throw std::invalid_argument("composition_count: bad arguments");
  // binom(n+q-1, q-1), with an overflow-safe running check against max_count.
  unsigned long long count = 1;
  for (int i = 1; i < q; ++i) {
    count = count * static_cast<unsigned long long>(n + i);
    count /= static_cast<unsigned long long>(i);
    if (count > 4 * max_count) break;  // avoid pointless growth before the check
  }
  if (count > max_count) {
    throw std::length_error("composition_count: enumeration too large");
  }
  return count;
}

void for_each_composition(long long n, int q,
                          const std::function<void(const std::vector<long long>&)>& fn) {
  std::vector<long long> current(static_cast<std::size_t>(q), 0);
  // Recursive lexicographic fill; depth is q which is small everywhere here.
  std::function<void(int, long long)> rec = [&](int pos, long long remaining) {
    if (pos == q - 1) {
      current[static_cast<std::size_t>(pos)] = remaining;
      fn(current);
      return;
    }
    for (long long v = 0; v <= remaining; ++v) {
      current[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, n);
}

std::vector<NTypeVector> enumerate_ntypes(long long n, int q) {
  if (n < 1 || q < 1) throw std::invalid_argument("enumerate_ntypes: n, q must be positive");
  composition_count(n, q);  // size guard
  std::vector<NTypeVector> out;
  for_each_composition(n, q, [&](const std::vector<long long>& c) {
    out.push_back(NTypeVector(c));
  });
  return out;
}

LogProb multinomial_log_prob(const NTypeVector& t, const ProbVector& p) {
  if (t.symbols() != p.size()) {
    throw std::invalid_argument("multinomial_log_prob: dimension mismatch");
  }
  double log_value = log_factorial(t.n());
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    long long c = t.counts[i];
    if (c == 0) continue;
    if (p[i] == 0.0) return LogProb::zero();
    log_value += static_cast<double>(c) * std::log(p[i]) - log_factorial(c);
  }
  return LogProb(log_value);
}

Rational multinomial_prob_exact(const NTypeVector& t, const std::vector<Rational>& p) {
  if (t.symbols() != p.size()) {
    throw std::invalid_argument("multinomial_prob_exact: dimension mismatch");
  }
  Rational coeff(factorial_exact(t.n()));
  Rational prob = 1;
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    long long c = t.counts[i];
    if (c == 0) continue;
    if (p[i] == 0) return Rational(0);
    coeff /= Rational(factorial_exact(c));
    Rational power = 1;
    for (long long j = 0; j < c; ++j) power *= p[i];
    prob *= power;
  }
  return coeff * prob;
}

double log_type_class_size(const NTypeVector& t) {
  double value = log_factorial(t.n());
  for (long long c : t.counts) value -= log_factorial(c);
  return value;
}

}  // namespace permchan
