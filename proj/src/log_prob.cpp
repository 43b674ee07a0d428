#include "permchan/log_prob.hpp"

#include <mutex>
#include <stdexcept>

namespace permchan {

LogProb LogProb::from_prob(double p) {
  if (p < 0.0) throw std::domain_error("LogProb::from_prob: negative probability");
  if (p == 0.0) return LogProb::zero();
  return LogProb(std::log(p));
}

LogProb operator*(LogProb a, LogProb b) {
  a *= b;
  return a;
}

LogProb operator+(LogProb a, LogProb b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  double hi = std::max(a.value, b.value);
  double lo = std::min(a.value, b.value);
  return LogProb(hi + std::log1p(std::exp(lo - hi)));
}

void LogSumAccumulator::add(double log_term) {
  if (std::isinf(log_term) && log_term < 0) return;
  if (!any_) {
    any_ = true;
    max_ = log_term;
    scaled_sum_ = 1.0;
    return;
  }
  if (log_term > max_) {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - log_term) + 1.0;
    max_ = log_term;
  } else {
    scaled_sum_ += std::exp(log_term - max_);
  }
}

double LogSumAccumulator::log_sum() const {
  if (!any_) return -std::numeric_limits<double>::infinity();
  return max_ + std::log(scaled_sum_);
}

namespace {

constexpr long long kLogFactorialTableSize = 1 << 16;

const std::vector<double>& log_factorial_table() {
  static std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialTableSize);
    t[0] = 0.0;
    for (long long i = 1; i < kLogFactorialTableSize; ++i) {
      t[i] = t[i - 1] + std::log(static_cast<double>(i));
    }
    return t;
  }();
  return table;
}

}  // namespace

double log_factorial(long long n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  const auto& table = log_factorial_table();
  if (n < kLogFactorialTableSize) return table[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(long long n, long long k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace permchan
