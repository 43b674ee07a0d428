#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace permchan {

// Log-domain probability. The distinguished value -inf encodes an exact zero;
// it is produced deliberately, never as the result of overflow.
struct LogProb {
  double value = -std::numeric_limits<double>::infinity();

  LogProb() = default;
  explicit LogProb(double log_value) : value(log_value) {}

  static LogProb zero() { return LogProb(); }
  static LogProb one() { return LogProb(0.0); }
  static LogProb from_prob(double p);

  bool is_zero() const { return std::isinf(value) && value < 0; }
  double prob() const { return is_zero() ? 0.0 : std::exp(value); }

  LogProb& operator*=(LogProb other) {
    if (is_zero() || other.is_zero()) {
      value = -std::numeric_limits<double>::infinity();
    } else {
      value += other.value;
    }
    return *this;
  }
};

LogProb operator*(LogProb a, LogProb b);
LogProb operator+(LogProb a, LogProb b);  // log-sum-exp of two terms

// Streaming log-sum-exp with a running max; accumulation order is whatever
// order add() is called in, so callers that need bit-stable results must fix
// that order themselves.
class LogSumAccumulator {
 public:
  void add(double log_term);
  void add(LogProb term) { add(term.value); }
  double log_sum() const;
  bool empty() const { return !any_; }

 private:
  bool any_ = false;
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_sum_ = 0.0;
};

// ln(n!). Backed by a table built exactly once (safe to call from parallel
// sections after the first use, or eagerly via log_factorial(0)).
double log_factorial(long long n);

// ln binom(n, k); -inf when k is out of range.
double log_binomial(long long n, long long k);

}  // namespace permchan
