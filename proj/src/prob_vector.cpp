#include "permchan/prob_vector.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace permchan {

namespace {
constexpr double kSimplexTolerance = 1e-12;
}

ProbVector::ProbVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("ProbVector: empty");
  double sum = 0.0;
  for (double e : entries_) {
    if (!(e >= 0.0)) throw std::invalid_argument("ProbVector: negative entry");
    sum += e;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument("ProbVector: entries do not sum to 1");
  }
}

ProbVector ProbVector::uniform(std::size_t q) {
  if (q == 0) throw std::invalid_argument("ProbVector::uniform: q must be positive");
  std::vector<double> e(q, 1.0 / static_cast<double>(q));
  return ProbVector(std::move(e));
}

double kl_divergence_raw(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

double kl_divergence(const ProbVector& p, const ProbVector& q) {
  return kl_divergence_raw(p.entries(), q.entries());
}

}  // namespace permchan
