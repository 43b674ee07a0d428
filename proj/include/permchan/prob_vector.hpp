#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace permchan {

// A point of the probability simplex. Entries are validated on construction:
// nonnegative, summing to 1 within 1e-12.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> entries);
  ProbVector(std::initializer_list<double> entries)
      : ProbVector(std::vector<double>(entries)) {}

  static ProbVector uniform(std::size_t q);

  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<double>& entries() const { return entries_; }

  bool operator==(const ProbVector& other) const { return entries_ == other.entries_; }

 private:
  std::vector<double> entries_;
};

// KL divergence in nats, 0 ln 0 = 0 convention. Returns +inf exactly when
// some p_i > 0 has q_i = 0.
double kl_divergence(const ProbVector& p, const ProbVector& q);

// Same on raw spans of entries (used by inner loops that build candidate
// points without going through the validating constructor).
double kl_divergence_raw(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace permchan
