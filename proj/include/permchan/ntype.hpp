#pragma once

#include <functional>
#include <initializer_list>
#include <vector>

#include "permchan/log_prob.hpp"
#include "permchan/prob_vector.hpp"
#include "permchan/rational.hpp"

namespace permchan {

// Integer counts (c_1, ..., c_q) with sum n: an n-type over q symbols.
struct NTypeVector {
  std::vector<long long> counts;

  NTypeVector() = default;
  explicit NTypeVector(std::vector<long long> c);
  NTypeVector(std::initializer_list<long long> c)
      : NTypeVector(std::vector<long long>(c)) {}

  long long n() const;
  std::size_t symbols() const { return counts.size(); }

  // The induced distribution counts/n.
  ProbVector distribution() const;
  std::vector<Rational> distribution_exact() const;

  bool operator==(const NTypeVector& other) const { return counts == other.counts; }
  bool operator<(const NTypeVector& other) const { return counts < other.counts; }
};

// Number of compositions of n into q nonnegative parts, i.e. binom(n+q-1, q-1).
// Throws a size error if the count exceeds max_count.
unsigned long long composition_count(long long n, int q,
                                     unsigned long long max_count = 100000000ull);

// All n-types over q symbols in lexicographic order.
std::vector<NTypeVector> enumerate_ntypes(long long n, int q);

// Visits each composition of n into q parts (lexicographic) without
// materializing the whole list.
void for_each_composition(long long n, int q,
                          const std::function<void(const std::vector<long long>&)>& fn);

// ln P[iid sample of length n from p has exactly type t].
LogProb multinomial_log_prob(const NTypeVector& t, const ProbVector& p);
Rational multinomial_prob_exact(const NTypeVector& t, const std::vector<Rational>& p);

// ln |T_n(t)| = ln( n! / prod_i c_i! ).
double log_type_class_size(const NTypeVector& t);

}  // namespace permchan
