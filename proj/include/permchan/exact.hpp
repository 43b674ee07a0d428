#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "permchan/channel.hpp"
#include "permchan/ntype.hpp"
#include "permchan/prob_vector.hpp"
#include "permchan/rational.hpp"

namespace permchan::exact {

// q x k nonnegative integer grid; row i sums to the count of input symbol i.
struct JointCountMatrix {
  std::vector<std::vector<long long>> counts;

  NTypeVector column_sums() const;
};

// All joint count matrices with the given row sums. Guarded against
// enumerations above 1e8 matrices.
std::vector<JointCountMatrix> joint_count_enumerate(const NTypeVector& pi, int k);

// Distribution of the output type m = type(Y^n), conditioned on the input
// being uniform over T_n(pi). Types are kept in lexicographic order;
// unreachable types are omitted.
struct YTypeLaw {
  std::vector<NTypeVector> types;
  std::vector<double> log_prob;   // ln P[type(Y)=m | A=1]
  double log_prob_a = 0.0;        // ln P[A=1], via the multinomial directly

  std::optional<std::size_t> index_of(const NTypeVector& m) const;
  double total_probability() const;
};

YTypeLaw ytype_law_given_A(const NTypeVector& pi, const ChannelModel& ch);

// Exact-rational variant; requires ch.exact_matrix().
struct ExactYTypeLaw {
  std::vector<NTypeVector> types;
  std::vector<Rational> prob;
  Rational prob_a = 0;
};

ExactYTypeLaw ytype_law_given_A_exact(const NTypeVector& pi, const ChannelModel& ch);

// P[A=1 | type(Y)=m] = P[m | A=1] P[A=1] / P[m], where P[m] is the iid law
// multinomial(m; P_Y). Throws for unreachable m.
double prob_A_given_ytype(const NTypeVector& pi, const ChannelModel& ch, const NTypeVector& m);
Rational prob_A_given_ytype_exact(const NTypeVector& pi, const ChannelModel& ch,
                                  const NTypeVector& m);

// The divergence D(P_{Y^n | pi} || Q^n) computed along two routes that share
// only the conditional y-type law:
//   direct   = sum_m P[m|A=1] ( ln P[m|A=1] - ln|T_n(m)| - sum_j m_j ln Q_j )
//   term_iid + gap, with gap = sum_m P[m|A=1] ln( P[A=1|m] / P[A=1] ).
struct DivergenceReport {
  long long n = 0;
  NTypeVector pi;
  std::vector<double> q;
  double term_iid = 0.0;
  double gap = 0.0;
  double direct = 0.0;
  double residual = 0.0;          // |direct - term_iid - gap|
  bool infinite = false;          // Q put zero mass on a reachable symbol
  std::vector<int> zero_symbols;  // the offending symbols when infinite
  double log_prob_a = 0.0;
};

DivergenceReport divergence_exact(const NTypeVector& pi, const ChannelModel& ch,
                                  const ProbVector& q);

enum class QMode { MarginalPY, Fixed };

struct GapProfileRow {
  long long n = 0;
  double max_gap = 0.0;
  NTypeVector argmax_pi;
  double divergence_at_max = 0.0;
};

// Worst-case-over-pi gap per n. The gap term does not depend on Q; the mode
// only selects the Q used for the reported divergence column.
std::vector<GapProfileRow> gap_profile(const ChannelModel& ch, QMode mode,
                                       const std::vector<long long>& n_list,
                                       const std::optional<ProbVector>& fixed_q = std::nullopt);

// Exact D(P_{Y^m} || Q^m) for the m-coordinate marginal of the exchangeable
// output law, via the multivariate-hypergeometric restriction of the full
// y-type law.
double marginal_divergence(const NTypeVector& pi, const ChannelModel& ch, const ProbVector& q,
                           long long m);

struct TightnessRow {
  long long n = 0;
  double gap_bsc = 0.0;       // BSC(1/n), pi = (n/2, n/2), Q = P_Y
  double gap_identity = 0.0;  // same pi through the identity channel
};

// The non-vanishing-gap probe: even n only.
std::vector<TightnessRow> tightness_probe(const std::vector<long long>& n_list);

// Mutual information I(pi; Y^n) with pi uniform over all of P_n. Since the
// output law given the type is uniform on the class, this equals I(pi; M).
double exact_mutual_information(const ChannelModel& ch, long long n);

}  // namespace permchan::exact
