#pragma once

#include <map>
#include <string>
#include <vector>

#include "permchan/channel.hpp"
#include "permchan/ntype.hpp"
#include "permchan/rational.hpp"

namespace permchan::accept {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Deterministic verification battery: strictly positive channels with
// entries j/1000, min entry 50/1000, for (q, k) in {2,3} x {2,3}.
std::vector<ChannelModel> battery_channels();

// Runs one criterion (1-10).
CriterionResult run_criterion(int id);

// Suite names: all, sandwich, covering, capacity, simulate, bounds, oracle.
std::vector<int> suite_criteria(const std::string& suite);
std::vector<CriterionResult> run_suite(const std::string& suite);

std::string format_result_line(const CriterionResult& r);

// Fully naive reference: enumerates every input sequence in T_n(pi) and every
// output sequence in [k]^n with exact rational arithmetic. Independent of the
// y-type machinery it is used to check.
namespace oracle {

struct SequenceOracle {
  Rational prob_a;                                      // P[X^n in T_n(pi)]
  std::map<std::vector<long long>, Rational> law_given_a;  // type(Y) | A=1
  std::map<std::vector<long long>, Rational> law_iid;      // type(Y) unconditioned
};

SequenceOracle sequence_oracle(const NTypeVector& pi, const ChannelModel& ch);

// P[Y^m = rep | A=1] for one representative sequence of each m-sub-type,
// keyed by the sub-type counts.
std::map<std::vector<long long>, Rational> marginal_per_sequence(const NTypeVector& pi,
                                                                 const ChannelModel& ch,
                                                                 long long m);

}  // namespace oracle

}  // namespace permchan::accept
