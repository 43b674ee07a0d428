#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "permchan/channel.hpp"
#include "permchan/ntype.hpp"

namespace permchan::simulate {

// Raised when a requested rate cannot be realized by the construction at the
// given block length; sweeps catch it and mark the cell.
class infeasible_rate_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic seed split: trial generators derived from the master seed by
// splitmix64(seed + GOLDEN * (index + 1)), so outcomes do not depend on the
// number of worker threads.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

// Uniform double in [0, 1) from the top 53 bits; uniform integer below bound
// by rejection. Both depend only on the mt19937_64 stream.
double unit_double(std::mt19937_64& rng);
std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t bound);

struct Codebook {
  long long n = 0;
  std::vector<NTypeVector> codewords;
  std::string tag;  // "grid" or "block-two-step"

  std::size_t message_count() const { return codewords.size(); }
};

// Passes each input symbol through its channel row independently and returns
// the column counts; the permutation is never materialized since only the
// output type is informative.
NTypeVector sample_output_type(const NTypeVector& x, const ChannelModel& ch,
                               std::mt19937_64& rng);

// M = round(n^R) codewords on a lattice over rank-1 active directions; the
// spacing is ceil(sqrt(n ln n)) counts per active coordinate when that many
// codewords fit, otherwise the largest spacing that fits.
Codebook build_grid_codebook(const ChannelModel& ch, long long n, double rate);

// Two-step code for block diagonal channels: a zero-error block-composition
// stem over half the positions plus per-block grid tails on the reserved
// n/(2 beta) positions.
Codebook build_block_code(const ChannelModel& ch, long long n, double rate_total);

// argmin_w D(y/n || mu(w/n)); ties to the lowest index; +inf divergences are
// skipped unless every codeword gives +inf.
std::size_t min_divergence_decode(const NTypeVector& y_type, const Codebook& codebook,
                                  const ChannelModel& ch);

// argmax_w P[type(Y) = y | pi = w] using the exact y-type law (small n only).
std::size_t exact_ml_decode(const NTypeVector& y_type, const Codebook& codebook,
                            const ChannelModel& ch);

struct TrialOutcome {
  long long trials = 0;
  long long errors = 0;
  double error_rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

std::pair<double, double> wilson_interval(long long errors, long long trials);

enum class Decoder { MinDivergence, ExactML };

TrialOutcome simulate_error(const Codebook& codebook, const ChannelModel& ch, long long trials,
                            std::uint64_t seed, Decoder decoder = Decoder::MinDivergence);

struct SweepCell {
  double rate = 0.0;
  long long n = 0;
  std::size_t message_count = 0;
  bool feasible = true;
  std::string note;
  TrialOutcome outcome;
};

std::vector<SweepCell> sweep_rate(const ChannelModel& ch, const std::vector<double>& rates,
                                  const std::vector<long long>& ns, long long trials,
                                  std::uint64_t seed);

}  // namespace permchan::simulate
