#pragma once

#include <optional>
#include <string>
#include <vector>

#include "permchan/ntype.hpp"
#include "permchan/prob_vector.hpp"
#include "permchan/rational.hpp"

namespace permchan {

enum class ChannelClass {
  StrictlyPositive,
  BlockDiagonal,
  Erasure,
  ZChannel,
  Zigzag,
  General,
};

std::string to_string(ChannelClass c);

// One block of the input/output partition induced by the support graph.
struct ChannelBlock {
  std::vector<int> inputs;
  std::vector<int> outputs;
  bool strictly_positive = false;
};

using Matrix = std::vector<std::vector<double>>;
using RationalMatrix = std::vector<std::vector<Rational>>;

// A row-stochastic q x k transition matrix together with its detected
// structural class, block partition and rank. Built by classify_channel or
// the channel-spec parser; immutable afterwards.
class ChannelModel {
 public:
  int input_count() const { return static_cast<int>(matrix_.size()); }
  int output_count() const { return static_cast<int>(matrix_.front().size()); }
  const Matrix& matrix() const { return matrix_; }
  const std::vector<double>& row(int i) const { return matrix_[static_cast<std::size_t>(i)]; }
  double at(int i, int j) const { return matrix_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

  ChannelClass channel_class() const { return class_; }
  const std::vector<ChannelBlock>& blocks() const { return blocks_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  int rank() const { return rank_; }
  bool strictly_positive() const { return class_ == ChannelClass::StrictlyPositive; }

  // Present when every entry was supplied exactly and rows sum to 1 exactly.
  const std::optional<RationalMatrix>& exact_matrix() const { return exact_; }

  // FNV-1a over the canonical entry listing; stable across runs.
  std::string hash() const;

 private:
  friend ChannelModel classify_channel(const Matrix&, std::optional<RationalMatrix>, double);

  Matrix matrix_;
  std::optional<RationalMatrix> exact_;
  ChannelClass class_ = ChannelClass::General;
  std::vector<ChannelBlock> blocks_;
  int rank_ = 1;
};

// Validates stochasticity, detects the structural class (preferring the most
// specific one), computes the block partition and the rank.
ChannelModel classify_channel(const Matrix& matrix,
                              std::optional<RationalMatrix> exact = std::nullopt,
                              double rank_tol = 1e-9);

// Rank by Gaussian elimination; a pivot counts if its magnitude is >= tol.
int numerical_rank(const Matrix& matrix, double tol = 1e-9);

// Exact rank by fraction-free elimination over the rationals.
int exact_rank(const RationalMatrix& matrix);

// P_Y(j) = sum_i pi_i p_ij.
ProbVector output_marginal(const ProbVector& pi, const ChannelModel& ch);
std::vector<double> output_marginal_raw(const std::vector<double>& pi, const Matrix& m);
std::vector<Rational> output_marginal_exact(const std::vector<Rational>& pi,
                                            const RationalMatrix& m);

// Channel-spec text: first line "q k", then q rows of k entries, each a
// decimal or a fraction like "3/10"; '#' starts a comment. Rows whose sum is
// off by more than 1e-9 are rejected.
ChannelModel parse_channel_text(const std::string& text);
ChannelModel parse_channel_file(const std::string& path);

}  // namespace permchan
