#pragma once

#include <optional>
#include <string>
#include <vector>

#include "permchan/channel.hpp"
#include "permchan/ntype.hpp"
#include "permchan/prob_vector.hpp"

namespace permchan::bounds {

// The concentration constant is not pinned by theory here; this default is
// calibrated as the smallest value dominating the fair-binomial point masses
// up to n = 1000 (see calibrate_concentration_alpha and its test).
inline constexpr double kDefaultAlpha = 0.564048553804754;

// max over n <= n_max of binom(n, floor(n/2)) 2^-n sqrt(n/2).
double calibrate_concentration_alpha(long long n_max = 1000);

struct BoundReport {
  std::string name;
  std::string inputs;
  double value = 0.0;
  std::string note;
};

struct CapacityResult {
  ChannelClass cls = ChannelClass::General;
  bool exact = false;           // a solved class with a closed-form value
  double value = 0.0;           // meaningful when exact
  double lower = 0.0;           // (rank-1)/2 achievability floor
  double upper = 0.0;           // class-specific upper bound
  bool upper_conditional = false;  // zigzag: upper holds under a worst-case assumption
  std::string formula;
};

// Closed-form capacity for the solved classes; bounds-only elsewhere.
CapacityResult capacity_value(const ChannelModel& ch);

// ((q-1)/2) ln(2 pi alpha^2 / c_*) + q/12 with c_* = min_i min_j p_ij / max_j p_ij.
// Pass n to use the sharper q/(12 n) remainder. Strictly positive channels only.
double remark1_c(const ChannelModel& ch, double alpha = kDefaultAlpha,
                 std::optional<long long> n = std::nullopt);

// Stirling upper bound on -ln P[A=1] for an iid sample hitting its own type:
//   -1/2 ln n + sum_{c_i>0} 1/2 ln c_i + ((q'-1)/2) ln 2pi + sum_{c_i>0} 1/(12 c_i)
// where q' counts the positive entries. The last term keeps the bound valid
// at every n (a plain 1/(12n) fails already at t = (1,1)).
double prob_a_stirling_bound(const NTypeVector& t);

// alpha / sqrt(sum_i min(p_i, 1-p_i)); +inf when the sum vanishes.
double petrov_bound(const std::vector<double>& probs, double alpha = kDefaultAlpha);

// Point-mass bound for n balls in q bins with per-ball relative probabilities
// rel_probs[i][b]:  alpha^{q-1} / ( n^{(q-1)/2} sqrt(B) ).
double balls_in_bins_bound(const ProbVector& pi,
                           const std::vector<std::vector<double>>& rel_probs,
                           double alpha = kDefaultAlpha);

struct BernsteinResult {
  bool applicable = false;   // requires E[Y] > 2 gamma ln n
  double prob_bound = 0.0;   // 2 / n^{gamma/4}
  double floor_value = 0.0;  // E[Y] / 5
  double deviation = 0.0;    // sqrt(E[Y] gamma ln n)
};

BernsteinResult bernstein_tail(double expected_y, double gamma, double n);

// ln(net size) + c + 1; the covering term n * (1/n) contributes the 1.
double mi_upper_bound(double measured_net_size, double c);
double mi_asymptotic_form(const ChannelModel& ch, long long n);

struct StamBounds {
  double han_value = 0.0;                  // (m/n) c, c measured at full length
  double stam_small_m = 0.0;               // ((q-1)/2) m(m-1) / ((n-1)(n-m+1))
  std::optional<double> stam_large_m;      // exact harmonic-sum form; absent at m = n
  int tightest = 0;                        // 0 han, 1 small-m, 2 large-m
  double crossover_lhs = 0.0;              // (1/2) ln(2 pi alpha^2 / c_*)
  double crossover_rhs = 0.0;              // min{g/(1-g), (1/g) ln(1/(1-g))}, g = m/n
  bool han_can_be_tighter = false;         // crossover_lhs <= crossover_rhs
};

StamBounds stam_bounds(int q, long long n, long long m, double c_measured,
                       double alpha = kDefaultAlpha, double c_star = 1.0);

// 3(q-1)/4; holds only under the worst-case input-structure assumption.
double zigzag_conditional_bound(int q);

// The full report table the CLI prints for a channel.
std::vector<BoundReport> bound_table(const ChannelModel& ch, std::optional<long long> n,
                                     double alpha);

}  // namespace permchan::bounds
