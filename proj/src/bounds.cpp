#include "permchan/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "permchan/hull.hpp"
#include "permchan/log_prob.hpp"

namespace permchan::bounds {

namespace {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

double calibrate_concentration_alpha(long long n_max) {
  double best = 0.0;
  for (long long n = 1; n <= n_max; ++n) {
    double mass = std::exp(log_binomial(n, n / 2) - static_cast<double>(n) * std::log(2.0));
    best = std::max(best, mass * std::sqrt(static_cast<double>(n) / 2.0));
  }
  return best;
}

CapacityResult capacity_value(const ChannelModel& ch) {
  CapacityResult out;
  out.cls = ch.channel_class();
  double rank = static_cast<double>(ch.rank());
  int q = ch.input_count();
  out.lower = (rank - 1.0) / 2.0;
  switch (out.cls) {
    case ChannelClass::StrictlyPositive:
      out.exact = true;
      out.value = out.lower;
      out.upper = out.value;
      out.formula = "(rank-1)/2, strictly positive";
      break;
    case ChannelClass::BlockDiagonal: {
      bool all_positive = true;
      for (const auto& b : ch.blocks()) all_positive = all_positive && b.strictly_positive;
      double beta = static_cast<double>(ch.block_count());
      if (all_positive) {
        out.exact = true;
        out.value = (rank + beta - 2.0) / 2.0;
        out.upper = out.value;
        out.formula = "(rank+beta-2)/2, block diagonal with strictly positive blocks";
      } else {
        out.exact = false;
        out.upper = (static_cast<double>(extreme_point_count(ch)) - 1.0) / 2.0;
        out.formula = "bounds-only: blocks not all strictly positive";
      }
      break;
    }
    case ChannelClass::Erasure:
      out.exact = true;
      out.value = (static_cast<double>(q) - 1.0) / 2.0;
      out.upper = out.value;
      out.formula = "(q-1)/2, q-ary erasure";
      break;
    case ChannelClass::ZChannel:
      out.exact = true;
      out.value = 0.5;
      out.upper = out.value;
      out.formula = "1/2, Z-channel";
      break;
    case ChannelClass::Zigzag:
      out.exact = false;
      out.upper = zigzag_conditional_bound(q);
      out.upper_conditional = true;
      out.formula = "zigzag: lower (rank-1)/2, conditional upper 3(q-1)/4";
      break;
    case ChannelClass::General:
      out.exact = false;
      out.upper = (static_cast<double>(extreme_point_count(ch)) - 1.0) / 2.0;
      out.formula = "bounds-only: lower (rank-1)/2, upper (ext-1)/2";
      break;
  }
  return out;
}

double remark1_c(const ChannelModel& ch, double alpha, std::optional<long long> n) {
  if (!ch.strictly_positive()) {
    throw std::domain_error("remark1_c: channel must be strictly positive");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("remark1_c: alpha must be positive");
  double c_star = std::numeric_limits<double>::infinity();
  for (const auto& row : ch.matrix()) {
    double mn = *std::min_element(row.begin(), row.end());
    double mx = *std::max_element(row.begin(), row.end());
    c_star = std::min(c_star, mn / mx);
  }
  double q = static_cast<double>(ch.input_count());
  double remainder = n ? q / (12.0 * static_cast<double>(*n)) : q / 12.0;
  return (q - 1.0) / 2.0 * std::log(2.0 * std::numbers::pi * alpha * alpha / c_star) + remainder;
}

double prob_a_stirling_bound(const NTypeVector& t) {
  long long n = t.n();
  if (n < 1) throw std::invalid_argument("prob_a_stirling_bound: empty type");
  double bound = -0.5 * std::log(static_cast<double>(n));
  int positive = 0;
  for (long long c : t.counts) {
    if (c == 0) continue;
    ++positive;
    bound += 0.5 * std::log(static_cast<double>(c));
    bound += 1.0 / (12.0 * static_cast<double>(c));
  }
  bound += (static_cast<double>(positive) - 1.0) / 2.0 * std::log(2.0 * std::numbers::pi);
  return bound;
}

double petrov_bound(const std::vector<double>& probs, double alpha) {
  if (probs.empty()) throw std::invalid_argument("petrov_bound: empty probability list");
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("petrov_bound: probability out of range");
    sum += std::min(p, 1.0 - p);
  }
  if (sum == 0.0) return std::numeric_limits<double>::infinity();
  return alpha / std::sqrt(sum);
}

double balls_in_bins_bound(const ProbVector& pi,
                           const std::vector<std::vector<double>>& rel_probs, double alpha) {
  std::size_t q = pi.size();
  double pi_max = 0.0;
  double pi_product = 1.0;
  for (std::size_t b = 0; b < q; ++b) {
    if (pi[b] <= 0.0) throw std::domain_error("balls_in_bins_bound: every pi_b must be positive");
    pi_max = std::max(pi_max, pi[b]);
    pi_product *= pi[b];
  }
  double c_star = 1.0;
  for (const auto& ball : rel_probs) {
    if (ball.size() != q) throw std::invalid_argument("balls_in_bins_bound: ragged rel_probs");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t b = 0; b < q; ++b) {
      double ratio = ball[b] / pi[b];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    c_star = std::min(c_star, hi > 0.0 ? lo / hi : 0.0);
  }
  double n = static_cast<double>(rel_probs.size());
  double big_b = std::pow(c_star, static_cast<double>(q) - 1.0) * pi_product / pi_max;
  if (big_b <= 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(alpha, static_cast<double>(q) - 1.0) /
         (std::pow(n, (static_cast<double>(q) - 1.0) / 2.0) * std::sqrt(big_b));
}

BernsteinResult bernstein_tail(double expected_y, double gamma, double n) {
  BernsteinResult out;
  out.floor_value = expected_y / 5.0;
  double log_n = std::log(n);
  out.deviation = std::sqrt(std::max(0.0, expected_y * gamma * log_n));
  out.applicable = expected_y > 2.0 * gamma * log_n;
  out.prob_bound = 2.0 / std::pow(n, gamma / 4.0);
  return out;
}

double mi_upper_bound(double measured_net_size, double c) {
  if (!(measured_net_size >= 1.0)) {
    throw std::invalid_argument("mi_upper_bound: net size must be at least 1");
  }
  return std::log(measured_net_size) + c + 1.0;
}

double mi_asymptotic_form(const ChannelModel& ch, long long n) {
  double dim = static_cast<double>(ch.rank() - 1);
  return dim / 2.0 * std::log(static_cast<double>(n));
}

StamBounds stam_bounds(int q, long long n, long long m, double c_measured, double alpha,
                       double c_star) {
  if (m < 1 || m > n) throw std::invalid_argument("stam_bounds: need 1 <= m <= n");
  StamBounds out;
  double qd = static_cast<double>(q);
  double nd = static_cast<double>(n);
  double md = static_cast<double>(m);
  out.han_value = md / nd * c_measured;
  out.stam_small_m = n > 1 ? (qd - 1.0) / 2.0 * md * (md - 1.0) / ((nd - 1.0) * (nd - md + 1.0))
                           : 0.0;
  if (m < n) {
    // (q-1)/(n-1) * ( n * sum_{j=n-m+1}^{n-1} 1/j - (m-1) ), the partial
    // harmonic sum kept exact instead of its log approximation.
    double harmonic = 0.0;
    for (long long j = n - m + 1; j <= n - 1; ++j) harmonic += 1.0 / static_cast<double>(j);
    out.stam_large_m = (qd - 1.0) / (nd - 1.0) * (nd * harmonic - (md - 1.0));
  }
  double best = out.han_value;
  out.tightest = 0;
  if (out.stam_small_m < best) {
    best = out.stam_small_m;
    out.tightest = 1;
  }
  if (out.stam_large_m && *out.stam_large_m < best) out.tightest = 2;

  double g = md / nd;
  out.crossover_lhs = 0.5 * std::log(2.0 * std::numbers::pi * alpha * alpha / c_star);
  if (g < 1.0) {
    out.crossover_rhs = std::min(g / (1.0 - g), 1.0 / g * std::log(1.0 / (1.0 - g)));
  } else {
    out.crossover_rhs = std::numeric_limits<double>::infinity();
  }
  out.han_can_be_tighter = out.crossover_lhs <= out.crossover_rhs;
  return out;
}

double zigzag_conditional_bound(int q) {
  if (q < 1) throw std::invalid_argument("zigzag_conditional_bound: q must be positive");
  return 3.0 * (static_cast<double>(q) - 1.0) / 4.0;
}

std::vector<BoundReport> bound_table(const ChannelModel& ch, std::optional<long long> n,
                                     double alpha) {
  std::vector<BoundReport> table;
  CapacityResult cap = capacity_value(ch);
  table.push_back({"capacity_lower", "rank=" + std::to_string(ch.rank()), cap.lower,
                   "(rank-1)/2 achievability"});
  if (cap.exact) {
    table.push_back({"capacity", to_string(cap.cls), cap.value, cap.formula});
  } else {
    table.push_back({"capacity_upper", to_string(cap.cls), cap.upper,
                     cap.upper_conditional ? "conditional on worst-case input structure"
                                           : cap.formula});
  }
  if (ch.strictly_positive()) {
    table.push_back({"remark_c", "alpha=" + format_value(alpha), remark1_c(ch, alpha),
                     "constant bound on the divergence gap (nats)"});
    if (n) {
      table.push_back({"remark_c_n", "n=" + std::to_string(*n),
                       remark1_c(ch, alpha, n), "n-refined remainder q/(12n)"});
    }
  }
  if (n) {
    table.push_back({"mi_asymptotic", "n=" + std::to_string(*n), mi_asymptotic_form(ch, *n),
                     "(rank-1)/2 ln n"});
  }
  table.push_back({"extreme_points", "", static_cast<double>(extreme_point_count(ch)),
                   "extreme points of the row hull"});
  if (ch.channel_class() == ChannelClass::Zigzag) {
    table.push_back({"zigzag_upper", "q=" + std::to_string(ch.input_count()),
                     zigzag_conditional_bound(ch.input_count()),
                     "conditional on worst-case input structure"});
  }
  return table;
}

}  // namespace permchan::bounds
