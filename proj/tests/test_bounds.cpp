#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "permchan/bounds.hpp"
#include "permchan/covering.hpp"
#include "permchan/exact.hpp"
#include "permchan/hull.hpp"
#include "permchan/log_prob.hpp"
#include "permchan/ntype.hpp"

using namespace permchan;
using namespace permchan::bounds;

TEST_CASE("concentration alpha calibration") {
  // The frozen default is the calibration output; recomputing must agree.
  CHECK(calibrate_concentration_alpha(1000) ==
        doctest::Approx(kDefaultAlpha).epsilon(1e-12));
  // The fair-binomial family is dominated by construction.
  for (long long n : {1ll, 2ll, 3ll, 10ll, 101ll, 1000ll}) {
    double mass = std::exp(log_binomial(n, n / 2) - static_cast<double>(n) * std::log(2.0));
    std::vector<double> probs(static_cast<std::size_t>(n), 0.5);
    CHECK(mass <= petrov_bound(probs) * (1.0 + 1e-12));
  }
}

TEST_CASE("capacity on the solved classes") {
  auto z = capacity_value(classify_channel({{0.5, 0.5}, {0.0, 1.0}}));
  CHECK(z.exact);
  CHECK(z.value == 0.5);

  auto erasure3 = capacity_value(classify_channel(
      {{0.8, 0.0, 0.0, 0.2}, {0.0, 0.5, 0.0, 0.5}, {0.0, 0.0, 0.9, 0.1}}));
  CHECK(erasure3.exact);
  CHECK(erasure3.value == 1.0);

  for (int q : {2, 3, 4}) {
    Matrix m(static_cast<std::size_t>(q), std::vector<double>(static_cast<std::size_t>(q), 0.0));
    for (int i = 0; i < q; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    auto cap = capacity_value(classify_channel(m));
    CHECK(cap.exact);
    CHECK(cap.value == static_cast<double>(q) - 1.0);
  }

  auto positive = capacity_value(classify_channel({{0.9, 0.1}, {0.1, 0.9}}));
  CHECK(positive.exact);
  CHECK(positive.value == 0.5);
}

TEST_CASE("capacity equals the achievability floor plus the block increment") {
  // Structural identity across the solved classes.
  struct Case {
    Matrix m;
  };
  std::vector<Matrix> cases = {
      {{0.9, 0.1}, {0.1, 0.9}},                                    // strictly positive
      {{0.5, 0.5}, {0.0, 1.0}},                                    // Z
      {{0.7, 0.0, 0.3}, {0.0, 0.6, 0.4}},                          // erasure
      {{1.0, 0.0}, {0.0, 1.0}},                                    // identity blocks
      {{0.5, 0.5, 0.0}, {0.6, 0.4, 0.0}, {0.0, 0.0, 1.0}},         // 2 blocks, rank 2
  };
  for (const auto& m : cases) {
    ChannelModel ch = classify_channel(m);
    auto cap = capacity_value(ch);
    if (!cap.exact) continue;
    double increment =
        ch.channel_class() == ChannelClass::BlockDiagonal
            ? (static_cast<double>(ch.block_count()) - 1.0) / 2.0
            : 0.0;
    CHECK(cap.value == (static_cast<double>(ch.rank()) - 1.0) / 2.0 + increment);
  }
}

TEST_CASE("zigzag and general classes are bounds-only") {
  ChannelModel zigzag = classify_channel(
      {{0.5, 0.5, 0.0}, {0.0, 0.4, 0.6}, {0.0, 0.0, 1.0}});
  auto cap = capacity_value(zigzag);
  CHECK_FALSE(cap.exact);
  CHECK(cap.lower == 1.0);  // rank 3
  CHECK(cap.upper == 1.5);  // 3(q-1)/4
  CHECK(cap.upper_conditional);

  ChannelModel general = classify_channel({{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}});
  auto gcap = capacity_value(general);
  CHECK_FALSE(gcap.exact);
  CHECK(gcap.upper == 0.5);  // (ext-1)/2 with ext = 2
}

TEST_CASE("remark constant") {
  ChannelModel uniform = classify_channel({{0.5, 0.5}, {0.5, 0.5}});
  double expected = 0.5 * std::log(2.0 * std::numbers::pi * kDefaultAlpha * kDefaultAlpha) +
                    2.0 / 12.0;
  CHECK(remark1_c(uniform) == doctest::Approx(expected).epsilon(1e-14));

  // c* = 1/9 for the 0.9/0.1 rows.
  ChannelModel bsc = classify_channel({{0.9, 0.1}, {0.1, 0.9}});
  double c_star = (0.1 / 0.9);
  double expected_bsc =
      0.5 * std::log(2.0 * std::numbers::pi * kDefaultAlpha * kDefaultAlpha / c_star) + 1.0 / 6.0;
  CHECK(remark1_c(bsc) == doctest::Approx(expected_bsc).epsilon(1e-14));

  // n-refined remainder is strictly smaller.
  CHECK(remark1_c(bsc, kDefaultAlpha, 100) < remark1_c(bsc));

  ChannelModel z = classify_channel({{0.5, 0.5}, {0.0, 1.0}});
  CHECK_THROWS_AS(remark1_c(z), std::domain_error);
}

TEST_CASE("stirling bound on the own-type probability") {
  // Single symbol: bound is 1/(12n) and the exact value is 0.
  for (long long n : {1ll, 5ll, 9ll}) {
    NTypeVector t{n};
    CHECK(prob_a_stirling_bound(t) ==
          doctest::Approx(1.0 / (12.0 * static_cast<double>(n))).epsilon(1e-14));
    CHECK(-multinomial_log_prob(t, t.distribution()).value <= prob_a_stirling_bound(t));
  }

  NTypeVector pair{1, 1};
  double expected = -0.5 * std::log(2.0) + 0.5 * std::log(2.0 * std::numbers::pi) + 1.0 / 6.0;
  CHECK(prob_a_stirling_bound(pair) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(prob_a_stirling_bound(pair) >= std::log(2.0));

  NTypeVector fours{4, 4};
  CHECK(prob_a_stirling_bound(fours) >= -multinomial_log_prob(fours, fours.distribution()).value);

  // Zero entries reduce to the positive-count sub-type.
  CHECK(prob_a_stirling_bound(NTypeVector{1, 0, 1}) ==
        doctest::Approx(prob_a_stirling_bound(pair)).epsilon(1e-14));
}

TEST_CASE("petrov point-mass bound") {
  CHECK(std::isinf(petrov_bound({0.0, 1.0, 0.0})));
  CHECK(petrov_bound({0.1, 0.9, 0.5}) ==
        doctest::Approx(kDefaultAlpha / std::sqrt(0.7)).epsilon(1e-14));

  // Exact binomial point masses up to n = 30.
  for (long long n = 1; n <= 30; ++n) {
    std::vector<double> probs(static_cast<std::size_t>(n), 0.5);
    double bound = petrov_bound(probs);
    for (long long w = 0; w <= n; ++w) {
      double mass = std::exp(log_binomial(n, w) - static_cast<double>(n) * std::log(2.0));
      CHECK(mass <= bound * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("balls in bins bound") {
  CHECK(balls_in_bins_bound(ProbVector{1.0}, {{1.0}, {1.0}}) == doctest::Approx(1.0));

  // Uniform relative probabilities give c* = 1 and the clean multinomial form.
  ProbVector pi{0.5, 0.5};
  std::vector<std::vector<double>> rel(10, {0.5, 0.5});
  double bound = balls_in_bins_bound(pi, rel);
  CHECK(bound == doctest::Approx(kDefaultAlpha / std::sqrt(10.0 * 0.5)).epsilon(1e-14));
  double exact_mass = std::exp(log_binomial(10, 5) - 10.0 * std::log(2.0));
  CHECK(exact_mass <= bound);

  // Balanced ternary case.
  ProbVector pi3{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::vector<std::vector<double>> rel3(9, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  double mass3 = multinomial_log_prob(NTypeVector{3, 3, 3}, pi3).prob();
  CHECK(mass3 <= balls_in_bins_bound(pi3, rel3));

  // Heterogeneous balls: exact point mass by dynamic programming over balls.
  std::vector<std::vector<double>> mixed = {
      {0.9, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.1, 0.9}, {0.5, 0.5}, {0.7, 0.3}};
  // P[N1 = 3] with per-ball bin-1 probabilities.
  std::vector<double> dp(7, 0.0);
  dp[0] = 1.0;
  for (const auto& ball : mixed) {
    for (int c = 6; c >= 1; --c) dp[static_cast<std::size_t>(c)] =
        dp[static_cast<std::size_t>(c)] * (1 - ball[0]) + dp[static_cast<std::size_t>(c - 1)] * ball[0];
    dp[0] *= 1 - ball[0];
  }
  CHECK(dp[3] <= balls_in_bins_bound(ProbVector{0.5, 0.5}, mixed));

  CHECK_THROWS_AS(balls_in_bins_bound(ProbVector{1.0, 0.0}, mixed), std::domain_error);
}

TEST_CASE("bernstein tail") {
  auto at_e = bernstein_tail(100.0, 4.0, std::numbers::e);
  CHECK(at_e.applicable);
  CHECK(at_e.prob_bound == doctest::Approx(2.0 / std::numbers::e).epsilon(1e-14));

  // The footnote choice gamma = 40 q keeps the bound meaningful once
  // E[Y] > 2 gamma ln n.
  int q = 3;
  double gamma = 40.0 * q;
  auto big = bernstein_tail(3000.0, gamma, 10.0);
  CHECK(big.applicable);
  CHECK(big.floor_value == doctest::Approx(600.0));

  auto small = bernstein_tail(5.0, gamma, 10.0);
  CHECK_FALSE(small.applicable);
}

TEST_CASE("mutual information bound") {
  // Rank-1: the net is one point and the gap vanishes.
  ChannelModel flat = classify_channel({{0.5, 0.5}, {0.5, 0.5}});
  SubspaceNet net = net_for_n(flat, 1000);
  CHECK(net.centers.size() == 1);
  double bound = mi_upper_bound(1.0, 0.0);
  CHECK(bound == doctest::Approx(1.0));
  CHECK(exact::exact_mutual_information(flat, 6) <= bound);

  // The bound grows like (1/2) ln n for a rank-2 channel.
  ChannelModel bsc = classify_channel({{0.9, 0.1}, {0.1, 0.9}});
  std::vector<long long> ns = {100, 1000, 10000};
  std::vector<double> values;
  for (long long n : ns) {
    values.push_back(mi_upper_bound(static_cast<double>(net_for_n(bsc, n).centers.size()), 0.0));
  }
  double slope = (values[2] - values[0]) / (std::log(10000.0) - std::log(100.0));
  CHECK(slope > 0.45);
  CHECK(slope < 0.55);
  CHECK(mi_asymptotic_form(bsc, 100) == doctest::Approx(0.5 * std::log(100.0)));

  // Erasure with q = 2 has the same (q-1)/2 trend.
  ChannelModel erasure = classify_channel({{0.7, 0.0, 0.3}, {0.0, 0.6, 0.4}});
  double e_lo = mi_upper_bound(static_cast<double>(net_for_n(erasure, 100).centers.size()), 0.0);
  double e_hi = mi_upper_bound(static_cast<double>(net_for_n(erasure, 10000).centers.size()), 0.0);
  double e_slope = (e_hi - e_lo) / (std::log(10000.0) - std::log(100.0));
  CHECK(e_slope > 0.45);
  CHECK(e_slope < 0.55);
}

TEST_CASE("sampling-without-replacement comparison bounds") {
  auto one = stam_bounds(2, 12, 1, 0.5);
  CHECK(one.stam_small_m == 0.0);

  auto full = stam_bounds(3, 12, 12, 0.5);
  CHECK(full.stam_small_m == doctest::Approx((3.0 - 1.0) / 2.0 * 12.0));  // far off at m = n
  CHECK_FALSE(full.stam_large_m.has_value());
  CHECK(full.han_value == doctest::Approx(0.5));
  CHECK(full.tightest == 0);

  auto half = stam_bounds(2, 12, 6, 0.4, kDefaultAlpha, 1.0 / 9.0);
  CHECK(half.han_value == doctest::Approx(0.2));
  CHECK(half.stam_small_m == doctest::Approx(0.5 * 30.0 / (11.0 * 7.0)).epsilon(1e-12));
  REQUIRE(half.stam_large_m.has_value());
  double harmonic = 1.0 / 7 + 1.0 / 8 + 1.0 / 9 + 1.0 / 10 + 1.0 / 11;
  CHECK(*half.stam_large_m == doctest::Approx((12.0 * harmonic - 5.0) / 11.0).epsilon(1e-12));
  CHECK(std::isfinite(half.crossover_lhs));
  CHECK(half.crossover_rhs == doctest::Approx(std::min(1.0, 2.0 * std::log(2.0))));

  // The marginal inequality with the measured constant, on a real instance.
  ChannelModel bsc = parse_channel_text("2 2\n9/10 1/10\n1/10 9/10\n");
  NTypeVector pi{6, 6};
  ProbVector py = output_marginal(pi.distribution(), bsc);
  auto rep = exact::divergence_exact(pi, bsc, py);
  for (long long m = 1; m <= 12; ++m) {
    double marginal = exact::marginal_divergence(pi, bsc, py, m);
    auto b = stam_bounds(2, 12, m, rep.gap);
    CHECK(marginal <= b.han_value + 1e-9);
  }
}

TEST_CASE("zigzag bound values") {
  CHECK(zigzag_conditional_bound(3) == doctest::Approx(1.5));
  CHECK(zigzag_conditional_bound(1) == doctest::Approx(0.0));
  // Gap to the achievable floor is (q-1)/4.
  for (int q : {3, 5}) {
    CHECK(zigzag_conditional_bound(q) - (q - 1.0) / 2.0 ==
          doctest::Approx((q - 1.0) / 4.0));
  }
}

TEST_CASE("extreme point counting") {
  CHECK(extreme_point_count(classify_channel({{1.0, 0.0}, {0.0, 1.0}})) == 2);
  CHECK(extreme_point_count(classify_channel({{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}})) == 2);
  CHECK(extreme_point_count(classify_channel(
            {{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}})) == 3);
}

TEST_CASE("bound table lists the channel's values") {
  ChannelModel bsc = classify_channel({{0.9, 0.1}, {0.1, 0.9}});
  auto table = bound_table(bsc, 1000, kDefaultAlpha);
  bool has_capacity = false, has_remark = false;
  for (const auto& row : table) {
    if (row.name == "capacity") has_capacity = true;
    if (row.name == "remark_c") has_remark = true;
  }
  CHECK(has_capacity);
  CHECK(has_remark);
}
