#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "permchan/accept.hpp"
#include "permchan/exact.hpp"
#include "permchan/rational.hpp"

using namespace permchan;
using permchan::accept::oracle::marginal_per_sequence;
using permchan::accept::oracle::sequence_oracle;

namespace {

ChannelModel bsc_09() { return parse_channel_text("2 2\n9/10 1/10\n1/10 9/10\n"); }
ChannelModel identity2() { return parse_channel_text("2 2\n1 0\n0 1\n"); }
ChannelModel erasure23() { return parse_channel_text("2 3\n7/10 0 3/10\n0 3/5 2/5\n"); }

}  // namespace

TEST_CASE("joint count enumeration sizes") {
  CHECK(exact::joint_count_enumerate(NTypeVector{1, 1}, 2).size() == 4);
  CHECK(exact::joint_count_enumerate(NTypeVector{2}, 2).size() == 3);
  auto six = exact::joint_count_enumerate(NTypeVector{2, 1}, 2);
  CHECK(six.size() == 6);
  for (const auto& m : six) {
    CHECK(m.counts[0][0] + m.counts[0][1] == 2);
    CHECK(m.counts[1][0] + m.counts[1][1] == 1);
  }
  CHECK_THROWS_AS(exact::joint_count_enumerate(NTypeVector{1000, 1000}, 6), std::length_error);
}

TEST_CASE("ytype law on a noiseless channel is a point mass") {
  auto law = exact::ytype_law_given_A(NTypeVector{3, 2}, identity2());
  REQUIRE(law.types.size() == 1);
  CHECK(law.types[0] == NTypeVector{3, 2});
  CHECK(law.log_prob[0] == doctest::Approx(0.0));
}

TEST_CASE("ytype law for the uniform channel") {
  ChannelModel uniform = parse_channel_text("2 2\n1/2 1/2\n1/2 1/2\n");
  auto law = exact::ytype_law_given_A(NTypeVector{1, 1}, uniform);
  REQUIRE(law.types.size() == 3);
  CHECK(std::exp(law.log_prob[0]) == doctest::Approx(0.25).epsilon(1e-14));  // (0,2)
  CHECK(std::exp(law.log_prob[1]) == doctest::Approx(0.5).epsilon(1e-14));   // (1,1)
  CHECK(std::exp(law.log_prob[2]) == doctest::Approx(0.25).epsilon(1e-14));  // (2,0)
}

TEST_CASE("ytype law for the erasure channel") {
  auto law = exact::ytype_law_given_A(NTypeVector{1, 1}, erasure23());
  REQUIRE(law.types.size() == 4);
  auto prob_of = [&](std::vector<long long> m) {
    auto idx = law.index_of(NTypeVector(m));
    REQUIRE(idx.has_value());
    return std::exp(law.log_prob[*idx]);
  };
  CHECK(prob_of({1, 1, 0}) == doctest::Approx(0.42).epsilon(1e-14));
  CHECK(prob_of({1, 0, 1}) == doctest::Approx(0.28).epsilon(1e-14));
  CHECK(prob_of({0, 1, 1}) == doctest::Approx(0.18).epsilon(1e-14));
  CHECK(prob_of({0, 0, 2}) == doctest::Approx(0.12).epsilon(1e-14));
  CHECK(law.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ytype law normalizes across instances") {
  for (const auto& ch : accept::battery_channels()) {
    for (const auto& pi : enumerate_ntypes(5, ch.input_count())) {
      auto law = exact::ytype_law_given_A(pi, ch);
      CHECK(law.total_probability() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("ytype law is bit-stable across thread counts") {
  NTypeVector pi{4, 4, 4};
  ChannelModel ch = accept::battery_channels()[9];  // 3x3
  setenv("PERMCHAN_THREADS", "1", 1);
  auto one = exact::ytype_law_given_A(pi, ch);
  setenv("PERMCHAN_THREADS", "4", 1);
  auto four = exact::ytype_law_given_A(pi, ch);
  unsetenv("PERMCHAN_THREADS");
  REQUIRE(one.log_prob.size() == four.log_prob.size());
  for (std::size_t i = 0; i < one.log_prob.size(); ++i) {
    CHECK(one.log_prob[i] == four.log_prob[i]);  // exact bit equality
  }
}

TEST_CASE("conditional probability of A given the output type") {
  CHECK(exact::prob_A_given_ytype(NTypeVector{2, 1}, identity2(), NTypeVector{2, 1}) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Output independent of input: conditional equals the prior P[A=1].
  ChannelModel flat = parse_channel_text("2 2\n3/10 7/10\n3/10 7/10\n");
  NTypeVector pi{1, 1};
  double prior = multinomial_log_prob(pi, pi.distribution()).prob();
  CHECK(exact::prob_A_given_ytype(pi, flat, NTypeVector{1, 1}) ==
        doctest::Approx(prior).epsilon(1e-12));

  // Full 16-term enumeration oracle for the BSC instance.
  ChannelModel bsc = bsc_09();
  double lib = exact::prob_A_given_ytype(pi, bsc, NTypeVector{1, 1});
  CHECK(lib == doctest::Approx(0.82).epsilon(1e-13));
  Rational oracle_value = exact::prob_A_given_ytype_exact(pi, bsc, NTypeVector{1, 1});
  CHECK(oracle_value == Rational(82, 100));

  CHECK_THROWS_AS(exact::prob_A_given_ytype(NTypeVector{2, 0}, identity2(), NTypeVector{0, 2}),
                  std::domain_error);
}

TEST_CASE("divergence on a single-letter channel vanishes at Q = P_Y") {
  ChannelModel ch = parse_channel_text("1 2\n2/5 3/5\n");
  auto rep = exact::divergence_exact(NTypeVector{1}, ch, ProbVector{0.4, 0.6});
  CHECK(rep.direct == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(rep.gap == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("divergence for the noiseless pair type") {
  auto rep = exact::divergence_exact(NTypeVector{1, 1}, identity2(), ProbVector{0.5, 0.5});
  CHECK(rep.direct == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(rep.term_iid == doctest::Approx(0.0));
  CHECK(rep.gap == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(rep.residual <= 1e-12);
}

TEST_CASE("decomposition identity and the sequence oracle agree") {
  ChannelModel bsc = bsc_09();
  NTypeVector pi{2, 2};
  ProbVector q{0.5, 0.5};
  auto rep = exact::divergence_exact(pi, bsc, q);
  CHECK(rep.residual < 1e-10);
  CHECK(rep.gap >= -1e-9);

  // The gap computed the second way, from P[A=1|m] and P[A=1] directly.
  auto law = exact::ytype_law_given_A(pi, bsc);
  double gap2 = 0.0;
  for (std::size_t t = 0; t < law.types.size(); ++t) {
    double cond = exact::prob_A_given_ytype(pi, bsc, law.types[t]);
    gap2 += std::exp(law.log_prob[t]) * (std::log(cond) - law.log_prob_a);
  }
  CHECK(rep.gap == doctest::Approx(gap2).epsilon(1e-10));

  // Naive 2^4 x 2^4 sequence-level enumeration.
  auto oracle = sequence_oracle(pi, bsc);
  auto fast = exact::ytype_law_given_A_exact(pi, bsc);
  REQUIRE(fast.types.size() == oracle.law_given_a.size());
  CHECK(fast.prob_a == oracle.prob_a);
  double direct_oracle = 0.0;
  for (std::size_t t = 0; t < fast.types.size(); ++t) {
    CHECK(oracle.law_given_a.at(fast.types[t].counts) == fast.prob[t]);
    double p = to_double(fast.prob[t]);
    double log_p = log_rational(fast.prob[t]);
    double log_class = log_type_class_size(fast.types[t]);
    double log_qn = static_cast<double>(pi.n()) * std::log(0.5);
    direct_oracle += p * (log_p - log_class - log_qn);
  }
  CHECK(rep.direct == doctest::Approx(direct_oracle).epsilon(1e-12));
}

TEST_CASE("zero-mass Q symbols are reported, not thrown") {
  auto rep = exact::divergence_exact(NTypeVector{1, 1}, bsc_09(), ProbVector{1.0, 0.0});
  CHECK(rep.infinite);
  REQUIRE(rep.zero_symbols.size() == 1);
  CHECK(rep.zero_symbols[0] == 1);
  CHECK(std::isinf(rep.direct));
  CHECK(std::isfinite(rep.gap));
}

TEST_CASE("marginal divergence consistency") {
  ChannelModel bsc = bsc_09();
  NTypeVector pi{3, 2};
  ProbVector py = output_marginal(pi.distribution(), bsc);
  ProbVector q{0.3, 0.7};

  auto rep = exact::divergence_exact(pi, bsc, q);
  CHECK(exact::marginal_divergence(pi, bsc, q, pi.n()) ==
        doctest::Approx(rep.direct).epsilon(1e-9));
  CHECK(exact::marginal_divergence(pi, bsc, py, 1) == doctest::Approx(0.0).epsilon(1e-12));

  double prev = 0.0;
  for (long long m = 1; m <= pi.n(); ++m) {
    double d = exact::marginal_divergence(pi, bsc, q, m);
    CHECK(d >= prev - 1e-10);  // nondecreasing in m
    prev = d;
  }
  CHECK_THROWS_AS(exact::marginal_divergence(pi, bsc, q, 6), std::invalid_argument);
}

TEST_CASE("marginal divergence against the sequence oracle") {
  ChannelModel identity = identity2();
  NTypeVector pi{2, 2};
  ProbVector q{0.5, 0.5};
  long long m = 2;
  auto per_seq = marginal_per_sequence(pi, identity, m);
  double oracle_value = 0.0;
  for (const auto& [sub, prob] : per_seq) {
    double lp = log_rational(prob);
    double log_qm = static_cast<double>(m) * std::log(0.5);
    oracle_value += to_double(prob) * std::exp(log_type_class_size(NTypeVector(sub))) *
                    (lp - log_qm);
  }
  CHECK(exact::marginal_divergence(pi, identity, q, m) ==
        doctest::Approx(oracle_value).epsilon(1e-12));
}

TEST_CASE("gap profile shapes") {
  ChannelModel bsc = bsc_09();
  auto rows = exact::gap_profile(bsc, exact::QMode::MarginalPY, {4, 8, 12});
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].max_gap - rows[0].max_gap <= 0.5);
  for (const auto& r : rows) CHECK(r.max_gap >= -1e-9);

  // Identity channel: worst gap grows like (1/2) ln n; frozen regression
  // slope over n = 4, 6, 8, 10, 12.
  ChannelModel identity = identity2();
  auto id_rows = exact::gap_profile(identity, exact::QMode::MarginalPY, {4, 6, 8, 10, 12});
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : id_rows) {
    double x = std::log(static_cast<double>(r.n));
    sx += x;
    sy += r.max_gap;
    sxx += x * x;
    sxy += x * r.max_gap;
  }
  double slope = (sxy - sx * sy / 5.0) / (sxx - sx * sx / 5.0);
  CHECK(slope == doctest::Approx(0.4626310464774298).epsilon(1e-9));

  // Rank-1 channel: output carries nothing, gap is identically zero.
  ChannelModel flat = parse_channel_text("2 2\n1/2 1/2\n1/2 1/2\n");
  for (const auto& r : exact::gap_profile(flat, exact::QMode::MarginalPY, {4, 8})) {
    CHECK(std::abs(r.max_gap) <= 1e-12);
  }
}

TEST_CASE("tightness probe") {
  auto rows = exact::tightness_probe({2, 4, 8, 12});
  REQUIRE(rows.size() == 4);
  // BSC(1/2) at n = 2 is the uniform channel, so the gap is exactly zero.
  CHECK(std::abs(rows[0].gap_bsc) <= 1e-12);
  CHECK(rows[1].gap_bsc == doctest::Approx(0.024400476363168444).epsilon(1e-9));
  CHECK(rows[2].gap_bsc == doctest::Approx(0.1474497250901267).epsilon(1e-9));
  CHECK(rows[3].gap_bsc == doctest::Approx(0.26363102948764444).epsilon(1e-9));
  double min_gap = std::min({rows[1].gap_bsc, rows[2].gap_bsc, rows[3].gap_bsc});
  CHECK(min_gap > 0.01);
  // The identity column keeps growing with ln n.
  CHECK(rows[3].gap_identity > rows[1].gap_identity);
  CHECK_THROWS_AS(exact::tightness_probe({5}), std::invalid_argument);
}

TEST_CASE("exact mutual information") {
  ChannelModel flat = parse_channel_text("2 2\n1/2 1/2\n1/2 1/2\n");
  CHECK(exact::exact_mutual_information(flat, 4) == doctest::Approx(0.0).epsilon(1e-12));

  // Noiseless: the output type reveals pi completely, I = ln |P_n|.
  CHECK(exact::exact_mutual_information(identity2(), 2) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
}
