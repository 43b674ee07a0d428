#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>

#include "permchan/accept.hpp"
#include "permchan/exact.hpp"
#include "permchan/rational.hpp"
#include "permchan/simulate.hpp"

using namespace permchan;
using namespace permchan::simulate;

namespace {

ChannelModel bsc_09() { return classify_channel({{0.9, 0.1}, {0.1, 0.9}}); }

}  // namespace

TEST_CASE("seed derivation is deterministic and spread out") {
  CHECK(derive_seed(7, 0) == derive_seed(7, 0));
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
}

TEST_CASE("identity channel reproduces the input type") {
  ChannelModel identity = classify_channel({{1.0, 0.0}, {0.0, 1.0}});
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    NTypeVector x{7, 5};
    CHECK(sample_output_type(x, identity, rng) == x);
  }
}

TEST_CASE("rank-1 channel output matches the row law") {
  ChannelModel flat = classify_channel({{0.25, 0.75}, {0.25, 0.75}});
  std::mt19937_64 rng(11);
  long long n = 50, reps = 4000;
  long long total0 = 0;
  for (long long r = 0; r < reps; ++r) {
    // The input alternates; the output law must not care.
    NTypeVector x = (r % 2 == 0) ? NTypeVector{50, 0} : NTypeVector{0, 50};
    total0 += sample_output_type(x, flat, rng).counts[0];
  }
  double draws = static_cast<double>(n * reps);
  double expected = 0.25 * draws;
  double sigma = std::sqrt(draws * 0.25 * 0.75);
  CHECK(std::abs(static_cast<double>(total0) - expected) < 4.0 * sigma);
}

TEST_CASE("law of large numbers at n = 10^4") {
  ChannelModel bsc = bsc_09();
  std::mt19937_64 rng(5);
  NTypeVector x{10000, 0};
  NTypeVector y = sample_output_type(x, bsc, rng);
  double sigma = std::sqrt(10000 * 0.9 * 0.1);
  CHECK(std::abs(static_cast<double>(y.counts[0]) - 9000.0) <= 3.0 * sigma);
}

TEST_CASE("grid codebook at n=100, R=0.5") {
  Codebook book = build_grid_codebook(bsc_09(), 100, 0.5);
  REQUIRE(book.message_count() == 10);
  // sqrt(100 ln 100) ~ 21.5 does not fit 10 codewords, so the spacing drops
  // to the widest that fits: floor(100/9) = 11.
  for (std::size_t j = 0; j < book.codewords.size(); ++j) {
    CHECK(book.codewords[j].counts[1] == static_cast<long long>(j) * 11);
    CHECK(book.codewords[j].n() == 100);
  }
}

TEST_CASE("grid codebook uses sqrt(n ln n) spacing when it fits") {
  // M = 2 at n = 100: spacing ceil(sqrt(100 ln 100)) = 22.
  double rate_for_2 = std::log(2.0) / std::log(100.0);
  Codebook book = build_grid_codebook(bsc_09(), 100, rate_for_2);
  REQUIRE(book.message_count() == 2);
  CHECK(book.codewords[0].counts == std::vector<long long>{100, 0});
  CHECK(book.codewords[1].counts == std::vector<long long>{78, 22});
}

TEST_CASE("grid codebook failure modes") {
  ChannelModel flat = classify_channel({{0.5, 0.5}, {0.5, 0.5}});
  CHECK_THROWS_AS(build_grid_codebook(flat, 100, 0.5), infeasible_rate_error);
  // More messages than n-types on the segment.
  CHECK_THROWS_AS(build_grid_codebook(bsc_09(), 16, 2.0), infeasible_rate_error);
  // Rates with fewer than 2 messages.
  CHECK_THROWS_AS(build_grid_codebook(bsc_09(), 100, 0.01), infeasible_rate_error);
}

TEST_CASE("grid codebook on a rank-3 channel uses two axes") {
  ChannelModel ch = classify_channel(
      {{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}});
  Codebook book = build_grid_codebook(ch, 64, 0.5);
  REQUIRE(book.message_count() == 8);
  std::map<std::vector<long long>, int> seen;
  for (const auto& w : book.codewords) {
    CHECK(w.n() == 64);
    seen[w.counts] += 1;
  }
  CHECK(seen.size() == book.message_count());  // all distinct
}

TEST_CASE("block code stems for the 2x2 identity") {
  ChannelModel identity = classify_channel({{1.0, 0.0}, {0.0, 1.0}});
  double rate_for_4 = std::log(4.0) / std::log(8.0);
  Codebook book = build_block_code(identity, 8, rate_for_4);
  REQUIRE(book.message_count() == 4);  // binom(n/2, beta-1) = binom(4, 1)
  // Stems a in {1..4} on symbol 1, plus the reserved 2 positions per block.
  for (long long a = 1; a <= 4; ++a) {
    CHECK(book.codewords[static_cast<std::size_t>(a - 1)].counts ==
          std::vector<long long>{a + 2, (4 - a) + 2});
  }
  CHECK(book.tag == "block-two-step");
}

TEST_CASE("block stem count scales like q-1 on identity channels") {
  // Identity blocks carry no tail rate; all messages come from stems, whose
  // count binom(n/2, q-1) must be realizable and scale like n^{q-1}.
  ChannelModel id3 = classify_channel(
      {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
  auto max_messages = [&](long long n) {
    long long stems = binomial_exact(n / 2, 2).convert_to<long long>();
    double rate = std::log(static_cast<double>(stems)) / std::log(static_cast<double>(n));
    Codebook book = build_block_code(id3, n, rate);
    CHECK(static_cast<long long>(book.message_count()) == stems);
    return static_cast<double>(stems);
  };
  double slope = (std::log(max_messages(96)) - std::log(max_messages(24))) /
                 (std::log(96.0) - std::log(24.0));
  CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("single block reduces to a grid on half the positions") {
  ChannelModel positive = bsc_09();
  double rate_for_3 = std::log(3.0) / std::log(64.0);
  Codebook block = build_block_code(positive, 64, rate_for_3);
  REQUIRE(block.message_count() == 3);
  Codebook grid = build_grid_codebook(positive, 32, std::log(3.0) / std::log(32.0));
  REQUIRE(grid.message_count() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    // Stem adds the other 32 positions onto symbol 0.
    CHECK(block.codewords[i].counts[0] == grid.codewords[i].counts[0] + 32);
    CHECK(block.codewords[i].counts[1] == grid.codewords[i].counts[1]);
  }
}

TEST_CASE("block code rejects channels with non-positive blocks") {
  ChannelModel z = classify_channel({{0.5, 0.5}, {0.0, 1.0}});
  CHECK_THROWS_AS(build_block_code(z, 8, 0.5), std::invalid_argument);
}

TEST_CASE("min divergence decoding") {
  ChannelModel identity = classify_channel({{1.0, 0.0}, {0.0, 1.0}});
  Codebook book;
  book.n = 10;
  book.codewords = {NTypeVector{10, 0}, NTypeVector{5, 5}, NTypeVector{0, 10}};
  for (std::size_t w = 0; w < book.codewords.size(); ++w) {
    CHECK(min_divergence_decode(book.codewords[w], book, identity) == w);
  }

  // The exact channel mean of codeword j wins when means are distinct.
  ChannelModel bsc = bsc_09();
  Codebook pair;
  pair.n = 10;
  pair.codewords = {NTypeVector{10, 0}, NTypeVector{0, 10}};
  CHECK(min_divergence_decode(NTypeVector{9, 1}, pair, bsc) == 0);
  CHECK(min_divergence_decode(NTypeVector{1, 9}, pair, bsc) == 1);

  // All divergences infinite: fall back to index 0.
  ChannelModel degenerate = classify_channel({{1.0, 0.0}, {1.0, 0.0}});
  CHECK(min_divergence_decode(NTypeVector{0, 10}, pair, degenerate) == 0);
}

TEST_CASE("exact ML decoding matches the Bayes rule") {
  ChannelModel bsc = bsc_09();
  Codebook book;
  book.n = 4;
  book.codewords = {NTypeVector{4, 0}, NTypeVector{1, 3}};

  // Brute-force Bayes: pick w maximizing P[type(Y)=m | pi_w], from the exact
  // sequence-level oracle.
  ChannelModel bsc_exact = parse_channel_text("2 2\n9/10 1/10\n1/10 9/10\n");
  std::vector<accept::oracle::SequenceOracle> oracles;
  for (const auto& w : book.codewords) {
    oracles.push_back(accept::oracle::sequence_oracle(w, bsc_exact));
  }
  for (const auto& m : enumerate_ntypes(4, 2)) {
    Rational best = -1;
    std::size_t bayes = 0;
    for (std::size_t w = 0; w < oracles.size(); ++w) {
      auto it = oracles[w].law_given_a.find(m.counts);
      Rational p = it == oracles[w].law_given_a.end() ? Rational(0) : it->second;
      if (p > best) {
        best = p;
        bayes = w;
      }
    }
    CHECK(exact_ml_decode(m, book, bsc) == bayes);
  }

  // Identity channel recovers exactly; equal codewords break ties to 0.
  ChannelModel identity = classify_channel({{1.0, 0.0}, {0.0, 1.0}});
  Codebook same;
  same.n = 4;
  same.codewords = {NTypeVector{2, 2}, NTypeVector{2, 2}};
  CHECK(exact_ml_decode(NTypeVector{2, 2}, same, identity) == 0);
}

TEST_CASE("noiseless simulation never errs") {
  ChannelModel identity = classify_channel({{1.0, 0.0}, {0.0, 1.0}});
  Codebook book;
  book.n = 12;
  book.codewords = {NTypeVector{12, 0}, NTypeVector{6, 6}, NTypeVector{0, 12}};
  auto outcome = simulate_error(book, identity, 2000, 99);
  CHECK(outcome.errors == 0);
}

TEST_CASE("uninformative channel with two messages errs half the time") {
  ChannelModel flat = classify_channel({{0.5, 0.5}, {0.5, 0.5}});
  Codebook book;
  book.n = 16;
  book.codewords = {NTypeVector{16, 0}, NTypeVector{0, 16}};
  auto outcome = simulate_error(book, flat, 10000, 123);
  CHECK(outcome.wilson_lo <= 0.5);
  CHECK(outcome.wilson_hi >= 0.5);
}

TEST_CASE("simulation is reproducible and thread-count invariant") {
  ChannelModel bsc = bsc_09();
  Codebook book = build_grid_codebook(bsc, 64, 0.4);
  auto a = simulate_error(book, bsc, 4000, 2024);
  auto b = simulate_error(book, bsc, 4000, 2024);
  CHECK(a.errors == b.errors);
  setenv("PERMCHAN_THREADS", "1", 1);
  auto c = simulate_error(book, bsc, 4000, 2024);
  unsetenv("PERMCHAN_THREADS");
  CHECK(a.errors == c.errors);
  auto d = simulate_error(book, bsc, 4000, 2025);
  CHECK(a.errors != d.errors);  // different seed, different sample path
}

TEST_CASE("wilson interval") {
  auto [lo0, hi0] = wilson_interval(0, 100);
  CHECK(lo0 == doctest::Approx(0.0));
  CHECK(hi0 > 0.0);
  auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo < 0.5);
  CHECK(hi > 0.5);
  CHECK(hi - lo < 0.21);
}

TEST_CASE("rate sweep marks infeasible cells") {
  ChannelModel bsc = bsc_09();
  auto cells = sweep_rate(bsc, {0.4, 3.0}, {32, 64}, 200, 5);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].feasible);
  CHECK(cells[1].feasible);
  CHECK_FALSE(cells[2].feasible);  // R = 3 needs more types than exist
  CHECK_FALSE(cells[3].feasible);
  CHECK(cells[0].outcome.trials == 200);
}
