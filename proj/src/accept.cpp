#include "permchan/accept.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "permchan/bounds.hpp"
#include "permchan/covering.hpp"
#include "permchan/exact.hpp"
#include "permchan/hull.hpp"
#include "permchan/prob_vector.hpp"
#include "permchan/simulate.hpp"

namespace permchan::accept {

namespace {

constexpr std::uint64_t kBatterySeed = 20240611ull;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Random stochastic row with entries j/1000, every entry >= 50/1000.
std::vector<long long> random_milli_row(std::mt19937_64& rng, int k, long long min_milli) {
  std::vector<long long> row(static_cast<std::size_t>(k), min_milli);
  long long remaining = 1000 - min_milli * k;
  for (long long u = 0; u < remaining; ++u) {
    row[simulate::bounded_uint(rng, static_cast<std::uint64_t>(k))] += 1;
  }
  return row;
}

ChannelModel random_positive_channel(std::mt19937_64& rng, int q, int k,
                                     long long min_milli = 50) {
  Matrix m(static_cast<std::size_t>(q));
  RationalMatrix exact(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    auto row = random_milli_row(rng, k, min_milli);
    for (long long v : row) {
      m[static_cast<std::size_t>(i)].push_back(static_cast<double>(v) / 1000.0);
      exact[static_cast<std::size_t>(i)].push_back(Rational(v, 1000));
    }
  }
  return classify_channel(m, exact);
}

NTypeVector random_type(std::mt19937_64& rng, long long n, int q) {
  std::vector<long long> counts(static_cast<std::size_t>(q), 0);
  for (long long t = 0; t < n; ++t) {
    counts[simulate::bounded_uint(rng, static_cast<std::uint64_t>(q))] += 1;
  }
  return NTypeVector(counts);
}

std::vector<ProbVector> grid_qs(int k) {
  if (k == 2) {
    return {ProbVector{0.1, 0.9}, ProbVector{0.3, 0.7}, ProbVector{0.5, 0.5},
            ProbVector{0.7, 0.3}, ProbVector{0.9, 0.1}};
  }
  if (k == 3) {
    return {ProbVector{0.8, 0.1, 0.1}, ProbVector{0.1, 0.8, 0.1}, ProbVector{0.1, 0.1, 0.8},
            ProbVector{1.0 / 3, 1.0 / 3, 1.0 / 3}, ProbVector{0.5, 0.3, 0.2}};
  }
  throw std::invalid_argument("grid_qs: unsupported alphabet");
}

// Battery instance visitor: every (channel, pi) with all types for n in
// {4, 6, 8} and 20 seeded random types for n in {10, 12}.
void for_each_battery_pi(const ChannelModel& ch,
                         const std::function<void(const NTypeVector&)>& fn) {
  int q = ch.input_count();
  for (long long n : {4ll, 6ll, 8ll}) {
    for (const auto& pi : enumerate_ntypes(n, q)) fn(pi);
  }
  std::mt19937_64 rng(kBatterySeed ^ 0xABCDu);
  for (long long n : {10ll, 12ll}) {
    for (int r = 0; r < 20; ++r) fn(random_type(rng, n, q));
  }
}

bool wilson_disjoint_below(const simulate::TrialOutcome& small_n,
                           const simulate::TrialOutcome& large_n) {
  return large_n.wilson_hi < small_n.wilson_lo &&
         large_n.error_rate < small_n.error_rate;
}

using Clock = std::chrono::steady_clock;

CriterionResult finish(int id, const std::string& name, bool pass, const std::string& detail,
                       Clock::time_point start) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.pass = pass;
  r.detail = detail;
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

CriterionResult criterion_prop3_identity() {
  auto start = Clock::now();
  long long instances = 0;
  double worst_residual = 0.0;
  for (const auto& ch : battery_channels()) {
    auto qs = grid_qs(ch.output_count());
    for_each_battery_pi(ch, [&](const NTypeVector& pi) {
      ProbVector py = output_marginal(pi.distribution(), ch);
      std::vector<ProbVector> all_q = qs;
      all_q.push_back(py);
      for (const auto& q : all_q) {
        auto rep = exact::divergence_exact(pi, ch, q);
        ++instances;
        worst_residual = std::max(worst_residual, rep.residual);
      }
    });
  }
  bool pass = instances >= 200 && worst_residual <= 1e-8;
  return finish(1, "prop3-identity", pass,
                std::to_string(instances) + " instances, worst residual " + fmt(worst_residual),
                start);
}

CriterionResult criterion_thm2_lower() {
  auto start = Clock::now();
  double worst_gap = 0.0;
  long long instances = 0;
  for (const auto& ch : battery_channels()) {
    for_each_battery_pi(ch, [&](const NTypeVector& pi) {
      ProbVector py = output_marginal(pi.distribution(), ch);
      auto rep = exact::divergence_exact(pi, ch, py);
      ++instances;
      worst_gap = std::min(worst_gap, rep.gap);
    });
  }
  bool pass = worst_gap >= -1e-9;
  return finish(2, "thm2-lower-bound", pass,
                std::to_string(instances) + " instances, min gap " + fmt(worst_gap), start);
}

CriterionResult criterion_thm2_boundedness() {
  auto start = Clock::now();
  std::ostringstream detail;
  bool pass = true;
  double worst_growth = -std::numeric_limits<double>::infinity();
  for (const auto& ch : battery_channels()) {
    auto profile = exact::gap_profile(ch, exact::QMode::MarginalPY, {4, 12});
    double growth = profile[1].max_gap - profile[0].max_gap;
    worst_growth = std::max(worst_growth, growth);
    if (growth > 0.5) pass = false;
  }
  detail << "max gap(12)-gap(4) " << fmt(worst_growth);

  // Contrast: identity 2x2 gap grows like (beta-1)/2 ln n with beta = 2.
  ChannelModel identity = classify_channel({{1.0, 0.0}, {0.0, 1.0}});
  std::vector<long long> ns = {4, 6, 8, 10, 12};
  auto profile = exact::gap_profile(identity, exact::QMode::MarginalPY, ns);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    double x = std::log(static_cast<double>(ns[i]));
    double y = profile[i].max_gap;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double count = static_cast<double>(ns.size());
  double slope = (sxy - sx * sy / count) / (sxx - sx * sx / count);
  if (std::abs(slope - 0.5) > 0.15 * 0.5) pass = false;
  detail << ", identity slope " << fmt(slope);
  return finish(3, "thm2-gap-boundedness", pass, detail.str(), start);
}

CriterionResult criterion_tightness() {
  auto start = Clock::now();
  auto rows = exact::tightness_probe({4, 8, 12});
  double min_gap = rows.front().gap_bsc;
  for (const auto& r : rows) min_gap = std::min(min_gap, r.gap_bsc);
  bool pass = min_gap > 0.01;
  return finish(4, "tightness-probe", pass, "min BSC(1/n) gap " + fmt(min_gap), start);
}

CriterionResult criterion_simplex_covering() {
  auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;
  const long long resolution = 500;
  for (int k : {2, 3, 4}) {
    for (double eps : {1.0, 0.25, 0.05}) {
      SimplexNet net = simplex_net(k, eps);
      double radius = covering_radius(net, resolution);
      if (radius > eps) pass = false;
      detail << "k" << k << "/e" << fmt(eps) << ":" << fmt(radius) << " ";
    }
  }
  for (double eps : {1.0, 0.25, 0.05}) {
    double count = static_cast<double>(simplex_net(2, eps).centers.size());
    if (count > 7.0 / std::sqrt(eps)) pass = false;
  }
  return finish(5, "simplex-covering", pass, detail.str(), start);
}

CriterionResult criterion_subspace_covering() {
  auto start = Clock::now();
  std::mt19937_64 rng(kBatterySeed ^ 0x5u);
  bool pass = true;
  std::ostringstream detail;
  double eps = 0.25;
  int checked = 0;
  double worst_dist = 0.0;
  for (int c = 0; c < 20; ++c) {
    int q = 2 + static_cast<int>(simulate::bounded_uint(rng, 3));
    int k = 2 + static_cast<int>(simulate::bounded_uint(rng, 3));
    ChannelModel ch = random_positive_channel(rng, q, k);
    SubspaceNet net = subspace_net(ch, eps);
    int ell = net.ell;
    double budget = ell >= 2
                        ? static_cast<double>(binomial_exact(q, ell).convert_to<long long>()) *
                              static_cast<double>(simplex_net(ell, eps).centers.size())
                        : static_cast<double>(q);
    if (static_cast<double>(net.centers.size()) > budget) pass = false;
    for (const auto& center : net.centers) {
      double dist = std::sqrt(distance_to_hull_sq(ch.matrix(), center));
      worst_dist = std::max(worst_dist, dist);
      if (dist > 1e-9) pass = false;
    }
    ++checked;
  }
  detail << checked << " channels, worst hull distance " << fmt(worst_dist);
  return finish(6, "subspace-covering", pass, detail.str(), start);
}

CriterionResult criterion_capacity_table() {
  auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;

  ChannelModel z = classify_channel({{0.5, 0.5}, {0.0, 1.0}});
  if (!(bounds::capacity_value(z).exact && bounds::capacity_value(z).value == 0.5)) pass = false;

  std::mt19937_64 rng(kBatterySeed ^ 0x7u);
  for (int q : {2, 3, 4}) {
    Matrix m(static_cast<std::size_t>(q), std::vector<double>(static_cast<std::size_t>(q) + 1, 0.0));
    for (int i = 0; i < q; ++i) {
      double erase = 0.05 + 0.9 * simulate::unit_double(rng);
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0 - erase;
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] = erase;
    }
    auto cap = bounds::capacity_value(classify_channel(m));
    if (!(cap.exact && cap.cls == ChannelClass::Erasure &&
          cap.value == (static_cast<double>(q) - 1.0) / 2.0)) {
      pass = false;
    }
  }

  for (int trial = 0; trial < 10; ++trial) {
    int beta = 2 + static_cast<int>(simulate::bounded_uint(rng, 2));
    std::vector<std::pair<int, int>> shapes;
    int q = 0, k = 0, expected_rank = 0;
    for (int b = 0; b < beta; ++b) {
      int qb = 1 + static_cast<int>(simulate::bounded_uint(rng, 3));
      int kb = 1 + static_cast<int>(simulate::bounded_uint(rng, 3));
      shapes.push_back({qb, kb});
      q += qb;
      k += kb;
      expected_rank += std::min(qb, kb);
    }
    Matrix m(static_cast<std::size_t>(q), std::vector<double>(static_cast<std::size_t>(k), 0.0));
    int row0 = 0, col0 = 0;
    for (auto [qb, kb] : shapes) {
      for (int i = 0; i < qb; ++i) {
        auto row = random_milli_row(rng, kb, 50);
        for (int j = 0; j < kb; ++j) {
          m[static_cast<std::size_t>(row0 + i)][static_cast<std::size_t>(col0 + j)] =
              static_cast<double>(row[static_cast<std::size_t>(j)]) / 1000.0;
        }
      }
      row0 += qb;
      col0 += kb;
    }
    // Simultaneous row/column shuffle exercises permutation invariance.
    std::vector<int> rperm(static_cast<std::size_t>(q)), cperm(static_cast<std::size_t>(k));
    for (int i = 0; i < q; ++i) rperm[static_cast<std::size_t>(i)] = i;
    for (int j = 0; j < k; ++j) cperm[static_cast<std::size_t>(j)] = j;
    for (int i = q - 1; i > 0; --i) {
      std::swap(rperm[static_cast<std::size_t>(i)],
                rperm[simulate::bounded_uint(rng, static_cast<std::uint64_t>(i + 1))]);
    }
    for (int j = k - 1; j > 0; --j) {
      std::swap(cperm[static_cast<std::size_t>(j)],
                cperm[simulate::bounded_uint(rng, static_cast<std::uint64_t>(j + 1))]);
    }
    Matrix shuffled(static_cast<std::size_t>(q), std::vector<double>(static_cast<std::size_t>(k)));
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < k; ++j) {
        shuffled[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            m[static_cast<std::size_t>(rperm[static_cast<std::size_t>(i)])]
             [static_cast<std::size_t>(cperm[static_cast<std::size_t>(j)])];
      }
    }
    ChannelModel ch = classify_channel(shuffled);
    auto cap = bounds::capacity_value(ch);
    bool ok = cap.exact && cap.cls == ChannelClass::BlockDiagonal &&
              ch.block_count() == beta && ch.rank() == expected_rank &&
              cap.value == (static_cast<double>(expected_rank) + beta - 2.0) / 2.0;
    if (!ok) pass = false;
  }

  for (int q : {2, 3, 4}) {
    Matrix m(static_cast<std::size_t>(q), std::vector<double>(static_cast<std::size_t>(q), 0.0));
    for (int i = 0; i < q; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    auto cap = bounds::capacity_value(classify_channel(m));
    if (!(cap.exact && cap.value == static_cast<double>(q) - 1.0)) pass = false;
  }

  detail << "z, erasure q=2..4, 10 block-diagonal, identity q=2..4";
  return finish(7, "capacity-table", pass, detail.str(), start);
}

CriterionResult criterion_threshold_simulation() {
  auto start = Clock::now();
  ChannelModel ch = classify_channel({{0.9, 0.1}, {0.1, 0.9}});
  const long long trials = 20000;
  const std::uint64_t seed = 7;

  auto low_small = simulate::simulate_error(simulate::build_grid_codebook(ch, 256, 0.3), ch,
                                            trials, seed);
  auto low_large = simulate::simulate_error(simulate::build_grid_codebook(ch, 4096, 0.3), ch,
                                            trials, seed);
  auto high_large = simulate::simulate_error(simulate::build_grid_codebook(ch, 4096, 0.8), ch,
                                             trials, seed);

  bool pass = wilson_disjoint_below(low_small, low_large) && high_large.error_rate >= 0.3;
  std::ostringstream detail;
  detail << "R=0.3: err(256)=" << fmt(low_small.error_rate) << " ["
         << fmt(low_small.wilson_lo) << "," << fmt(low_small.wilson_hi) << "], err(4096)="
         << fmt(low_large.error_rate) << " [" << fmt(low_large.wilson_lo) << ","
         << fmt(low_large.wilson_hi) << "]; R=0.8: err(4096)=" << fmt(high_large.error_rate);
  return finish(8, "threshold-simulation", pass, detail.str(), start);
}

CriterionResult criterion_bound_dominance() {
  auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;

  // Stirling bound dominates the exact multinomial on every type.
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int q = 1; q <= 4; ++q) {
    for (long long n = 1; n <= 14; ++n) {
      for (const auto& t : enumerate_ntypes(n, q)) {
        double exact_value = -multinomial_log_prob(t, t.distribution()).value;
        double bound = bounds::prob_a_stirling_bound(t);
        worst_margin = std::min(worst_margin, bound - exact_value);
        if (bound + 1e-12 < exact_value) pass = false;
      }
    }
  }
  detail << "stirling min margin " << fmt(worst_margin);

  // Han/Corollary-style marginal inequality against exact marginal divergences.
  auto battery = battery_channels();
  for (const auto& ch : battery) {
    auto qs = grid_qs(ch.output_count());
    for (long long n : {6ll, 10ll}) {
      std::vector<long long> balanced(static_cast<std::size_t>(ch.input_count()),
                                      n / ch.input_count());
      balanced[0] += n - (n / ch.input_count()) * ch.input_count();
      NTypeVector pi(balanced);
      ProbVector py = output_marginal(pi.distribution(), ch);
      for (const ProbVector& q : {py, qs[0]}) {
        auto rep = exact::divergence_exact(pi, ch, q);
        double base = kl_divergence(py, q);
        for (long long m = 1; m <= n; ++m) {
          double marginal = exact::marginal_divergence(pi, ch, q, m);
          double budget = static_cast<double>(m) * base +
                          static_cast<double>(m) / static_cast<double>(n) * rep.gap;
          if (marginal > budget + 1e-9) pass = false;
        }
      }
    }
  }

  // Mutual-information chain with the measured worst-case gap.
  double worst_mi_slack = std::numeric_limits<double>::infinity();
  for (const auto& ch : battery) {
    for (long long n : {4ll, 6ll, 8ll}) {
      double info = exact::exact_mutual_information(ch, n);
      auto profile = exact::gap_profile(ch, exact::QMode::MarginalPY, {n});
      SubspaceNet net = net_for_n(ch, n);
      double bound = bounds::mi_upper_bound(static_cast<double>(net.centers.size()),
                                            profile[0].max_gap);
      worst_mi_slack = std::min(worst_mi_slack, bound - info);
      if (info > bound + 1e-9) pass = false;
    }
  }
  detail << ", MI min slack " << fmt(worst_mi_slack);
  return finish(9, "bound-dominance", pass, detail.str(), start);
}

CriterionResult criterion_oracle_equivalence() {
  auto start = Clock::now();
  bool pass = true;
  long long checked = 0;

  std::vector<std::pair<ChannelModel, NTypeVector>> instances;
  auto battery = battery_channels();
  auto add = [&](const ChannelModel& ch, std::vector<long long> pi) {
    instances.push_back({ch, NTypeVector(std::move(pi))});
  };
  // k^n <= 3^6 throughout.
  add(battery[0], {3, 3});          // 2x2, n=6
  add(battery[0], {5, 1});          // 2x2, n=6
  add(battery[0], {4, 4});          // 2x2, n=8
  add(battery[3], {2, 2});          // 2x3, n=4
  add(battery[6], {3, 2, 3});       // 3x2, n=8
  add(battery[9], {2, 1, 1});       // 3x3, n=4
  add(battery[9], {2, 2, 2});       // 3x3, n=6

  ChannelModel erased = parse_channel_text("2 3\n7/10 0 3/10\n0 3/5 2/5\n");
  add(erased, {2, 2});
  ChannelModel identity = parse_channel_text("2 2\n1 0\n0 1\n");
  add(identity, {3, 2});

  for (const auto& [ch, pi] : instances) {
    auto fast = exact::ytype_law_given_A_exact(pi, ch);
    auto slow = oracle::sequence_oracle(pi, ch);
    if (fast.prob_a != slow.prob_a) pass = false;
    if (fast.types.size() != slow.law_given_a.size()) pass = false;
    for (std::size_t t = 0; t < fast.types.size(); ++t) {
      auto it = slow.law_given_a.find(fast.types[t].counts);
      if (it == slow.law_given_a.end() || it->second != fast.prob[t]) {
        pass = false;
        break;
      }
    }
    ++checked;
  }
  return finish(10, "oracle-equivalence", pass,
                std::to_string(checked) + " instances matched exactly", start);
}

}  // namespace

std::vector<ChannelModel> battery_channels() {
  std::vector<ChannelModel> out;
  std::mt19937_64 rng(kBatterySeed);
  for (int q : {2, 3}) {
    for (int k : {2, 3}) {
      for (int c = 0; c < 3; ++c) out.push_back(random_positive_channel(rng, q, k));
    }
  }
  return out;
}

CriterionResult run_criterion(int id) {
  switch (id) {
    case 1: return criterion_prop3_identity();
    case 2: return criterion_thm2_lower();
    case 3: return criterion_thm2_boundedness();
    case 4: return criterion_tightness();
    case 5: return criterion_simplex_covering();
    case 6: return criterion_subspace_covering();
    case 7: return criterion_capacity_table();
    case 8: return criterion_threshold_simulation();
    case 9: return criterion_bound_dominance();
    case 10: return criterion_oracle_equivalence();
    default: throw std::invalid_argument("run_criterion: id must be 1..10");
  }
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "all" || suite.empty()) return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (suite == "sandwich") return {1, 2, 3, 4};
  if (suite == "covering") return {5, 6};
  if (suite == "capacity") return {7};
  if (suite == "simulate") return {8};
  if (suite == "bounds") return {9};
  if (suite == "oracle") return {10};
  throw std::invalid_argument("unknown suite: " + suite);
}

std::vector<CriterionResult> run_suite(const std::string& suite) {
  std::vector<CriterionResult> out;
  for (int id : suite_criteria(suite)) out.push_back(run_criterion(id));
  return out;
}

std::string format_result_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "[PASS]" : "[FAIL]") << " C" << r.id << " " << r.name << ": " << r.detail
     << " (" << fmt(r.seconds) << "s)";
  return os.str();
}

namespace oracle {

namespace {

// All distinct arrangements of the multiset with the given counts.
std::vector<std::vector<int>> type_class_sequences(const NTypeVector& pi) {
  std::vector<int> seq;
  for (std::size_t i = 0; i < pi.symbols(); ++i) {
    for (long long c = 0; c < pi.counts[i]; ++c) seq.push_back(static_cast<int>(i));
  }
  std::vector<std::vector<int>> out;
  std::sort(seq.begin(), seq.end());
  do {
    out.push_back(seq);
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

void for_each_output_sequence(long long n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> y(static_cast<std::size_t>(n), 0);
  for (;;) {
    fn(y);
    long long pos = n - 1;
    while (pos >= 0 && y[static_cast<std::size_t>(pos)] == k - 1) {
      y[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) return;
    ++y[static_cast<std::size_t>(pos)];
  }
}

}  // namespace

SequenceOracle sequence_oracle(const NTypeVector& pi, const ChannelModel& ch) {
  if (!ch.exact_matrix()) {
    throw std::invalid_argument("sequence_oracle: channel has no exact entries");
  }
  const RationalMatrix& p = *ch.exact_matrix();
  long long n = pi.n();
  int k = ch.output_count();
  auto inputs = type_class_sequences(pi);
  Rational class_size(static_cast<long long>(inputs.size()));

  SequenceOracle out;
  // P[A=1] = |T_n(pi)| * prod_i pi_i^{c_i}.
  std::vector<Rational> pi_exact = pi.distribution_exact();
  Rational point = 1;
  for (std::size_t i = 0; i < pi.symbols(); ++i) {
    for (long long c = 0; c < pi.counts[i]; ++c) point *= pi_exact[i];
  }
  out.prob_a = class_size * point;

  std::vector<Rational> py = output_marginal_exact(pi_exact, p);
  for_each_output_sequence(n, k, [&](const std::vector<int>& y) {
    std::vector<long long> m(static_cast<std::size_t>(k), 0);
    for (int s : y) ++m[static_cast<std::size_t>(s)];
    Rational mass = 0;
    for (const auto& x : inputs) {
      Rational w = 1;
      for (long long t = 0; t < n; ++t) {
        w *= p[static_cast<std::size_t>(x[static_cast<std::size_t>(t)])]
              [static_cast<std::size_t>(y[static_cast<std::size_t>(t)])];
        if (w == 0) break;
      }
      mass += w;
    }
    if (mass != 0) out.law_given_a[m] += mass / class_size;
    Rational iid = 1;
    for (int s : y) iid *= py[static_cast<std::size_t>(s)];
    if (iid != 0) out.law_iid[m] += iid;
  });
  return out;
}

std::map<std::vector<long long>, Rational> marginal_per_sequence(const NTypeVector& pi,
                                                                 const ChannelModel& ch,
                                                                 long long m) {
  if (!ch.exact_matrix()) {
    throw std::invalid_argument("marginal_per_sequence: channel has no exact entries");
  }
  const RationalMatrix& p = *ch.exact_matrix();
  long long n = pi.n();
  if (m < 1 || m > n) throw std::invalid_argument("marginal_per_sequence: need 1 <= m <= n");
  int k = ch.output_count();
  auto inputs = type_class_sequences(pi);
  Rational class_size(static_cast<long long>(inputs.size()));

  std::map<std::vector<long long>, Rational> out;
  // One canonical representative per sub-type: the sorted sequence.
  for_each_composition(m, k, [&](const std::vector<long long>& sub) {
    std::vector<int> rep;
    for (int j = 0; j < k; ++j) {
      for (long long c = 0; c < sub[static_cast<std::size_t>(j)]; ++c) rep.push_back(j);
    }
    Rational total = 0;
    for_each_output_sequence(n - m, k, [&](const std::vector<int>& suffix) {
      std::vector<int> y = rep;
      y.insert(y.end(), suffix.begin(), suffix.end());
      Rational mass = 0;
      for (const auto& x : inputs) {
        Rational w = 1;
        for (long long t = 0; t < n; ++t) {
          w *= p[static_cast<std::size_t>(x[static_cast<std::size_t>(t)])]
                [static_cast<std::size_t>(y[static_cast<std::size_t>(t)])];
          if (w == 0) break;
        }
        mass += w;
      }
      total += mass / class_size;
    });
    if (total != 0) out[sub] = total;
  });
  return out;
}

}  // namespace oracle

}  // namespace permchan::accept
