#include "permchan/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "permchan/log_prob.hpp"
#include "permchan/parallel.hpp"

namespace permchan::exact {

namespace {

constexpr unsigned long long kEnumerationGuard = 100000000ull;

// Per-row placements: every composition of the row count over the k outputs
// that has positive probability, with its log weight
//   ln mult(t_i; N_i) + sum_j N_ij ln p_ij.
struct RowPlacement {
  std::vector<long long> counts;
  double log_weight;
};

std::vector<RowPlacement> row_placements(long long row_count, const std::vector<double>& row) {
  std::vector<RowPlacement> out;
  int k = static_cast<int>(row.size());
  for_each_composition(row_count, k, [&](const std::vector<long long>& c) {
    double lw = log_factorial(row_count);
    for (int j = 0; j < k; ++j) {
      long long v = c[static_cast<std::size_t>(j)];
      if (v == 0) continue;
      double p = row[static_cast<std::size_t>(j)];
      if (p == 0.0) return;  // unreachable placement
      lw += static_cast<double>(v) * std::log(p) - log_factorial(v);
    }
    out.push_back({c, lw});
  });
  return out;
}

struct ExactRowPlacement {
  std::vector<long long> counts;
  Rational weight;
};

std::vector<ExactRowPlacement> row_placements_exact(long long row_count,
                                                    const std::vector<Rational>& row) {
  std::vector<ExactRowPlacement> out;
  int k = static_cast<int>(row.size());
  for_each_composition(row_count, k, [&](const std::vector<long long>& c) {
    Rational w(factorial_exact(row_count));
    for (int j = 0; j < k; ++j) {
      long long v = c[static_cast<std::size_t>(j)];
      if (v == 0) continue;
      if (row[static_cast<std::size_t>(j)] == 0) return;
      w /= Rational(factorial_exact(v));
      for (long long t = 0; t < v; ++t) w *= row[static_cast<std::size_t>(j)];
    }
    out.push_back({c, w});
  });
  return out;
}

void check_enumeration_size(const NTypeVector& pi, int k) {
  unsigned long long product = 1;
  for (long long t : pi.counts) {
    unsigned long long c = composition_count(t, k, kEnumerationGuard);
    if (c != 0 && product > kEnumerationGuard / c) {
      throw std::length_error("exact: joint enumeration too large");
    }
    product *= c;
  }
}

// Online log-sum-exp cell that can also merge with another cell.
struct LseCell {
  double max = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;

  void add(double lw) {
    if (scaled == 0.0) {
      max = lw;
      scaled = 1.0;
    } else if (lw > max) {
      scaled = scaled * std::exp(max - lw) + 1.0;
      max = lw;
    } else {
      scaled += std::exp(lw - max);
    }
  }
  void merge(const LseCell& other) {
    if (other.scaled == 0.0) return;
    if (scaled == 0.0) {
      *this = other;
    } else if (other.max > max) {
      scaled = scaled * std::exp(max - other.max) + other.scaled;
      max = other.max;
    } else {
      scaled += other.scaled * std::exp(other.max - max);
    }
  }
  double log_sum() const { return max + std::log(scaled); }
};

using TypeKey = std::vector<long long>;

}  // namespace

NTypeVector JointCountMatrix::column_sums() const {
  std::size_t k = counts.front().size();
  std::vector<long long> sums(k, 0);
  for (const auto& row : counts) {
    for (std::size_t j = 0; j < k; ++j) sums[j] += row[j];
  }
  return NTypeVector(sums);
}

std::vector<JointCountMatrix> joint_count_enumerate(const NTypeVector& pi, int k) {
  if (k < 1) throw std::invalid_argument("joint_count_enumerate: k must be positive");
  check_enumeration_size(pi, k);
  int q = static_cast<int>(pi.symbols());
  std::vector<JointCountMatrix> out;
  JointCountMatrix current;
  current.counts.assign(static_cast<std::size_t>(q), std::vector<long long>(static_cast<std::size_t>(k), 0));
  std::function<void(int)> rec = [&](int row) {
    if (row == q) {
      out.push_back(current);
      return;
    }
    for_each_composition(pi.counts[static_cast<std::size_t>(row)], k,
                         [&](const std::vector<long long>& c) {
                           current.counts[static_cast<std::size_t>(row)] = c;
                           rec(row + 1);
                         });
  };
  rec(0);
  return out;
}

YTypeLaw ytype_law_given_A(const NTypeVector& pi, const ChannelModel& ch) {
  if (static_cast<int>(pi.symbols()) != ch.input_count()) {
    throw std::invalid_argument("ytype_law_given_A: dimension mismatch");
  }
  check_enumeration_size(pi, ch.output_count());
  int q = ch.input_count();
  int k = ch.output_count();

  std::vector<std::vector<RowPlacement>> rows(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    rows[static_cast<std::size_t>(i)] = row_placements(pi.counts[static_cast<std::size_t>(i)], ch.row(i));
  }

  // Partition over the first row's placements; chunk layout depends only on
  // the instance, so the chunk-order merge below is thread-count invariant.
  std::size_t chunk_count = rows[0].size();
  std::vector<std::map<TypeKey, LseCell>> partial(chunk_count);
  parallel_chunks(chunk_count, chunk_count, [&](std::size_t chunk, std::size_t, std::size_t) {
    auto& local = partial[chunk];
    std::vector<long long> colsum(static_cast<std::size_t>(k), 0);
    const RowPlacement& first = rows[0][chunk];
    for (int j = 0; j < k; ++j) colsum[static_cast<std::size_t>(j)] = first.counts[static_cast<std::size_t>(j)];
    std::function<void(int, double)> rec = [&](int row, double lw) {
      if (row == q) {
        local[colsum].add(lw);
        return;
      }
      for (const RowPlacement& rp : rows[static_cast<std::size_t>(row)]) {
        for (int j = 0; j < k; ++j) colsum[static_cast<std::size_t>(j)] += rp.counts[static_cast<std::size_t>(j)];
        rec(row + 1, lw + rp.log_weight);
        for (int j = 0; j < k; ++j) colsum[static_cast<std::size_t>(j)] -= rp.counts[static_cast<std::size_t>(j)];
      }
    };
    rec(1, first.log_weight);
  });

  std::map<TypeKey, LseCell> merged;
  for (const auto& part : partial) {
    for (const auto& [key, cell] : part) merged[key].merge(cell);
  }

  YTypeLaw law;
  law.types.reserve(merged.size());
  law.log_prob.reserve(merged.size());
  for (const auto& [key, cell] : merged) {
    law.types.push_back(NTypeVector(key));
    law.log_prob.push_back(cell.log_sum());
  }
  law.log_prob_a = multinomial_log_prob(pi, pi.distribution()).value;
  return law;
}

ExactYTypeLaw ytype_law_given_A_exact(const NTypeVector& pi, const ChannelModel& ch) {
  if (!ch.exact_matrix()) {
    throw std::invalid_argument("ytype_law_given_A_exact: channel has no exact entries");
  }
  check_enumeration_size(pi, ch.output_count());
  const RationalMatrix& m = *ch.exact_matrix();
  int q = ch.input_count();
  int k = ch.output_count();
  std::vector<std::vector<ExactRowPlacement>> rows(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    rows[static_cast<std::size_t>(i)] = row_placements_exact(pi.counts[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(i)]);
  }
  std::map<TypeKey, Rational> acc;
  std::vector<long long> colsum(static_cast<std::size_t>(k), 0);
  std::function<void(int, Rational)> rec = [&](int row, Rational w) {
    if (row == q) {
      acc[colsum] += w;
      return;
    }
    for (const auto& rp : rows[static_cast<std::size_t>(row)]) {
      for (int j = 0; j < k; ++j) colsum[static_cast<std::size_t>(j)] += rp.counts[static_cast<std::size_t>(j)];
      rec(row + 1, w * rp.weight);
      for (int j = 0; j < k; ++j) colsum[static_cast<std::size_t>(j)] -= rp.counts[static_cast<std::size_t>(j)];
    }
  };
  rec(0, Rational(1));

  ExactYTypeLaw law;
  for (const auto& [key, w] : acc) {
    law.types.push_back(NTypeVector(key));
    law.prob.push_back(w);
  }
  law.prob_a = multinomial_prob_exact(pi, pi.distribution_exact());
  return law;
}

std::optional<std::size_t> YTypeLaw::index_of(const NTypeVector& m) const {
  auto it = std::lower_bound(types.begin(), types.end(), m);
  if (it == types.end() || !(*it == m)) return std::nullopt;
  return static_cast<std::size_t>(it - types.begin());
}

double YTypeLaw::total_probability() const {
  double sum = 0.0;
  for (double lp : log_prob) sum += std::exp(lp);
  return sum;
}

double prob_A_given_ytype(const NTypeVector& pi, const ChannelModel& ch, const NTypeVector& m) {
  YTypeLaw law = ytype_law_given_A(pi, ch);
  auto idx = law.index_of(m);
  if (!idx) {
    throw std::domain_error("prob_A_given_ytype: y-type unreachable, conditional undefined");
  }
  ProbVector py = output_marginal(pi.distribution(), ch);
  double log_iid = multinomial_log_prob(m, py).value;
  return std::exp(law.log_prob[*idx] + law.log_prob_a - log_iid);
}

Rational prob_A_given_ytype_exact(const NTypeVector& pi, const ChannelModel& ch,
                                  const NTypeVector& m) {
  ExactYTypeLaw law = ytype_law_given_A_exact(pi, ch);
  auto it = std::lower_bound(law.types.begin(), law.types.end(), m);
  if (it == law.types.end() || !(*it == m)) {
    throw std::domain_error("prob_A_given_ytype_exact: y-type unreachable");
  }
  std::size_t idx = static_cast<std::size_t>(it - law.types.begin());
  std::vector<Rational> py =
      output_marginal_exact(pi.distribution_exact(), *ch.exact_matrix());
  Rational iid = multinomial_prob_exact(m, py);
  return law.prob[idx] * law.prob_a / iid;
}

DivergenceReport divergence_exact(const NTypeVector& pi, const ChannelModel& ch,
                                  const ProbVector& q) {
  if (static_cast<int>(q.size()) != ch.output_count()) {
    throw std::invalid_argument("divergence_exact: Q dimension mismatch");
  }
  DivergenceReport report;
  report.n = pi.n();
  report.pi = pi;
  report.q = q.entries();

  YTypeLaw law = ytype_law_given_A(pi, ch);
  report.log_prob_a = law.log_prob_a;
  ProbVector py = output_marginal(pi.distribution(), ch);

  // Q mass missing on a reachable output symbol makes the divergence +inf.
  std::vector<bool> offending(q.size(), false);
  for (std::size_t t = 0; t < law.types.size(); ++t) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (law.types[t].counts[j] > 0 && q[j] == 0.0) offending[j] = true;
    }
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (offending[j]) report.zero_symbols.push_back(static_cast<int>(j));
  }

  double n = static_cast<double>(report.n);
  double gap = 0.0;
  for (std::size_t t = 0; t < law.types.size(); ++t) {
    double lp = law.log_prob[t];
    double log_iid = multinomial_log_prob(law.types[t], py).value;
    gap += std::exp(lp) * (lp - log_iid);
  }
  report.gap = gap;

  if (!report.zero_symbols.empty()) {
    report.infinite = true;
    report.term_iid = std::numeric_limits<double>::infinity();
    report.direct = std::numeric_limits<double>::infinity();
    report.residual = 0.0;
    return report;
  }

  report.term_iid = n * kl_divergence(py, q);
  double direct = 0.0;
  for (std::size_t t = 0; t < law.types.size(); ++t) {
    const NTypeVector& m = law.types[t];
    double lp = law.log_prob[t];
    double log_qn = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (m.counts[j] > 0) log_qn += static_cast<double>(m.counts[j]) * std::log(q[j]);
    }
    direct += std::exp(lp) * (lp - log_type_class_size(m) - log_qn);
  }
  report.direct = direct;
  report.residual = std::abs(direct - report.term_iid - report.gap);
  return report;
}

std::vector<GapProfileRow> gap_profile(const ChannelModel& ch, QMode mode,
                                       const std::vector<long long>& n_list,
                                       const std::optional<ProbVector>& fixed_q) {
  if (mode == QMode::Fixed && !fixed_q) {
    throw std::invalid_argument("gap_profile: fixed mode needs a Q");
  }
  std::vector<GapProfileRow> rows;
  for (long long n : n_list) {
    GapProfileRow row;
    row.n = n;
    row.max_gap = -std::numeric_limits<double>::infinity();
    for (const NTypeVector& pi : enumerate_ntypes(n, ch.input_count())) {
      ProbVector q = mode == QMode::Fixed ? *fixed_q : output_marginal(pi.distribution(), ch);
      DivergenceReport rep = divergence_exact(pi, ch, q);
      if (rep.gap > row.max_gap) {
        row.max_gap = rep.gap;
        row.argmax_pi = pi;
        row.divergence_at_max = rep.direct;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double marginal_divergence(const NTypeVector& pi, const ChannelModel& ch, const ProbVector& q,
                           long long m) {
  long long n = pi.n();
  if (m < 1 || m > n) throw std::invalid_argument("marginal_divergence: need 1 <= m <= n");
  YTypeLaw law = ytype_law_given_A(pi, ch);
  int k = ch.output_count();

  double log_norm = log_factorial(n) - log_factorial(n - m);
  double total = 0.0;
  bool infinite = false;
  for_each_composition(m, k, [&](const std::vector<long long>& sub) {
    // Per-sequence probability that the first m coordinates realize a fixed
    // sequence of sub-type `sub`: hypergeometric restriction of each full type.
    LogSumAccumulator acc;
    for (std::size_t t = 0; t < law.types.size(); ++t) {
      const auto& full = law.types[t].counts;
      double lw = law.log_prob[t] - log_norm;
      bool ok = true;
      for (int j = 0; j < k; ++j) {
        long long want = sub[static_cast<std::size_t>(j)];
        if (want == 0) continue;
        if (full[static_cast<std::size_t>(j)] < want) {
          ok = false;
          break;
        }
        lw += log_factorial(full[static_cast<std::size_t>(j)]) -
              log_factorial(full[static_cast<std::size_t>(j)] - want);
      }
      if (ok) acc.add(lw);
    }
    if (acc.empty()) return;  // unreachable sub-type
    double log_pseq = acc.log_sum();
    double log_qm = 0.0;
    for (int j = 0; j < k; ++j) {
      long long c = sub[static_cast<std::size_t>(j)];
      if (c == 0) continue;
      if (q[static_cast<std::size_t>(j)] == 0.0) {
        infinite = true;
        return;
      }
      log_qm += static_cast<double>(c) * std::log(q[static_cast<std::size_t>(j)]);
    }
    double log_mass = log_type_class_size(NTypeVector(sub)) + log_pseq;
    total += std::exp(log_mass) * (log_pseq - log_qm);
  });
  if (infinite) return std::numeric_limits<double>::infinity();
  return total;
}

std::vector<TightnessRow> tightness_probe(const std::vector<long long>& n_list) {
  std::vector<TightnessRow> rows;
  for (long long n : n_list) {
    if (n < 2 || n % 2 != 0) {
      throw std::invalid_argument("tightness_probe: n must be even and >= 2");
    }
    double eps = 1.0 / static_cast<double>(n);
    ChannelModel bsc = classify_channel({{1.0 - eps, eps}, {eps, 1.0 - eps}});
    ChannelModel identity = classify_channel({{1.0, 0.0}, {0.0, 1.0}});
    NTypeVector pi({n / 2, n / 2});
    ProbVector q{0.5, 0.5};
    TightnessRow row;
    row.n = n;
    row.gap_bsc = divergence_exact(pi, bsc, q).gap;
    row.gap_identity = divergence_exact(pi, identity, q).gap;
    rows.push_back(row);
  }
  return rows;
}

double exact_mutual_information(const ChannelModel& ch, long long n) {
  auto types = enumerate_ntypes(n, ch.input_count());
  std::vector<YTypeLaw> laws;
  laws.reserve(types.size());
  for (const auto& pi : types) laws.push_back(ytype_law_given_A(pi, ch));

  std::map<TypeKey, double> marginal;
  double prior = 1.0 / static_cast<double>(types.size());
  for (const auto& law : laws) {
    for (std::size_t t = 0; t < law.types.size(); ++t) {
      marginal[law.types[t].counts] += prior * std::exp(law.log_prob[t]);
    }
  }
  double info = 0.0;
  for (const auto& law : laws) {
    for (std::size_t t = 0; t < law.types.size(); ++t) {
      double p = std::exp(law.log_prob[t]);
      if (p <= 0.0) continue;
      info += prior * p * (law.log_prob[t] - std::log(marginal[law.types[t].counts]));
    }
  }
  return info;
}

}  // namespace permchan::exact
