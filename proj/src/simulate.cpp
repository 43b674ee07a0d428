#include "permchan/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "permchan/exact.hpp"
#include "permchan/parallel.hpp"
#include "permchan/prob_vector.hpp"

namespace permchan::simulate {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed + 0x9E3779B97F4A7C15ull * (index + 1));
}

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("bounded_uint: bound must be positive");
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

NTypeVector sample_output_type(const NTypeVector& x, const ChannelModel& ch,
                               std::mt19937_64& rng) {
  if (static_cast<int>(x.symbols()) != ch.input_count()) {
    throw std::invalid_argument("sample_output_type: dimension mismatch");
  }
  int k = ch.output_count();
  std::vector<long long> out(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < ch.input_count(); ++i) {
    long long count = x.counts[static_cast<std::size_t>(i)];
    if (count == 0) continue;
    const auto& row = ch.row(i);
    for (long long t = 0; t < count; ++t) {
      double u = unit_double(rng);
      double acc = 0.0;
      int chosen = k - 1;
      for (int j = 0; j < k; ++j) {
        acc += row[static_cast<std::size_t>(j)];
        if (u < acc) {
          chosen = j;
          break;
        }
      }
      ++out[static_cast<std::size_t>(chosen)];
    }
  }
  return NTypeVector(out);
}

namespace {

long long message_count_for_rate(long long n, double rate) {
  if (!(rate > 0.0)) throw infeasible_rate_error("rate must be positive");
  double m = std::pow(static_cast<double>(n), rate);
  if (m > 1e15) throw infeasible_rate_error("message count overflows the lattice");
  long long rounded = std::llround(m);
  if (rounded < 2) throw infeasible_rate_error("rate gives fewer than 2 messages");
  return rounded;
}

// Number of lattice vectors v in Z_{>=0}^dims with sum(v) * spacing <= n,
// i.e. binom(floor(n/spacing) + dims, dims), capped to avoid overflow.
unsigned long long lattice_point_count(long long n, long long spacing, int dims,
                                       unsigned long long cap) {
  long long levels = n / spacing;
  unsigned long long count = 1;
  for (int i = 1; i <= dims; ++i) {
    count = count * static_cast<unsigned long long>(levels + i) / static_cast<unsigned long long>(i);
    if (count > cap) return cap + 1;
  }
  return count;
}

// First `rank` linearly independent row indices, by Gaussian elimination in
// row order.
std::vector<int> pivot_rows(const Matrix& matrix, double tol = 1e-9) {
  Matrix work = matrix;
  int rows = static_cast<int>(work.size());
  int cols = static_cast<int>(work.front().size());
  std::vector<int> chosen;
  std::vector<bool> used_col(static_cast<std::size_t>(cols), false);
  for (int r = 0; r < rows; ++r) {
    // Reduce row r by previously chosen pivots, then look for a fresh pivot.
    int pivot_col = -1;
    for (int c = 0; c < cols; ++c) {
      if (!used_col[static_cast<std::size_t>(c)] &&
          std::abs(work[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >= tol) {
        pivot_col = c;
        break;
      }
    }
    if (pivot_col < 0) continue;
    chosen.push_back(r);
    used_col[static_cast<std::size_t>(pivot_col)] = true;
    for (int rr = r + 1; rr < rows; ++rr) {
      double factor = work[static_cast<std::size_t>(rr)][static_cast<std::size_t>(pivot_col)] /
                      work[static_cast<std::size_t>(r)][static_cast<std::size_t>(pivot_col)];
      if (factor == 0.0) continue;
      for (int c = 0; c < cols; ++c) {
        work[static_cast<std::size_t>(rr)][static_cast<std::size_t>(c)] -=
            factor * work[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
    }
  }
  return chosen;
}

// Codewords over the active symbols: base symbol absorbs the slack, the
// remaining dims axes take lattice values at the chosen spacing, first
// `messages` lattice vectors in lexicographic order.
Codebook assemble_grid(long long n, int q, const std::vector<int>& active, long long spacing,
                       long long messages) {
  Codebook book;
  book.n = n;
  book.tag = "grid";
  int dims = static_cast<int>(active.size()) - 1;
  std::vector<long long> v(static_cast<std::size_t>(dims), 0);
  std::function<void(int, long long)> rec = [&](int axis, long long used) {
    if (static_cast<long long>(book.codewords.size()) >= messages) return;
    if (axis == dims) {
      std::vector<long long> counts(static_cast<std::size_t>(q), 0);
      counts[static_cast<std::size_t>(active[0])] = n - used;
      for (int a = 0; a < dims; ++a) {
        counts[static_cast<std::size_t>(active[static_cast<std::size_t>(a + 1)])] =
            v[static_cast<std::size_t>(a)] * spacing;
      }
      book.codewords.push_back(NTypeVector(counts));
      return;
    }
    for (long long level = 0; used + level * spacing <= n; ++level) {
      v[static_cast<std::size_t>(axis)] = level;
      rec(axis + 1, used + level * spacing);
      if (static_cast<long long>(book.codewords.size()) >= messages) return;
    }
  };
  rec(0, 0);
  return book;
}

}  // namespace

Codebook build_grid_codebook(const ChannelModel& ch, long long n, double rate) {
  if (n < 2) throw std::invalid_argument("build_grid_codebook: n must be >= 2");
  long long messages = message_count_for_rate(n, rate);
  int dims = ch.rank() - 1;
  if (dims < 1) {
    throw infeasible_rate_error("rank-1 channel has no separable directions");
  }
  long long target_spacing =
      static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)))));
  long long spacing = target_spacing;
  auto fits = [&](long long d) {
    return d >= 1 &&
           lattice_point_count(n, d, dims, static_cast<unsigned long long>(messages)) >=
               static_cast<unsigned long long>(messages);
  };
  if (!fits(spacing)) {
    // Largest spacing that still fits the requested number of codewords.
    long long lo = 1, hi = std::max<long long>(1, spacing - 1);
    if (!fits(lo)) throw infeasible_rate_error("message count exceeds the available lattice");
    while (lo < hi) {
      long long mid = lo + (hi - lo + 1) / 2;
      if (fits(mid)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    spacing = lo;
  }
  std::vector<int> active = pivot_rows(ch.matrix());
  Codebook book = assemble_grid(n, ch.input_count(), active, spacing, messages);
  if (static_cast<long long>(book.codewords.size()) != messages) {
    throw infeasible_rate_error("lattice enumeration came up short");
  }
  return book;
}

Codebook build_block_code(const ChannelModel& ch, long long n, double rate_total) {
  // A single strictly positive block degenerates to a grid code on the
  // reserved half of the positions.
  for (const auto& b : ch.blocks()) {
    if (!b.strictly_positive) {
      throw std::invalid_argument("build_block_code: every block must be strictly positive");
    }
  }
  long long beta = ch.block_count();
  long long n_use = (n / (2 * beta)) * (2 * beta);
  if (n_use < 2 * beta) throw infeasible_rate_error("block code needs n >= 2 beta");
  long long reserved = n_use / (2 * beta);
  long long stem_total = n_use / 2;
  long long messages = message_count_for_rate(n, rate_total);

  // Stems: compositions of the free n/2 positions over the beta blocks with
  // the first beta-1 parts positive; count is binom(n/2, beta-1).
  std::vector<std::vector<long long>> stems;
  {
    std::vector<long long> stem(static_cast<std::size_t>(beta), 0);
    std::function<void(int, long long)> rec = [&](int b, long long remaining) {
      if (b == beta - 1) {
        stem[static_cast<std::size_t>(b)] = remaining;
        stems.push_back(stem);
        return;
      }
      for (long long v = 1; v <= remaining - (beta - 2 - b); ++v) {
        stem[static_cast<std::size_t>(b)] = v;
        rec(b + 1, remaining - v);
      }
    };
    if (beta == 1) {
      stems.push_back({stem_total});
    } else {
      rec(0, stem_total);
    }
  }
  long long m1 = static_cast<long long>(stems.size());

  // Per-block tails: grid codebooks over each block's inputs on the reserved
  // positions. Tail message counts are balanced across blocks.
  long long m2_needed = (messages + m1 - 1) / m1;
  std::vector<std::vector<NTypeVector>> tails(static_cast<std::size_t>(beta));
  long long m2 = 1;
  for (long long b = 0; b < beta; ++b) {
    const ChannelBlock& block = ch.blocks()[static_cast<std::size_t>(b)];
    long long remaining_blocks = beta - b;
    long long want = static_cast<long long>(std::ceil(
        std::pow(static_cast<double>((m2_needed + m2 - 1) / m2), 1.0 / static_cast<double>(remaining_blocks))));
    std::vector<NTypeVector> tail;
    if (want <= 1 || block.inputs.size() < 2) {
      std::vector<long long> counts(block.inputs.size(), 0);
      counts[0] = reserved;
      tail.push_back(NTypeVector(counts));
    } else {
      // Sub-channel for this block, re-normalized over its own outputs.
      Matrix sub;
      for (int i : block.inputs) {
        std::vector<double> row;
        for (int j : block.outputs) row.push_back(ch.at(i, j));
        double sum = 0.0;
        for (double v : row) sum += v;
        for (double& v : row) v /= sum;
        sub.push_back(std::move(row));
      }
      ChannelModel sub_ch = classify_channel(sub);
      double tail_rate = std::log(static_cast<double>(want)) / std::log(static_cast<double>(reserved));
      Codebook tail_book = build_grid_codebook(sub_ch, reserved, tail_rate);
      tail = tail_book.codewords;
    }
    m2 *= static_cast<long long>(tail.size());
    tails[static_cast<std::size_t>(b)] = std::move(tail);
  }
  if (m1 * m2 < messages) {
    throw infeasible_rate_error("block construction cannot reach the requested rate");
  }

  Codebook book;
  book.n = n;
  book.tag = "block-two-step";
  int q = ch.input_count();
  std::vector<std::size_t> tail_idx(static_cast<std::size_t>(beta), 0);
  for (const auto& stem : stems) {
    tail_idx.assign(static_cast<std::size_t>(beta), 0);
    for (;;) {
      std::vector<long long> counts(static_cast<std::size_t>(q), 0);
      for (long long b = 0; b < beta; ++b) {
        const ChannelBlock& block = ch.blocks()[static_cast<std::size_t>(b)];
        // Stem positions ride on the block's first input symbol.
        counts[static_cast<std::size_t>(block.inputs[0])] += stem[static_cast<std::size_t>(b)];
        const NTypeVector& tail = tails[static_cast<std::size_t>(b)][tail_idx[static_cast<std::size_t>(b)]];
        for (std::size_t a = 0; a < block.inputs.size(); ++a) {
          counts[static_cast<std::size_t>(block.inputs[a])] += tail.counts[a];
        }
      }
      book.codewords.push_back(NTypeVector(counts));
      if (static_cast<long long>(book.codewords.size()) >= messages) return book;
      // Odometer over tail indices.
      long long b = beta - 1;
      for (; b >= 0; --b) {
        if (++tail_idx[static_cast<std::size_t>(b)] < tails[static_cast<std::size_t>(b)].size()) break;
        tail_idx[static_cast<std::size_t>(b)] = 0;
      }
      if (b < 0) break;
    }
  }
  return book;
}

namespace {

// Precomputed per-codeword log-means so a decode is one dot product.
struct DecodeContext {
  std::vector<std::vector<double>> log_mu;  // -inf where mu is 0
  std::vector<ProbVector> mu;
};

DecodeContext make_context(const Codebook& codebook, const ChannelModel& ch) {
  DecodeContext ctx;
  for (const auto& w : codebook.codewords) {
    ProbVector mu = output_marginal(w.distribution(), ch);
    std::vector<double> lm(mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j) {
      lm[j] = mu[j] > 0.0 ? std::log(mu[j]) : -std::numeric_limits<double>::infinity();
    }
    ctx.log_mu.push_back(std::move(lm));
    ctx.mu.push_back(std::move(mu));
  }
  return ctx;
}

std::size_t decode_with_context(const NTypeVector& y_type, const DecodeContext& ctx) {
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  // Minimizing D(p || mu_w) over w is maximizing sum_j p_j ln mu_{w,j}.
  std::vector<double> p(y_type.counts.size());
  long long n = y_type.n();
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = static_cast<double>(y_type.counts[j]) / static_cast<double>(n);
  }
  for (std::size_t w = 0; w < ctx.log_mu.size(); ++w) {
    double score = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] == 0.0) continue;
      score += p[j] * ctx.log_mu[w][j];
    }
    if (score > best_score) {
      best_score = score;
      best = w;
    }
  }
  return best;
}

}  // namespace

std::size_t min_divergence_decode(const NTypeVector& y_type, const Codebook& codebook,
                                  const ChannelModel& ch) {
  if (codebook.codewords.empty()) throw std::invalid_argument("decode: empty codebook");
  DecodeContext ctx = make_context(codebook, ch);
  return decode_with_context(y_type, ctx);
}

std::size_t exact_ml_decode(const NTypeVector& y_type, const Codebook& codebook,
                            const ChannelModel& ch) {
  if (codebook.codewords.empty()) throw std::invalid_argument("decode: empty codebook");
  std::size_t best = 0;
  double best_log = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < codebook.codewords.size(); ++w) {
    auto law = exact::ytype_law_given_A(codebook.codewords[w], ch);
    auto idx = law.index_of(y_type);
    double lp = idx ? law.log_prob[*idx] : -std::numeric_limits<double>::infinity();
    if (lp > best_log) {
      best_log = lp;
      best = w;
    }
  }
  return best;
}

std::pair<double, double> wilson_interval(long long errors, long long trials) {
  const double z = 1.959963984540054;  // 95%
  double nt = static_cast<double>(trials);
  double phat = static_cast<double>(errors) / nt;
  double z2 = z * z;
  double denom = nt + z2;
  double center = (static_cast<double>(errors) + z2 / 2.0) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) * nt + z2 / 4.0) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TrialOutcome simulate_error(const Codebook& codebook, const ChannelModel& ch, long long trials,
                            std::uint64_t seed, Decoder decoder) {
  if (trials < 1) throw std::invalid_argument("simulate_error: trials must be >= 1");
  std::size_t m = codebook.message_count();
  DecodeContext ctx;
  if (decoder == Decoder::MinDivergence) ctx = make_context(codebook, ch);

  std::size_t chunk_count = std::min<std::size_t>(256, static_cast<std::size_t>(trials));
  std::vector<long long> chunk_errors(chunk_count, 0);
  parallel_chunks(static_cast<std::size_t>(trials), chunk_count,
                  [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                    long long errs = 0;
                    for (std::size_t t = begin; t < end; ++t) {
                      std::mt19937_64 rng(derive_seed(seed, t));
                      std::size_t message = static_cast<std::size_t>(bounded_uint(rng, m));
                      NTypeVector y = sample_output_type(codebook.codewords[message], ch, rng);
                      std::size_t decoded = decoder == Decoder::MinDivergence
                                                ? decode_with_context(y, ctx)
                                                : exact_ml_decode(y, codebook, ch);
                      if (decoded != message) ++errs;
                    }
                    chunk_errors[chunk] = errs;
                  });
  TrialOutcome outcome;
  outcome.trials = trials;
  for (long long e : chunk_errors) outcome.errors += e;
  outcome.error_rate = static_cast<double>(outcome.errors) / static_cast<double>(trials);
  auto [lo, hi] = wilson_interval(outcome.errors, trials);
  outcome.wilson_lo = lo;
  outcome.wilson_hi = hi;
  return outcome;
}

std::vector<SweepCell> sweep_rate(const ChannelModel& ch, const std::vector<double>& rates,
                                  const std::vector<long long>& ns, long long trials,
                                  std::uint64_t seed) {
  std::vector<SweepCell> cells;
  for (double rate : rates) {
    for (long long n : ns) {
      SweepCell cell;
      cell.rate = rate;
      cell.n = n;
      try {
        Codebook book = ch.channel_class() == ChannelClass::BlockDiagonal
                            ? build_block_code(ch, n, rate)
                            : build_grid_codebook(ch, n, rate);
        cell.message_count = book.message_count();
        cell.outcome = simulate_error(book, ch, trials, seed);
      } catch (const infeasible_rate_error& e) {
        cell.feasible = false;
        cell.note = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace permchan::simulate
