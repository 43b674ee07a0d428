#include "permchan/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace permchan {

namespace {

constexpr double kRowSumTolerance = 1e-9;

void validate_stochastic(const Matrix& m) {
  if (m.empty() || m.front().empty()) {
    throw std::invalid_argument("channel: empty matrix");
  }
  std::size_t k = m.front().size();
  for (const auto& row : m) {
    if (row.size() != k) throw std::invalid_argument("channel: ragged matrix");
    double sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) throw std::invalid_argument("channel: negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("channel: row does not sum to 1");
    }
  }
}

bool is_erasure_shape(const Matrix& m) {
  int q = static_cast<int>(m.size());
  int k = static_cast<int>(m.front().size());
  if (q < 2 || k != q + 1) return false;
  // One shared column positive in every row; each row has exactly one other
  // positive entry, and those private entries sit in q distinct columns.
  for (int shared = 0; shared < k; ++shared) {
    bool shared_ok = true;
    for (int i = 0; i < q && shared_ok; ++i) {
      if (m[i][shared] <= 0.0) shared_ok = false;
    }
    if (!shared_ok) continue;
    std::vector<int> private_col(q, -1);
    std::vector<bool> used(static_cast<std::size_t>(k), false);
    bool ok = true;
    for (int i = 0; i < q && ok; ++i) {
      int found = -1;
      for (int j = 0; j < k; ++j) {
        if (j == shared) continue;
        if (m[i][j] > 0.0) {
          if (found >= 0) { ok = false; break; }
          found = j;
        }
      }
      if (found < 0 || used[static_cast<std::size_t>(found)]) ok = false;
      if (ok) {
        private_col[i] = found;
        used[static_cast<std::size_t>(found)] = true;
      }
    }
    if (ok) return true;
  }
  return false;
}

bool is_z_shape(const Matrix& m) {
  if (m.size() != 2 || m.front().size() != 2) return false;
  // Up to permutation: one strictly positive row and one deterministic row
  // whose single output is shared with the positive row.
  for (int det = 0; det < 2; ++det) {
    int other = 1 - det;
    if (m[other][0] <= 0.0 || m[other][1] <= 0.0) continue;
    for (int j = 0; j < 2; ++j) {
      if (std::abs(m[det][j] - 1.0) <= 1e-12 && m[det][1 - j] == 0.0) return true;
    }
  }
  return false;
}

bool is_zigzag_shape(const Matrix& m) {
  int q = static_cast<int>(m.size());
  int k = static_cast<int>(m.front().size());
  if (q != k || q < 2) return false;
  // Support graph must be a path alternating inputs and outputs: 2q-1 edges,
  // connected, every vertex of degree <= 2, exactly one row and one column of
  // degree 1.
  int edges = 0;
  std::vector<int> row_deg(q, 0), col_deg(k, 0);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < k; ++j) {
      if (m[i][j] > 0.0) {
        ++edges;
        ++row_deg[i];
        ++col_deg[j];
      }
    }
  }
  if (edges != 2 * q - 1) return false;
  auto degree_profile_ok = [](const std::vector<int>& deg) {
    int ones = 0;
    for (int d : deg) {
      if (d < 1 || d > 2) return false;
      if (d == 1) ++ones;
    }
    return ones == 1;
  };
  if (!degree_profile_ok(row_deg) || !degree_profile_ok(col_deg)) return false;
  // Connectivity over the bipartite support graph.
  std::vector<bool> seen_row(q, false), seen_col(k, false);
  std::vector<std::pair<bool, int>> stack = {{true, 0}};
  seen_row[0] = true;
  while (!stack.empty()) {
    auto [is_row, idx] = stack.back();
    stack.pop_back();
    if (is_row) {
      for (int j = 0; j < k; ++j) {
        if (m[idx][j] > 0.0 && !seen_col[j]) {
          seen_col[j] = true;
          stack.push_back({false, j});
        }
      }
    } else {
      for (int i = 0; i < q; ++i) {
        if (m[i][idx] > 0.0 && !seen_row[i]) {
          seen_row[i] = true;
          stack.push_back({true, i});
        }
      }
    }
  }
  return std::all_of(seen_row.begin(), seen_row.end(), [](bool b) { return b; }) &&
         std::all_of(seen_col.begin(), seen_col.end(), [](bool b) { return b; });
}

// Connected components of the support graph; output columns with no support
// belong to no block.
std::vector<ChannelBlock> find_blocks(const Matrix& m) {
  int q = static_cast<int>(m.size());
  int k = static_cast<int>(m.front().size());
  std::vector<int> row_comp(q, -1), col_comp(k, -1);
  int comp = 0;
  for (int start = 0; start < q; ++start) {
    if (row_comp[start] >= 0) continue;
    std::vector<std::pair<bool, int>> stack = {{true, start}};
    row_comp[start] = comp;
    while (!stack.empty()) {
      auto [is_row, idx] = stack.back();
      stack.pop_back();
      if (is_row) {
        for (int j = 0; j < k; ++j) {
          if (m[idx][j] > 0.0 && col_comp[j] < 0) {
            col_comp[j] = comp;
            stack.push_back({false, j});
          }
        }
      } else {
        for (int i = 0; i < q; ++i) {
          if (m[i][idx] > 0.0 && row_comp[i] < 0) {
            row_comp[i] = comp;
            stack.push_back({true, i});
          }
        }
      }
    }
    ++comp;
  }
  std::vector<ChannelBlock> blocks(static_cast<std::size_t>(comp));
  for (int i = 0; i < q; ++i) blocks[static_cast<std::size_t>(row_comp[i])].inputs.push_back(i);
  for (int j = 0; j < k; ++j) {
    if (col_comp[j] >= 0) blocks[static_cast<std::size_t>(col_comp[j])].outputs.push_back(j);
  }
  for (auto& b : blocks) {
    b.strictly_positive = true;
    for (int i : b.inputs) {
      for (int j : b.outputs) {
        if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <= 0.0) {
          b.strictly_positive = false;
        }
      }
    }
  }
  return blocks;
}

}  // namespace

std::string to_string(ChannelClass c) {
  switch (c) {
    case ChannelClass::StrictlyPositive: return "strictly-positive";
    case ChannelClass::BlockDiagonal: return "block-diagonal";
    case ChannelClass::Erasure: return "erasure";
    case ChannelClass::ZChannel: return "z-channel";
    case ChannelClass::Zigzag: return "zigzag";
    case ChannelClass::General: return "general";
  }
  return "unknown";
}

int numerical_rank(const Matrix& matrix, double tol) {
  Matrix work = matrix;
  int rows = static_cast<int>(work.size());
  int cols = static_cast<int>(work.front().size());
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    double best = tol;
    for (int r = rank; r < rows; ++r) {
      double mag = std::abs(work[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]);
      if (mag >= best) {
        best = mag;
        pivot = r;
      }
    }
    if (pivot < 0) continue;
    std::swap(work[static_cast<std::size_t>(pivot)], work[static_cast<std::size_t>(rank)]);
    const auto& prow = work[static_cast<std::size_t>(rank)];
    for (int r = 0; r < rows; ++r) {
      if (r == rank) continue;
      auto& row = work[static_cast<std::size_t>(r)];
      double factor = row[static_cast<std::size_t>(col)] / prow[static_cast<std::size_t>(col)];
      if (factor == 0.0) continue;
      for (int c = col; c < cols; ++c) {
        row[static_cast<std::size_t>(c)] -= factor * prow[static_cast<std::size_t>(c)];
      }
    }
    ++rank;
  }
  return rank;
}

int exact_rank(const RationalMatrix& matrix) {
  RationalMatrix work = matrix;
  int rows = static_cast<int>(work.size());
  int cols = static_cast<int>(work.front().size());
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r) {
      if (work[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(work[static_cast<std::size_t>(pivot)], work[static_cast<std::size_t>(rank)]);
    const auto prow = work[static_cast<std::size_t>(rank)];
    for (int r = rank + 1; r < rows; ++r) {
      auto& row = work[static_cast<std::size_t>(r)];
      Rational factor = row[static_cast<std::size_t>(col)] / prow[static_cast<std::size_t>(col)];
      if (factor == 0) continue;
      for (int c = col; c < cols; ++c) {
        row[static_cast<std::size_t>(c)] -= factor * prow[static_cast<std::size_t>(c)];
      }
    }
    ++rank;
  }
  return rank;
}

ChannelModel classify_channel(const Matrix& matrix, std::optional<RationalMatrix> exact,
                              double rank_tol) {
  validate_stochastic(matrix);
  ChannelModel ch;
  ch.matrix_ = matrix;
  ch.exact_ = std::move(exact);
  ch.blocks_ = find_blocks(matrix);
  ch.rank_ = ch.exact_ ? exact_rank(*ch.exact_) : numerical_rank(matrix, rank_tol);

  double min_entry = matrix[0][0];
  for (const auto& row : matrix) {
    for (double v : row) min_entry = std::min(min_entry, v);
  }
  if (min_entry > 0.0) {
    ch.class_ = ChannelClass::StrictlyPositive;
  } else if (is_erasure_shape(matrix)) {
    ch.class_ = ChannelClass::Erasure;
  } else if (is_z_shape(matrix)) {
    ch.class_ = ChannelClass::ZChannel;
  } else if (is_zigzag_shape(matrix)) {
    ch.class_ = ChannelClass::Zigzag;
  } else if (ch.blocks_.size() >= 2) {
    ch.class_ = ChannelClass::BlockDiagonal;
  } else {
    ch.class_ = ChannelClass::General;
  }
  return ch;
}

ProbVector output_marginal(const ProbVector& pi, const ChannelModel& ch) {
  if (static_cast<int>(pi.size()) != ch.input_count()) {
    throw std::invalid_argument("output_marginal: dimension mismatch");
  }
  return ProbVector(output_marginal_raw(pi.entries(), ch.matrix()));
}

std::vector<double> output_marginal_raw(const std::vector<double>& pi, const Matrix& m) {
  std::size_t k = m.front().size();
  std::vector<double> out(k, 0.0);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] == 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) out[j] += pi[i] * m[i][j];
  }
  return out;
}

std::vector<Rational> output_marginal_exact(const std::vector<Rational>& pi,
                                            const RationalMatrix& m) {
  std::size_t k = m.front().size();
  std::vector<Rational> out(k, Rational(0));
  for (std::size_t i = 0; i < pi.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) out[j] += pi[i] * m[i][j];
  }
  return out;
}

std::string ChannelModel::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](const char* data, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(data[i]);
      h *= 1099511628211ull;
    }
  };
  char buf[64];
  int len = std::snprintf(buf, sizeof buf, "%d %d;", input_count(), output_count());
  feed(buf, static_cast<std::size_t>(len));
  for (const auto& row : matrix_) {
    for (double v : row) {
      len = std::snprintf(buf, sizeof buf, "%.17g,", v);
      feed(buf, static_cast<std::size_t>(len));
    }
  }
  len = std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, static_cast<std::size_t>(len));
}

ChannelModel parse_channel_text(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    std::istringstream words(line);
    std::string w;
    while (words >> w) tokens.push_back(w);
  }
  if (tokens.size() < 2) throw std::invalid_argument("channel spec: missing header");
  int q = 0, k = 0;
  try {
    q = std::stoi(tokens[0]);
    k = std::stoi(tokens[1]);
  } catch (const std::exception&) {
    throw std::invalid_argument("channel spec: bad header");
  }
  if (q < 1 || k < 1) throw std::invalid_argument("channel spec: bad dimensions");
  if (tokens.size() != 2 + static_cast<std::size_t>(q) * static_cast<std::size_t>(k)) {
    throw std::invalid_argument("channel spec: wrong number of entries");
  }

  Matrix matrix(static_cast<std::size_t>(q), std::vector<double>(static_cast<std::size_t>(k)));
  RationalMatrix exact(static_cast<std::size_t>(q),
                       std::vector<Rational>(static_cast<std::size_t>(k)));
  bool exact_ok = true;
  std::size_t idx = 2;
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < k; ++j, ++idx) {
      const std::string& tok = tokens[idx];
      auto r = parse_rational_token(tok);
      if (r) {
        exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = *r;
        matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = to_double(*r);
      } else {
        exact_ok = false;
        try {
          matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::stod(tok);
        } catch (const std::exception&) {
          throw std::invalid_argument("channel spec: bad entry '" + tok + "'");
        }
      }
    }
  }
  for (int i = 0; i < q; ++i) {
    auto& row = matrix[static_cast<std::size_t>(i)];
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("channel spec: row sum off by more than 1e-9");
    }
    for (double& v : row) v /= sum;
    if (exact_ok) {
      Rational rsum = 0;
      for (const auto& v : exact[static_cast<std::size_t>(i)]) rsum += v;
      if (rsum != 1) exact_ok = false;
    }
  }
  return classify_channel(matrix, exact_ok ? std::optional<RationalMatrix>(std::move(exact))
                                           : std::nullopt);
}

ChannelModel parse_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open channel file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_channel_text(buffer.str());
}

}  // namespace permchan
