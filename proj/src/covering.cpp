#include "permchan/covering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "permchan/ntype.hpp"
#include "permchan/parallel.hpp"

namespace permchan {

namespace {

// Two-point divergence D((x, 1-x) || (lam, 1-lam)).
double binary_divergence(double x, double lam) {
  double d = 0.0;
  if (x > 0.0) d += x * std::log(x / lam);
  if (x < 1.0) d += (1.0 - x) * std::log((1.0 - x) / (1.0 - lam));
  return d;
}

// Min over the sorted grid of binary_divergence(x, lam). The divergence is
// strictly quasiconvex in lam with minimum at lam = x, so only the grid
// neighbors bracketing x can attain the min; one extra point per side guards
// against floating-point ties.
double min_binary_divergence(const std::vector<double>& grid, double x) {
  auto it = std::lower_bound(grid.begin(), grid.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  std::size_t lo = hi >= 2 ? hi - 2 : 0;
  std::size_t end = std::min(grid.size(), hi + 2);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = lo; i < end; ++i) {
    best = std::min(best, binary_divergence(x, grid[i]));
  }
  return best;
}

// Scalar grids for every level of the recursion rooted at Lambda_k(eps):
// level j > 2 uses Lambda(eps_j / j) for the last coordinate and passes
// eps_{j-1} = (j-1) eps_j / j down; level 2 uses Lambda(eps_2) directly.
std::vector<std::vector<double>> build_level_grids(int k, double lambda_eps) {
  std::vector<std::vector<double>> grids(static_cast<std::size_t>(k) + 1);
  double eps_here = lambda_eps;
  for (int level = k; level > 2; --level) {
    grids[static_cast<std::size_t>(level)] = scalar_net(eps_here / level).points;
    eps_here = eps_here * (level - 1) / level;
  }
  grids[2] = scalar_net(eps_here).points;
  return grids;
}

double recursive_min_divergence(const std::vector<std::vector<double>>& grids, int k,
                                const double* p) {
  if (k == 2) {
    return min_binary_divergence(grids[2], p[0]);
  }
  double last = p[k - 1];
  double d_last = min_binary_divergence(grids[static_cast<std::size_t>(k)], last);
  double head = 1.0 - last;
  if (head <= 0.0) return d_last;
  // Normalized head distribution (stack buffer, k is tiny).
  double scaled[16];
  for (int i = 0; i < k - 1; ++i) scaled[i] = p[i] / head;
  return d_last + head * recursive_min_divergence(grids, k - 1, scaled);
}

void build_centers(int k, double lambda_eps, std::vector<std::vector<double>>& out) {
  if (k == 2) {
    for (double lam : scalar_net(lambda_eps).points) {
      out.push_back({lam, 1.0 - lam});
    }
    return;
  }
  std::vector<std::vector<double>> tail;
  build_centers(k - 1, lambda_eps * (k - 1) / k, tail);
  for (double lam : scalar_net(lambda_eps / k).points) {
    for (const auto& q : tail) {
      std::vector<double> center(static_cast<std::size_t>(k));
      for (int i = 0; i < k - 1; ++i) center[static_cast<std::size_t>(i)] = (1.0 - lam) * q[static_cast<std::size_t>(i)];
      center[static_cast<std::size_t>(k - 1)] = lam;
      out.push_back(std::move(center));
    }
  }
}

// Deduplication key: entries quantized at 1e-12.
std::vector<std::int64_t> dedup_key(const std::vector<double>& v) {
  std::vector<std::int64_t> key(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) key[i] = std::llround(v[i] * 1e12);
  return key;
}

void enumerate_subsets(int q, int ell, std::vector<std::vector<int>>& out) {
  std::vector<int> current;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(current.size()) == ell) {
      out.push_back(current);
      return;
    }
    for (int i = start; i <= q - (ell - static_cast<int>(current.size())); ++i) {
      current.push_back(i);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
}

}  // namespace

ScalarNet scalar_net(double eps) {
  if (!(eps > 0.0) || eps > 1.0) {
    throw std::invalid_argument("scalar_net: eps must be in (0, 1]");
  }
  ScalarNet net;
  net.eps = eps;
  std::vector<double> lower;
  for (long long i = 1; eps * static_cast<double>(i) * static_cast<double>(i) < 0.5; ++i) {
    lower.push_back(eps * static_cast<double>(i) * static_cast<double>(i));
  }
  net.points = lower;
  net.points.push_back(0.5);
  for (auto it = lower.rbegin(); it != lower.rend(); ++it) {
    net.points.push_back(1.0 - *it);
  }
  return net;
}

SimplexNet simplex_net(int k, double eps, double gamma) {
  if (k < 2 || k > 12) throw std::invalid_argument("simplex_net: k must be in [2, 12]");
  if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("simplex_net: eps must be in (0, 1]");
  if (!(gamma > 0.0)) throw std::invalid_argument("simplex_net: gamma must be positive");
  SimplexNet net;
  net.k = k;
  net.eps = eps;
  net.gamma = gamma;
  net.recursive = true;
  std::vector<std::vector<double>> raw;
  build_centers(k, eps / gamma, raw);
  std::map<std::vector<std::int64_t>, bool> seen;
  for (auto& c : raw) {
    auto key = dedup_key(c);
    if (seen.emplace(std::move(key), true).second) net.centers.push_back(std::move(c));
  }
  double denom = std::pow(static_cast<double>(k - 1) / eps, (k - 1) / 2.0);
  net.measured_c = std::pow(static_cast<double>(net.centers.size()) / denom,
                            1.0 / static_cast<double>(k - 1));
  return net;
}

double min_divergence_brute(const std::vector<std::vector<double>>& centers,
                            const std::vector<double>& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : centers) {
    best = std::min(best, kl_divergence_raw(p, c));
  }
  return best;
}

double min_divergence_to_net(const SimplexNet& net, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != net.k) {
    throw std::invalid_argument("min_divergence_to_net: dimension mismatch");
  }
  if (net.recursive) {
    auto grids = build_level_grids(net.k, net.eps / net.gamma);
    return recursive_min_divergence(grids, net.k, p.data());
  }
  return min_divergence_brute(net.centers, p);
}

namespace {

// Shared lattice scan: max over m-types t of eval(t/m).
double lattice_max(int k, long long m,
                   const std::function<double(const std::vector<double>&)>& eval) {
  if (k == 1) {
    std::vector<double> point = {1.0};
    return eval(point);
  }
  // Partition by the first coordinate; chunk layout is fixed by m alone.
  std::size_t chunk_count = static_cast<std::size_t>(m) + 1;
  std::vector<double> chunk_max(chunk_count, -std::numeric_limits<double>::infinity());
  parallel_chunks(chunk_count, chunk_count, [&](std::size_t chunk, std::size_t, std::size_t) {
    long long first = static_cast<long long>(chunk);
    double local = -std::numeric_limits<double>::infinity();
    std::vector<double> point(static_cast<std::size_t>(k));
    point[0] = static_cast<double>(first) / static_cast<double>(m);
    for_each_composition(m - first, k - 1, [&](const std::vector<long long>& rest) {
      for (int i = 1; i < k; ++i) {
        point[static_cast<std::size_t>(i)] =
            static_cast<double>(rest[static_cast<std::size_t>(i - 1)]) / static_cast<double>(m);
      }
      local = std::max(local, eval(point));
    });
    chunk_max[chunk] = local;
  });
  double best = -std::numeric_limits<double>::infinity();
  for (double v : chunk_max) best = std::max(best, v);
  return best;
}

}  // namespace

double covering_radius(const SimplexNet& net, long long resolution) {
  if (resolution < 2) throw std::invalid_argument("covering_radius: resolution must be >= 2");
  if (net.recursive) {
    auto grids = build_level_grids(net.k, net.eps / net.gamma);
    return lattice_max(net.k, resolution, [&](const std::vector<double>& p) {
      return recursive_min_divergence(grids, net.k, p.data());
    });
  }
  return lattice_max(net.k, resolution, [&](const std::vector<double>& p) {
    return min_divergence_brute(net.centers, p);
  });
}

SubspaceNet subspace_net(const ChannelModel& ch, double eps, double gamma) {
  SubspaceNet net;
  net.channel = ch;
  net.ell = ch.rank();
  net.eps = eps;
  net.gamma = gamma;
  int q = ch.input_count();
  int k = ch.output_count();
  enumerate_subsets(q, net.ell, net.subsets);

  std::map<std::vector<std::int64_t>, bool> seen;
  auto emit = [&](std::vector<double> center, int subset_idx) {
    auto key = dedup_key(center);
    if (seen.emplace(std::move(key), true).second) {
      net.centers.push_back(std::move(center));
      net.producer_subset.push_back(subset_idx);
    }
  };

  if (net.ell == 1) {
    // Rank-1 image is a single point; each 1-subset maps the unique corner to
    // its row.
    for (std::size_t s = 0; s < net.subsets.size(); ++s) {
      emit(ch.row(net.subsets[s][0]), static_cast<int>(s));
    }
    return net;
  }

  SimplexNet base = simplex_net(net.ell, eps, gamma);
  for (std::size_t s = 0; s < net.subsets.size(); ++s) {
    const auto& subset = net.subsets[s];
    for (const auto& c : base.centers) {
      std::vector<double> image(static_cast<std::size_t>(k), 0.0);
      for (int corner = 0; corner < net.ell; ++corner) {
        const auto& row = ch.row(subset[static_cast<std::size_t>(corner)]);
        double w = c[static_cast<std::size_t>(corner)];
        for (int j = 0; j < k; ++j) image[static_cast<std::size_t>(j)] += w * row[static_cast<std::size_t>(j)];
      }
      emit(std::move(image), static_cast<int>(s));
    }
  }
  return net;
}

SubspaceNet net_for_n(const ChannelModel& ch, long long n, double gamma) {
  if (n < 1) throw std::invalid_argument("net_for_n: n must be positive");
  SubspaceNet net = subspace_net(ch, 1.0 / static_cast<double>(n), gamma);
  net.n = n;
  return net;
}

double SubspaceNet::log_size() const {
  return std::log(static_cast<double>(centers.size()));
}

double subspace_covering_radius(const SubspaceNet& net, long long resolution) {
  if (resolution < 1) throw std::invalid_argument("subspace_covering_radius: resolution must be >= 1");
  int q = net.channel.input_count();
  const Matrix& m = net.channel.matrix();
  return lattice_max(q, resolution, [&](const std::vector<double>& pi) {
    std::vector<double> mu = output_marginal_raw(pi, m);
    return min_divergence_brute(net.centers, mu);
  });
}

}  // namespace permchan
