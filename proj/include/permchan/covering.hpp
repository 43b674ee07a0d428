#pragma once

#include <vector>

#include "permchan/channel.hpp"
#include "permchan/prob_vector.hpp"

namespace permchan {

// Symmetric scalar grid { eps i^2 } u { 1 - eps i^2 } u { 1/2 }, with
// eps i^2 < 1/2, sorted ascending. All points lie strictly inside (0, 1).
struct ScalarNet {
  double eps = 0.0;
  std::vector<double> points;
};

ScalarNet scalar_net(double eps);

// A KL covering of the simplex on k symbols with declared radius eps.
// Centers are in generation order; when `recursive` is set the net is
// exactly the grid built by simplex_net and the factorized min-divergence
// evaluator applies.
struct SimplexNet {
  int k = 2;
  double eps = 1.0;      // declared covering radius
  double gamma = 18.0;   // radius inflation constant of the scalar grid
  std::vector<std::vector<double>> centers;
  bool recursive = false;
  double measured_c = 0.0;  // per-(k, eps) constant: |centers| = c^{k-1} ((k-1)/eps)^{(k-1)/2}
};

// Builds the recursive grid with scalar parameter eps/gamma; covering radius
// at most eps. Deterministic: scalar levels ascend, recursive centers keep
// generation order.
SimplexNet simplex_net(int k, double eps, double gamma = 18.0);

// Min over centers of D(p || center). Uses the factorized evaluator for
// recursive nets, otherwise scans all centers; the two agree exactly on
// recursive nets (tested).
double min_divergence_to_net(const SimplexNet& net, const std::vector<double>& p);
double min_divergence_brute(const std::vector<std::vector<double>>& centers,
                            const std::vector<double>& p);

// Max over the barycentric lattice {t/m} of the min divergence to the net,
// boundary points included. Parallel over lattice points.
double covering_radius(const SimplexNet& net, long long resolution);

// Covering of the channel-image subspace: for each ell-subset of rows the
// corner map images the centers of simplex_net(ell, eps); union, dedup.
struct SubspaceNet {
  ChannelModel channel;
  int ell = 1;  // rank of the channel = number of corners per subset
  double eps = 1.0;
  double gamma = 18.0;
  std::vector<std::vector<double>> centers;
  std::vector<int> producer_subset;          // per center: index into subsets
  std::vector<std::vector<int>> subsets;     // all binom(q, ell) row subsets
  long long n = 0;                           // set by net_for_n

  double log_size() const;
};

SubspaceNet subspace_net(const ChannelModel& ch, double eps, double gamma = 18.0);

// subspace_net(ch, 1/n); the n and ln|net| feed the mutual-information chain.
SubspaceNet net_for_n(const ChannelModel& ch, long long n, double gamma = 18.0);

// Max over the input lattice {t/m : t an m-type on q symbols} of the min
// divergence from mu(pi) to the subspace centers.
double subspace_covering_radius(const SubspaceNet& net, long long resolution);

}  // namespace permchan
