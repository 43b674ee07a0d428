#include "permchan/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace permchan {

namespace {

// Solve the square system A x = b by Gaussian elimination with partial
// pivoting. Sizes here are tiny (at most the number of channel rows).
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
          std::abs(a[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)])) {
        pivot = r;
      }
    }
    std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
    std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(pivot)]);
    double diag = a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    if (std::abs(diag) < 1e-300) {
      // Singular passive set; treat as unsolvable direction.
      b[static_cast<std::size_t>(col)] = 0.0;
      a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)] = 1.0;
      diag = 1.0;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double factor = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / diag;
      if (factor == 0.0) continue;
      for (int c = col; c < n; ++c) {
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
            factor * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
      }
      b[static_cast<std::size_t>(r)] -= factor * b[static_cast<std::size_t>(col)];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] =
        b[static_cast<std::size_t>(i)] / a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  }
  return x;
}

}  // namespace

double distance_to_hull_sq(const std::vector<std::vector<double>>& generators,
                           const std::vector<double>& point) {
  if (generators.empty()) throw std::invalid_argument("distance_to_hull_sq: no generators");
  std::size_t m = generators.size();
  std::size_t dim = point.size();

  // Columns of A are the generators augmented with a 1-row enforcing the
  // convex combination; Lawson-Hanson NNLS on min ||A w - b||, w >= 0.
  std::size_t rows = dim + 1;
  auto column_dot = [&](std::size_t i, std::size_t j) {
    double s = 1.0;  // the augmented row contributes 1*1
    for (std::size_t r = 0; r < dim; ++r) s += generators[i][r] * generators[j][r];
    return s;
  };
  auto column_dot_b = [&](std::size_t i) {
    double s = 1.0;
    for (std::size_t r = 0; r < dim; ++r) s += generators[i][r] * point[r];
    return s;
  };

  std::vector<double> w(m, 0.0);
  std::vector<bool> passive(m, false);
  auto residual = [&]() {
    std::vector<double> r(rows, 0.0);
    for (std::size_t d = 0; d < dim; ++d) r[d] = point[d];
    r[dim] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (w[i] == 0.0) continue;
      for (std::size_t d = 0; d < dim; ++d) r[d] -= w[i] * generators[i][d];
      r[dim] -= w[i];
    }
    return r;
  };

  const int max_iters = 30 * static_cast<int>(m) + 30;
  for (int iter = 0; iter < max_iters; ++iter) {
    // Gradient of 0.5||Aw - b||^2 is -A^T r; pick the most violated zero weight.
    std::vector<double> r = residual();
    double best_grad = 1e-12;
    int enter = -1;
    for (std::size_t i = 0; i < m; ++i) {
      if (passive[i]) continue;
      double g = r[dim];
      for (std::size_t d = 0; d < dim; ++d) g += generators[i][d] * r[d];
      if (g > best_grad) {
        best_grad = g;
        enter = static_cast<int>(i);
      }
    }
    if (enter < 0) break;
    passive[static_cast<std::size_t>(enter)] = true;

    // Inner loop: solve on the passive set, clip negative weights back out.
    for (int inner = 0; inner < max_iters; ++inner) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < m; ++i) {
        if (passive[i]) idx.push_back(i);
      }
      std::vector<std::vector<double>> normal(idx.size(), std::vector<double>(idx.size()));
      std::vector<double> rhs(idx.size());
      for (std::size_t a = 0; a < idx.size(); ++a) {
        rhs[a] = column_dot_b(idx[a]);
        for (std::size_t b = 0; b < idx.size(); ++b) normal[a][b] = column_dot(idx[a], idx[b]);
      }
      std::vector<double> z = solve_dense(std::move(normal), std::move(rhs));
      bool all_positive = true;
      for (double v : z) {
        if (v <= 0.0) {
          all_positive = false;
          break;
        }
      }
      if (all_positive) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t a = 0; a < idx.size(); ++a) w[idx[a]] = z[a];
        break;
      }
      // Step toward z until the first weight hits zero; drop it.
      double alpha = 1.0;
      for (std::size_t a = 0; a < idx.size(); ++a) {
        if (z[a] <= 0.0) {
          double denom = w[idx[a]] - z[a];
          if (denom > 0.0) alpha = std::min(alpha, w[idx[a]] / denom);
        }
      }
      for (std::size_t a = 0; a < idx.size(); ++a) {
        w[idx[a]] += alpha * (z[a] - w[idx[a]]);
        if (w[idx[a]] <= 1e-14) {
          w[idx[a]] = 0.0;
          passive[idx[a]] = false;
        }
      }
    }
  }

  std::vector<double> r = residual();
  double dist = 0.0;
  for (double v : r) dist += v * v;
  return dist;
}

bool in_convex_hull(const std::vector<std::vector<double>>& generators,
                    const std::vector<double>& point, double tol) {
  return distance_to_hull_sq(generators, point) <= tol * tol;
}

int extreme_point_count(const ChannelModel& ch, double tol) {
  const Matrix& rows = ch.matrix();
  int count = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::vector<double>> others;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j != i) others.push_back(rows[j]);
    }
    if (others.empty() || !in_convex_hull(others, rows[i], tol)) ++count;
  }
  return count;
}

}  // namespace permchan
