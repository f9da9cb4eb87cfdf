#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bippr/graph.hpp"

// Independent oracle-for-the-oracle: solve the PPR linear system
// (I - (1-alpha) W^T) x = alpha * sigma directly by Gaussian elimination with
// partial pivoting. Dense and O(n^3); for cross-checking the power iteration
// on very small graphs only.
namespace testsolve {

inline std::vector<double> ppr_by_linear_solve(const bippr::Graph& g, double alpha,
                                               bippr::node_t s) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  for (bippr::node_t u = 0; u < n; ++u) {
    const auto nbrs = g.out_neighbors(u);
    const auto wts = g.out_weights(u);
    for (std::size_t j = 0; j < nbrs.size(); ++j) a[nbrs[j]][u] -= (1.0 - alpha) * wts[j];
  }
  a[s][n] = alpha;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
    std::swap(a[col], a[piv]);
    if (std::abs(a[col][col]) < 1e-14) throw std::runtime_error("singular PPR system");
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t k = col; k <= n; ++k) a[row][k] -= f * a[col][k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double v = a[i][n];
    for (std::size_t k = i + 1; k < n; ++k) v -= a[i][k] * x[k];
    x[i] = v / a[i][i];
  }
  return x;
}

}  // namespace testsolve
