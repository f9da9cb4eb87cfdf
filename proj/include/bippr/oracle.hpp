#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "bippr/errors.hpp"
#include "bippr/graph.hpp"

namespace bippr {

// Exact reference computations by dense power iteration. Ground truth for
// every accuracy test in this project; deliberately capped at small n so it
// cannot be reached for full-scale graphs by accident.
namespace oracle {

inline constexpr node_t kMaxOracleNodes = 100000;
inline constexpr double kDefaultTol = 1e-12;

struct ExactPpr {
  std::vector<double> pi;    // dense personalized PageRank vector
  std::uint32_t iterations = 0;
  double residual = 0.0;     // L1 change at convergence
};

inline ExactPpr exact_ppr_dense(const Graph& g, double alpha, const std::vector<double>& sigma,
                                double tol = kDefaultTol) {
  const node_t n = g.num_nodes();
  if (n > kMaxOracleNodes)
    throw InputError("oracle: graph too large for exact computation (n > " +
                     std::to_string(kMaxOracleNodes) + ")");
  if (!(tol > 0.0)) throw InputError("oracle: tol must be positive");

  ExactPpr out;
  out.pi = sigma;
  std::vector<double> next(n);
  while (true) {
    for (node_t v = 0; v < n; ++v) next[v] = alpha * sigma[v];
    for (node_t u = 0; u < n; ++u) {
      const double push = (1.0 - alpha) * out.pi[u];
      if (push == 0.0) continue;
      const auto nbrs = g.out_neighbors(u);
      const auto wts = g.out_weights(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) next[nbrs[i]] += push * wts[i];
    }
    double change = 0.0;
    for (node_t v = 0; v < n; ++v) change += std::abs(next[v] - out.pi[v]);
    out.pi.swap(next);
    ++out.iterations;
    if (change < tol) {
      out.residual = change;
      break;
    }
  }
  return out;
}

inline ExactPpr exact_ppr(const Graph& g, double alpha, const SourceDistribution& source,
                          double tol = kDefaultTol) {
  std::vector<double> sigma(g.num_nodes(), 0.0);
  for (const auto& [v, p] : source.entries()) {
    if (v >= g.num_nodes()) throw InputError("oracle: source node out of range");
    sigma[v] = p;
  }
  return exact_ppr_dense(g, alpha, sigma, tol);
}

inline ExactPpr exact_ppr(const Graph& g, double alpha, node_t s, double tol = kDefaultTol) {
  return exact_ppr(g, alpha, SourceDistribution::single(s), tol);
}

// Global PageRank = PPR from the uniform distribution.
inline ExactPpr global_pagerank(const Graph& g, double alpha, double tol = kDefaultTol) {
  std::vector<double> sigma(g.num_nodes(), 1.0 / static_cast<double>(g.num_nodes()));
  return exact_ppr_dense(g, alpha, sigma, tol);
}

// pi_s restricted to T, sorted by score descending, ties by ascending id.
inline std::vector<std::pair<node_t, double>> exact_top_k(const Graph& g, double alpha,
                                                          const SourceDistribution& source,
                                                          const std::vector<node_t>& targets,
                                                          std::size_t k,
                                                          double tol = kDefaultTol) {
  if (k > targets.size()) throw InputError("oracle: k exceeds |T|");
  const ExactPpr full = exact_ppr(g, alpha, source, tol);
  std::vector<std::pair<node_t, double>> scored;
  scored.reserve(targets.size());
  for (node_t t : targets) scored.push_back({t, full.pi[t]});
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  scored.resize(k);
  return scored;
}

}  // namespace oracle
}  // namespace bippr
