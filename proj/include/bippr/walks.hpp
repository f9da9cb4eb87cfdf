#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bippr/errors.hpp"
#include "bippr/graph.hpp"
#include "bippr/rng.hpp"
#include "bippr/sparse.hpp"

namespace bippr {

struct WalkOutcome {
  node_t endpoint;
  std::uint32_t length;  // steps taken
};

// One random walk of geometric(alpha) length: before every step the walk
// stops at its current node with probability alpha, so the start itself is
// the endpoint with probability alpha. Transitions follow the normalized
// out-weights. The oracle's algebraic definition matches this convention.
inline WalkOutcome sample_walk_detailed(const Graph& g, double alpha,
                                        const SourceDistribution& source, Rng& rng) {
  node_t cur = source.sample(rng);
  std::uint32_t len = 0;
  while (rng.next_double() >= alpha) {
    cur = g.step(cur, rng.next_double());
    ++len;
  }
  return {cur, len};
}

inline node_t sample_walk(const Graph& g, double alpha, const SourceDistribution& source,
                          Rng& rng) {
  return sample_walk_detailed(g, alpha, source, rng).endpoint;
}

// Forward vector x_s in R^{2n}: the source distribution block followed by the
// empirical endpoint distribution of w walks. Endpoint counts are kept exact;
// block values are materialized as count/w on access so that every consumer
// computes identical doubles.
struct ForwardVector {
  SourceDistribution source = SourceDistribution::single(0);
  node_t n = 0;
  std::uint64_t w = 0;
  std::vector<std::pair<node_t, std::uint64_t>> endpoint_counts;  // sorted by node

  double walk_value(std::uint64_t count) const {
    return static_cast<double>(count) / static_cast<double>(w);
  }

  // Nonzero coordinates of x_s in ascending coordinate order.
  std::vector<std::pair<coord_t, double>> coordinates() const {
    std::vector<std::pair<coord_t, double>> out;
    out.reserve(source.entries().size() + endpoint_counts.size());
    for (const auto& [v, q] : source.entries()) out.push_back({estimate_coord(v), q});
    for (const auto& [v, c] : endpoint_counts)
      out.push_back({residual_coord(n, v), walk_value(c)});
    return out;
  }
};

// w independent walks; deterministic for a fixed rng state. Each walk runs on
// a stream derived from (base draw, walk index), so a parallel implementation
// would produce the identical vector.
inline ForwardVector forward_vector(const Graph& g, double alpha, const SourceDistribution& source,
                                    std::uint64_t w, Rng& rng) {
  if (w < 1) throw InputError("forward_vector: w must be >= 1");
  if (source.max_node() >= g.num_nodes()) throw InputError("forward_vector: source out of range");
  ForwardVector fv;
  fv.source = source;
  fv.n = g.num_nodes();
  fv.w = w;
  std::unordered_map<node_t, std::uint64_t> counts;
  const std::uint64_t base = rng.next_u64();
  for (std::uint64_t i = 0; i < w; ++i) {
    Rng walk_rng = Rng::derive(base, i);
    ++counts[sample_walk(g, alpha, source, walk_rng)];
  }
  fv.endpoint_counts.assign(counts.begin(), counts.end());
  std::sort(fv.endpoint_counts.begin(), fv.endpoint_counts.end());
  return fv;
}

// Pure Monte-Carlo search baseline: sample walks, discard endpoints outside
// T, rank targets by hit count. Stops after n_samples hits or walk_budget
// walks, whichever comes first; the latter flags the result as truncated.
struct McResult {
  std::vector<std::pair<node_t, std::uint64_t>> ranking;  // count desc, id asc
  bool truncated = false;
  std::uint64_t walks_used = 0;
  std::uint64_t hits = 0;
};

inline McResult monte_carlo_search(const Graph& g, double alpha, const SourceDistribution& source,
                                   const std::vector<node_t>& targets, std::uint64_t n_samples,
                                   std::uint64_t walk_budget, Rng& rng) {
  if (targets.empty()) throw InputError("monte_carlo_search: empty target set");
  std::unordered_set<node_t> target_set(targets.begin(), targets.end());
  std::unordered_map<node_t, std::uint64_t> counts;
  McResult res;
  const std::uint64_t base = rng.next_u64();
  while (res.hits < n_samples && res.walks_used < walk_budget) {
    Rng walk_rng = Rng::derive(base, res.walks_used);
    const node_t end = sample_walk(g, alpha, source, walk_rng);
    ++res.walks_used;
    if (target_set.count(end)) {
      ++counts[end];
      ++res.hits;
    }
  }
  res.truncated = res.hits < n_samples;
  res.ranking.reserve(targets.size());
  for (node_t t : targets) {
    const auto it = counts.find(t);
    res.ranking.push_back({t, it == counts.end() ? 0 : it->second});
  }
  std::sort(res.ranking.begin(), res.ranking.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return res;
}

}  // namespace bippr
