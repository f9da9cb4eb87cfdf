#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "bippr/bidirectional.hpp"
#include "bippr/errors.hpp"
#include "bippr/graph.hpp"
#include "bippr/reverse_push.hpp"
#include "bippr/sparse.hpp"
#include "bippr/walks.hpp"

namespace bippr {

struct TargetStats {
  node_t target = 0;
  std::uint64_t push_count = 0;
  std::uint64_t touched_mass = 0;
  std::uint64_t p_entries = 0;
  std::uint64_t r_entries = 0;
};

// Reverse vectors for a target set re-keyed by coordinate: group[v] lists
// (t, y^t[v]) for every t whose reverse vector touches coordinate v. A sparse
// column representation of the matrix whose rows are y^t. Lossless: zeros are
// never stored and flattening the groups reproduces every y^t exactly.
struct GroupedIndex {
  std::vector<node_t> targets;  // sorted
  double alpha = 0.0;
  double r_max = 0.0;

  std::vector<coord_t> coords;          // sorted, one per nonempty group
  std::vector<std::uint64_t> group_off; // coords.size()+1 offsets
  std::vector<node_t> entry_target;     // ascending target id within a group
  std::vector<double> entry_value;

  std::vector<TargetStats> stats;       // aligned with targets

  std::uint64_t stored_residual_entries() const {
    std::uint64_t total = 0;
    for (const auto& s : stats) total += s.r_entries;
    return total;
  }
  std::uint64_t total_touched_mass() const {
    std::uint64_t total = 0;
    for (const auto& s : stats) total += s.touched_mass;
    return total;
  }

  std::size_t find_group(coord_t c) const {
    const auto it = std::lower_bound(coords.begin(), coords.end(), c);
    if (it == coords.end() || *it != c) return coords.size();
    return static_cast<std::size_t>(it - coords.begin());
  }
};

namespace detail {

// Shared by the grouped and sampler builders: one reverse push per target,
// regrouped under coordinate keys.
inline void build_groups(const Graph& g, double alpha, const std::vector<node_t>& targets,
                         double r_max, std::uint64_t push_budget, std::vector<node_t>& sorted,
                         std::map<coord_t, std::vector<std::pair<node_t, double>>>& groups,
                         std::vector<TargetStats>& stats) {
  if (targets.empty()) throw InputError("index build: empty target set");
  sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (node_t t : sorted) {
    if (t >= g.num_nodes()) throw InputError("index build: target out of range");
    const ReverseVector y = approx_contributions(g, alpha, t, r_max, push_budget);
    TargetStats ts;
    ts.target = t;
    ts.push_count = y.push_count;
    ts.touched_mass = y.touched_mass;
    ts.p_entries = y.p.size();
    ts.r_entries = y.r.size();
    stats.push_back(ts);
    for (const auto& [v, val] : y.p) groups[estimate_coord(v)].push_back({t, val});
    for (const auto& [v, val] : y.r) groups[residual_coord(g.num_nodes(), v)].push_back({t, val});
  }
}

}  // namespace detail

inline GroupedIndex build_grouped(const Graph& g, double alpha, const std::vector<node_t>& targets,
                                  double r_max, std::uint64_t push_budget = kDefaultPushBudget) {
  GroupedIndex idx;
  idx.alpha = alpha;
  idx.r_max = r_max;
  std::map<coord_t, std::vector<std::pair<node_t, double>>> groups;
  detail::build_groups(g, alpha, targets, r_max, push_budget, idx.targets, groups, idx.stats);

  idx.coords.reserve(groups.size());
  idx.group_off.reserve(groups.size() + 1);
  idx.group_off.push_back(0);
  for (auto& [c, entries] : groups) {
    idx.coords.push_back(c);
    // Targets were pushed in ascending order, so entries are already sorted.
    for (const auto& [t, val] : entries) {
      idx.entry_target.push_back(t);
      idx.entry_value.push_back(val);
    }
    idx.group_off.push_back(idx.entry_target.size());
  }
  return idx;
}

struct GroupedScores {
  std::vector<std::pair<node_t, double>> ranking;  // score desc, id asc
  std::uint64_t entries_touched = 0;               // sum of visited group sizes
};

// Score all targets against a prebuilt forward vector by scanning the groups
// of the nonzero coordinates of x_s. Produces, per target, the identical
// floating-point score as the row-wise dot product <x_s, y^t>.
inline GroupedScores score_targets_grouped(const GroupedIndex& idx, const ForwardVector& x) {
  std::vector<double> score(idx.targets.size(), 0.0);
  GroupedScores out;

  auto slot = [&idx](node_t t) {
    return static_cast<std::size_t>(
        std::lower_bound(idx.targets.begin(), idx.targets.end(), t) - idx.targets.begin());
  };

  for (const auto& [c, xv] : x.coordinates()) {
    const std::size_t gi = idx.find_group(c);
    if (gi == idx.coords.size()) continue;
    const std::uint64_t b = idx.group_off[gi], e = idx.group_off[gi + 1];
    out.entries_touched += e - b;
    for (std::uint64_t i = b; i < e; ++i)
      score[slot(idx.entry_target[i])] += xv * idx.entry_value[i];
  }

  out.ranking.reserve(idx.targets.size());
  for (std::size_t i = 0; i < idx.targets.size(); ++i)
    out.ranking.push_back({idx.targets[i], score[i]});
  std::sort(out.ranking.begin(), out.ranking.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

inline GroupedScores rank_targets_grouped(const Graph& g, double alpha,
                                          const SourceDistribution& source,
                                          const GroupedIndex& idx, std::uint64_t w, Rng& rng) {
  const ForwardVector x = forward_vector(g, alpha, source, w, rng);
  return score_targets_grouped(idx, x);
}

// Reconstruct the reverse vector of one target from the groups (test support
// for the losslessness property and the per-target persistence format).
inline ReverseVector flatten_target(const GroupedIndex& idx, node_t t, node_t n) {
  ReverseVector y;
  y.target = t;
  for (std::size_t gi = 0; gi < idx.coords.size(); ++gi) {
    const coord_t c = idx.coords[gi];
    for (std::uint64_t i = idx.group_off[gi]; i < idx.group_off[gi + 1]; ++i) {
      if (idx.entry_target[i] != t) continue;
      if (c < n)
        y.p.push_back({static_cast<node_t>(c), idx.entry_value[i]});
      else
        y.r.push_back({static_cast<node_t>(c - n), idx.entry_value[i]});
    }
  }
  return y;
}

}  // namespace bippr
