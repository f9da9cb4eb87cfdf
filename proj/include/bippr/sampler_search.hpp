#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "bippr/alias.hpp"
#include "bippr/bidirectional.hpp"
#include "bippr/errors.hpp"
#include "bippr/graph.hpp"
#include "bippr/grouped_index.hpp"
#include "bippr/reverse_push.hpp"
#include "bippr/sparse.hpp"
#include "bippr/walks.hpp"

namespace bippr {

// Aggregate reverse vector y^T = sum_t y^t plus one alias sampler per
// coordinate v with y^T[v] > 0, drawing t with probability y^t[v] / y^T[v].
// Together with a query-time first stage over coordinates this samples
// targets with probability proportional to their estimated PPR.
struct SamplerIndex {
  std::vector<node_t> targets;  // sorted
  double alpha = 0.0;
  double r_max = 0.0;

  std::vector<coord_t> coords;           // sorted, support of y^T
  std::vector<double> aggregate;         // y^T value per coordinate
  std::vector<std::uint64_t> group_off;  // per-coordinate target slices
  std::vector<node_t> entry_target;
  std::vector<double> entry_weight;      // y^t[v]
  std::vector<AliasTable> samplers;      // one per coordinate, rebuilt on load

  std::vector<TargetStats> stats;

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

  std::size_t find_coord(coord_t c) const {
    const auto it = std::lower_bound(coords.begin(), coords.end(), c);
    if (it == coords.end() || *it != c) return coords.size();
    return static_cast<std::size_t>(it - coords.begin());
  }

  // Derived data: alias tables are not persisted; call after filling groups.
  void rebuild_samplers() {
    samplers.clear();
    samplers.reserve(coords.size());
    for (std::size_t gi = 0; gi < coords.size(); ++gi) {
      std::vector<double> weights(entry_weight.begin() + group_off[gi],
                                  entry_weight.begin() + group_off[gi + 1]);
      samplers.emplace_back(weights);
    }
  }
};

inline SamplerIndex build_sampler_index(const Graph& g, double alpha,
                                        const std::vector<node_t>& targets, double r_max,
                                        std::uint64_t push_budget = kDefaultPushBudget) {
  SamplerIndex idx;
  idx.alpha = alpha;
  idx.r_max = r_max;
  std::map<coord_t, std::vector<std::pair<node_t, double>>> groups;
  detail::build_groups(g, alpha, targets, r_max, push_budget, idx.targets, groups, idx.stats);

  idx.group_off.push_back(0);
  for (auto& [c, entries] : groups) {
    idx.coords.push_back(c);
    double sum = 0.0;
    for (const auto& [t, val] : entries) {
      idx.entry_target.push_back(t);
      idx.entry_weight.push_back(val);
      sum += val;
    }
    idx.aggregate.push_back(sum);
    idx.group_off.push_back(idx.entry_target.size());
  }
  idx.rebuild_samplers();
  return idx;
}

// First stage of the hierarchical sampler: coordinates v weighted by
// x_s[v] * y^T[v], in ascending coordinate order. Empty when no walk reached
// any expanded target set.
struct FirstStage {
  std::vector<std::size_t> coord_slot;  // positions into idx.coords
  std::vector<double> weights;          // x_s[v] * y^T[v]
  double total = 0.0;
};

inline FirstStage first_stage_weights(const SamplerIndex& idx, const ForwardVector& x) {
  FirstStage fs;
  for (const auto& [c, xv] : x.coordinates()) {
    const std::size_t gi = idx.find_coord(c);
    if (gi == idx.coords.size()) continue;
    const double w = xv * idx.aggregate[gi];
    if (w <= 0.0) continue;
    fs.coord_slot.push_back(gi);
    fs.weights.push_back(w);
    fs.total += w;
  }
  return fs;
}

struct SampleResult {
  std::vector<std::pair<node_t, std::uint64_t>> ranking;  // count desc, id asc
  bool no_signal = false;
  std::uint64_t samples = 0;
  // Exact re-scores for the top subset when requested (estimate-ordered).
  std::vector<std::pair<node_t, double>> rescored;
};

inline ReverseVector flatten_sampler_target(const SamplerIndex& idx, node_t t, node_t n) {
  ReverseVector y;
  y.target = t;
  for (std::size_t gi = 0; gi < idx.coords.size(); ++gi) {
    const coord_t c = idx.coords[gi];
    for (std::uint64_t i = idx.group_off[gi]; i < idx.group_off[gi + 1]; ++i) {
      if (idx.entry_target[i] != t) continue;
      if (c < n)
        y.p.push_back({static_cast<node_t>(c), idx.entry_weight[i]});
      else
        y.r.push_back({static_cast<node_t>(c - n), idx.entry_weight[i]});
    }
  }
  return y;
}

// Hierarchical sampling (two stages: coordinate, then target). The marginal
// probability of t, conditional on x_s, is <x_s, y^t> / sum_j <x_s, y^j>.
// Targets never sampled are ranked below all sampled ones by ascending id.
// Optionally the top-k by count are re-scored with exact dot products.
inline SampleResult sample_and_rank_from_forward(const Graph& g, const ForwardVector& x,
                                                 const SamplerIndex& idx, std::uint64_t n_samples,
                                                 Rng& rng,
                                                 std::optional<std::size_t> rescore_top) {
  SampleResult res;
  const FirstStage fs = first_stage_weights(idx, x);
  if (fs.weights.empty()) {
    res.no_signal = true;
    return res;
  }
  const AliasTable stage_one(fs.weights);

  std::vector<std::uint64_t> counts(idx.targets.size(), 0);
  auto target_slot = [&idx](node_t t) {
    return static_cast<std::size_t>(
        std::lower_bound(idx.targets.begin(), idx.targets.end(), t) - idx.targets.begin());
  };
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const std::size_t gi = fs.coord_slot[stage_one.sample(rng)];
    const std::uint32_t pick = idx.samplers[gi].sample(rng);
    ++counts[target_slot(idx.entry_target[idx.group_off[gi] + pick])];
  }
  res.samples = n_samples;
  res.ranking.reserve(idx.targets.size());
  for (std::size_t i = 0; i < idx.targets.size(); ++i)
    res.ranking.push_back({idx.targets[i], counts[i]});
  std::sort(res.ranking.begin(), res.ranking.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  if (rescore_top) {
    const std::size_t k = std::min(*rescore_top, res.ranking.size());
    for (std::size_t i = 0; i < k; ++i) {
      const node_t t = res.ranking[i].first;
      const ReverseVector y = flatten_sampler_target(idx, t, g.num_nodes());
      res.rescored.push_back({t, estimate_from_vectors(x, y)});
    }
    std::sort(res.rescored.begin(), res.rescored.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
  }
  return res;
}

inline SampleResult sample_and_rank(const Graph& g, double alpha,
                                    const SourceDistribution& source, const SamplerIndex& idx,
                                    std::uint64_t w, std::uint64_t n_samples, Rng& rng,
                                    std::optional<std::size_t> rescore_top = std::nullopt) {
  const ForwardVector x = forward_vector(g, alpha, source, w, rng);
  return sample_and_rank_from_forward(g, x, idx, n_samples, rng, rescore_top);
}

// --- power-law parameter model ---------------------------------------------

// Model value of the k-th largest PPR within a target set of size T_size,
// assuming scores follow a power law with exponent beta:
// ((1-beta) / T_size^(1-beta)) * k^(-beta) * pi_T.
inline double power_law_delta(std::uint64_t T_size, double pi_T, std::uint64_t k, double beta) {
  if (k < 1 || k > T_size) throw InputError("power_law_delta: need 1 <= k <= T_size");
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("power_law_delta: beta must be in (0,1)");
  return (1.0 - beta) / std::pow(static_cast<double>(T_size), 1.0 - beta) *
         std::pow(static_cast<double>(k), -beta) * pi_T;
}

// Residual threshold for a target set, chosen so that a fixed walk budget w
// resolves the top-k under the power-law model:
// r_max(T) = w * pi_T / (c2 * T_size^(1-beta)) with c2 = k^beta * c / (1-beta).
inline double adaptive_r_max(std::uint64_t T_size, double pr_T, std::uint64_t w, double beta,
                             std::uint64_t k, double c) {
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("adaptive_r_max: beta must be in (0,1)");
  if (!(pr_T > 0.0) || w < 1 || !(c > 0.0) || k < 1 || T_size < 1)
    throw InputError("adaptive_r_max: all parameters must be positive");
  const double c2 = std::pow(static_cast<double>(k), beta) * c / (1.0 - beta);
  return static_cast<double>(w) * pr_T /
         (c2 * std::pow(static_cast<double>(T_size), 1.0 - beta));
}

}  // namespace bippr
