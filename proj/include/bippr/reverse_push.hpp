#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bippr/errors.hpp"
#include "bippr/graph.hpp"
#include "bippr/sparse.hpp"

namespace bippr {

inline constexpr std::uint64_t kDefaultPushBudget = 50'000'000;

// Result of a reverse push from target t: sparse estimates p (p^t) and
// residuals r (r^t). The defining invariant, for every start node s:
//
//   pi_s(t) = p(s) + sum_v pi_s(v) * r(v)
//
// holds after every individual push. Immutable once returned.
struct ReverseVector {
  node_t target = 0;
  SparseVec p;
  SparseVec r;
  double r_max_achieved = 0.0;       // max residual at termination
  std::uint64_t push_count = 0;
  std::uint64_t touched_mass = 0;    // sum of in-degrees of pushed nodes
};

// Observer invoked after every push with the current estimate and residual
// maps; used by invariant tests to checkpoint mid-run state.
using PushObserver =
    std::function<void(const std::unordered_map<node_t, double>& p,
                       const std::unordered_map<node_t, double>& r)>;

namespace detail {

// One push from v with captured residual rho. The residual is zeroed before
// mass is propagated so that self-loops are handled exactly.
inline void push_node(const Graph& g, double alpha, node_t v,
                      std::unordered_map<node_t, double>& p,
                      std::unordered_map<node_t, double>& r,
                      const std::function<void(node_t, double)>& on_residual_update) {
  const auto it = r.find(v);
  const double rho = it->second;
  p[v] += alpha * rho;
  it->second = 0.0;
  const auto nbrs = g.in_neighbors(v);
  const auto wts = g.in_weights(v);
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const node_t u = nbrs[i];
    const double nv = (r[u] += (1.0 - alpha) * wts[i] * rho);
    on_residual_update(u, nv);
  }
}

inline ReverseVector freeze(node_t t, std::unordered_map<node_t, double>& p,
                            std::unordered_map<node_t, double>& r, std::uint64_t pushes,
                            std::uint64_t touched) {
  ReverseVector out;
  out.target = t;
  out.p = sparse_from_map(p);
  out.r = sparse_from_map(r);
  out.push_count = pushes;
  out.touched_mass = touched;
  for (const auto& [_, val] : out.r) out.r_max_achieved = std::max(out.r_max_achieved, val);
  return out;
}

}  // namespace detail

// Reverse local push from t until every residual is <= r_max (the loop guard
// is the strict comparison r(v) > r_max). Nodes are processed in FIFO order
// of first exceeding r_max, which makes small traces reproducible by hand.
inline ReverseVector approx_contributions(const Graph& g, double alpha, node_t t, double r_max,
                                          std::uint64_t push_budget = kDefaultPushBudget,
                                          const PushObserver& observer = nullptr) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("approx_contributions: bad alpha");
  if (!(r_max > 0.0)) throw InputError("approx_contributions: r_max must be positive");
  if (t >= g.num_nodes()) throw InputError("approx_contributions: target out of range");

  std::unordered_map<node_t, double> p, r;
  std::deque<node_t> queue;
  std::unordered_set<node_t> queued;
  r[t] = 1.0;
  if (1.0 > r_max) {
    queue.push_back(t);
    queued.insert(t);
  }

  std::uint64_t pushes = 0, touched = 0;
  auto enqueue_if_over = [&](node_t u, double value) {
    if (value > r_max && queued.insert(u).second) queue.push_back(u);
  };
  while (!queue.empty()) {
    const node_t v = queue.front();
    queue.pop_front();
    queued.erase(v);
    if (++pushes > push_budget)
      throw BudgetError("approx_contributions: push budget exceeded for target " +
                            std::to_string(t),
                        t);
    touched += g.in_degree(v);
    detail::push_node(g, alpha, v, p, r, enqueue_if_over);
    if (observer) observer(p, r);
  }
  return detail::freeze(t, p, r, pushes, touched);
}

// Balanced variant (dynamic runtime balancing): always push from the node
// with the largest residual, and stop as soon as the cost of the next push
// would exceed the predicted cost of the walk phase,
// walk_cost * c * r_max_current / delta. Costs are operation counts
// (1 + in-degree per push) so the stopping point is deterministic;
// walk_cost is the measured average cost of one walk in the same units.
inline ReverseVector approx_contributions_balanced(const Graph& g, double alpha, node_t t,
                                                   double delta, double c, double walk_cost,
                                                   std::uint64_t push_budget = kDefaultPushBudget,
                                                   const PushObserver& observer = nullptr) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("balanced push: bad alpha");
  if (!(delta > 0.0) || !(c > 0.0) || !(walk_cost > 0.0))
    throw InputError("balanced push: delta, c and walk_cost must be positive");
  if (t >= g.num_nodes()) throw InputError("balanced push: target out of range");

  std::unordered_map<node_t, double> p, r;
  // Lazy max-heap: stale entries are skipped when their recorded residual no
  // longer matches the map.
  std::priority_queue<std::pair<double, node_t>> heap;
  r[t] = 1.0;
  heap.push({1.0, t});

  std::uint64_t pushes = 0, touched = 0;
  double elapsed = 0.0;
  auto on_update = [&heap](node_t u, double value) {
    if (value > 0.0) heap.push({value, u});
  };
  while (!heap.empty()) {
    const auto [value, v] = heap.top();
    const auto it = r.find(v);
    if (it == r.end() || it->second != value) {
      heap.pop();  // stale
      continue;
    }
    if (value <= 0.0) break;
    const double next_cost = 1.0 + static_cast<double>(g.in_degree(v));
    const double predicted_walk_time = walk_cost * c * value / delta;
    if (elapsed + next_cost > predicted_walk_time) break;
    heap.pop();
    if (++pushes > push_budget)
      throw BudgetError("balanced push: push budget exceeded for target " + std::to_string(t), t);
    touched += g.in_degree(v);
    elapsed += next_cost;
    detail::push_node(g, alpha, v, p, r, on_update);
    if (observer) observer(p, r);
  }
  return detail::freeze(t, p, r, pushes, touched);
}

}  // namespace bippr
