#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bippr/graph.hpp"

namespace bippr {

// Sparse vector over node ids, stored sorted by id. The frozen form of the
// accumulation maps used inside the push and walk loops.
using SparseVec = std::vector<std::pair<node_t, double>>;

inline double sparse_get(const SparseVec& v, node_t id) {
  const auto it = std::lower_bound(v.begin(), v.end(), id,
                                   [](const auto& e, node_t key) { return e.first < key; });
  return (it != v.end() && it->first == id) ? it->second : 0.0;
}

inline SparseVec sparse_from_map(const std::unordered_map<node_t, double>& m,
                                 bool drop_zeros = true) {
  SparseVec out;
  out.reserve(m.size());
  for (const auto& [id, val] : m)
    if (!drop_zeros || val != 0.0) out.push_back({id, val});
  std::sort(out.begin(), out.end());
  return out;
}

inline double sparse_sum(const SparseVec& v) {
  double s = 0.0;
  for (const auto& [_, val] : v) s += val;
  return s;
}

// Reverse vectors y^t live in R^{2n}: coordinates [0, n) address the estimate
// block and [n, 2n) the residual block.
using coord_t = std::uint64_t;

inline coord_t estimate_coord(node_t v) { return v; }
inline coord_t residual_coord(node_t n, node_t v) { return static_cast<coord_t>(n) + v; }

}  // namespace bippr
