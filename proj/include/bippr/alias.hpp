#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "bippr/rng.hpp"

namespace bippr {

// Walker/Vose alias table: O(K) construction, O(1) per draw, with sampling
// probability weight_i / total_weight. Construction is deterministic for a
// fixed input order.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights) {
    const std::size_t k = weights.size();
    if (k == 0) throw std::invalid_argument("alias table: no weights");
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("alias table: negative weight");
      total_ += w;
    }
    if (!(total_ > 0.0)) throw std::invalid_argument("alias table: all weights zero");

    prob_.assign(k, 0.0);
    alias_.assign(k, 0);
    std::vector<double> scaled(k);
    for (std::size_t i = 0; i < k; ++i) scaled[i] = weights[i] * static_cast<double>(k) / total_;

    std::queue<std::uint32_t> small, large;
    for (std::size_t i = 0; i < k; ++i)
      (scaled[i] < 1.0 ? small : large).push(static_cast<std::uint32_t>(i));

    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.front(), l = large.front();
      small.pop();
      large.pop();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      (scaled[l] < 1.0 ? small : large).push(l);
    }
    // Leftovers are exactly 1 up to rounding.
    while (!large.empty()) {
      prob_[large.front()] = 1.0;
      alias_[large.front()] = large.front();
      large.pop();
    }
    while (!small.empty()) {
      prob_[small.front()] = 1.0;
      alias_[small.front()] = small.front();
      small.pop();
    }
  }

  std::uint32_t sample(Rng& rng) const {
    const std::uint32_t slot = rng.next_below(static_cast<std::uint32_t>(prob_.size()));
    return rng.next_double() < prob_[slot] ? slot : alias_[slot];
  }

  std::size_t size() const { return prob_.size(); }
  double total_weight() const { return total_; }

  // Exact per-outcome probability implied by the table structure:
  // (prob_i + sum over slots aliased to i of 1-prob_slot) / K.
  std::vector<double> outcome_probabilities() const {
    const std::size_t k = prob_.size();
    std::vector<double> out(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      out[i] += prob_[i];
      if (alias_[i] != i) out[alias_[i]] += 1.0 - prob_[i];
    }
    for (double& v : out) v /= static_cast<double>(k);
    return out;
  }

 private:
  std::vector<double> prob_;         // acceptance threshold per slot
  std::vector<std::uint32_t> alias_; // fallback outcome per slot
  double total_ = 0.0;
};

}  // namespace bippr
