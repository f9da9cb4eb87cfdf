#pragma once

#include <cmath>
#include <cstdint>

#include "bippr/errors.hpp"
#include "bippr/graph.hpp"
#include "bippr/reverse_push.hpp"
#include "bippr/rng.hpp"
#include "bippr/sparse.hpp"
#include "bippr/walks.hpp"

namespace bippr {

// Accuracy constant found to give mean relative error under 8% in practice.
inline constexpr double kPracticalC = 7.0;

// c large enough for the (1 +/- epsilon, p_fail) estimation guarantee.
inline double choose_c(double epsilon, double p_fail) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InputError("choose_c: epsilon must be in (0,1]");
  if (!(p_fail > 0.0 && p_fail < 1.0)) throw InputError("choose_c: p_fail must be in (0,1)");
  return (3.0 / (epsilon * epsilon)) * std::log(2.0 / p_fail);
}

// Residual threshold minimizing the combined push + walk running-time bound
// for a uniformly random target: (epsilon/alpha) * sqrt(dbar / ln(2/p_fail)).
inline double default_r_max(const Graph& g, double epsilon, double alpha, double p_fail) {
  return (epsilon / alpha) * std::sqrt(g.average_degree() / std::log(2.0 / p_fail));
}

// Simpler alternative that balances the two phases by edge count alone.
inline double balance_r_max(std::uint64_t m, double c_balance = 1.0) {
  return c_balance / std::sqrt(static_cast<double>(m));
}

struct EstimatorParams {
  double alpha = 0.2;
  double delta = 1e-6;   // minimum PPR value to resolve
  double epsilon = 0.5;  // relative error target
  double p_fail = 0.01;
  double c = kPracticalC;
  double r_max = 0.0;    // residual threshold for the plain push
  bool balanced = false; // use the max-residual push with runtime balancing
  double walk_cost = 1.0;
  std::uint64_t push_budget = kDefaultPushBudget;

  std::uint64_t walk_count(double r) const {
    return static_cast<std::uint64_t>(std::ceil(c * r / delta));
  }

  // Sufficient condition for the estimation guarantee to apply.
  bool guarantee_applies(double r) const {
    return r > 2.0 * std::exp(1.0) * delta / (alpha * epsilon);
  }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("params: alpha must be in (0,1)");
    if (!(delta > 0.0)) throw InputError("params: delta must be positive");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InputError("params: epsilon must be in (0,1]");
    if (!(p_fail > 0.0 && p_fail < 1.0)) throw InputError("params: p_fail must be in (0,1)");
    if (!(c > 0.0)) throw InputError("params: c must be positive");
    if (!balanced && !(r_max > 0.0)) throw InputError("params: r_max must be positive");
    if (balanced && !(walk_cost > 0.0)) throw InputError("params: walk_cost must be positive");
  }
};

struct PprEstimate {
  double value = 0.0;      // p_term + walk_term
  double p_term = 0.0;     // source-weighted estimate block
  double walk_term = 0.0;  // mean sampled residual
  std::uint64_t w = 0;     // walks used
  double r_max_achieved = 0.0;
  bool within_guarantee = false;
};

namespace detail {

struct DotTerms {
  double p_term = 0.0;
  double walk_term = 0.0;
};

// <x_s, y^t> split into its two blocks. Both sums run over the nonzero
// coordinates of x in ascending order, which pins the floating-point result:
// the grouped index reproduces it bit for bit.
inline DotTerms dot_terms(const ForwardVector& x, const ReverseVector& y) {
  DotTerms out;
  for (const auto& [v, q] : x.source.entries()) {
    const double pv = sparse_get(y.p, v);
    if (pv != 0.0) out.p_term += q * pv;
  }
  for (const auto& [v, c] : x.endpoint_counts) {
    const double rv = sparse_get(y.r, v);
    if (rv != 0.0) out.walk_term += x.walk_value(c) * rv;
  }
  return out;
}

}  // namespace detail

// PPR estimate as the dot product of a forward and a reverse vector.
inline double estimate_from_vectors(const ForwardVector& x, const ReverseVector& y) {
  if (x.n == 0) throw InputError("estimate_from_vectors: empty forward vector");
  const auto [p_term, walk_term] = detail::dot_terms(x, y);
  return p_term + walk_term;
}

struct BidirectionalRun {
  PprEstimate estimate;
  ForwardVector forward;
  ReverseVector reverse;
};

// The bidirectional estimator: reverse push from t, then w = ceil(c*r/delta)
// geometric(alpha) walks from the source; the estimate is p^t weighted by the
// source plus the mean residual at the walk endpoints. Unbiased for pi_s(t).
// For a source distribution the p-term is the exact sparse dot sigma . p^t.
inline BidirectionalRun bidirectional_ppr_run(const Graph& g, const SourceDistribution& source,
                                              node_t t, const EstimatorParams& params, Rng& rng) {
  params.validate();
  BidirectionalRun run;
  if (params.balanced) {
    run.reverse = approx_contributions_balanced(g, params.alpha, t, params.delta, params.c,
                                                params.walk_cost, params.push_budget);
  } else {
    run.reverse =
        approx_contributions(g, params.alpha, t, params.r_max, params.push_budget);
  }
  const double r_bound = params.balanced ? run.reverse.r_max_achieved : params.r_max;
  const std::uint64_t w = std::max<std::uint64_t>(1, params.walk_count(r_bound));
  run.forward = forward_vector(g, params.alpha, source, w, rng);

  const auto [p_term, walk_term] = detail::dot_terms(run.forward, run.reverse);
  run.estimate.p_term = p_term;
  run.estimate.walk_term = walk_term;
  run.estimate.value = p_term + walk_term;
  run.estimate.w = w;
  run.estimate.r_max_achieved = run.reverse.r_max_achieved;
  run.estimate.within_guarantee = params.guarantee_applies(r_bound);
  return run;
}

inline PprEstimate bidirectional_ppr(const Graph& g, const SourceDistribution& source, node_t t,
                                     const EstimatorParams& params, Rng& rng) {
  return bidirectional_ppr_run(g, source, t, params, rng).estimate;
}

}  // namespace bippr
