#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "bippr/bidirectional.hpp"
#include "bippr/container.hpp"
#include "bippr/graph.hpp"
#include "bippr/grouped_index.hpp"
#include "bippr/oracle.hpp"
#include "bippr/sampler_search.hpp"
#include "bippr/walks.hpp"

namespace bippr::bench {

// Desk-scale rerun of the search experiment protocol: for each target-set
// size, draw random target sets and random sources, run every selected
// method on the same queries, and report median wall time and precision@k
// against the exact oracle. Strictly single-threaded; timing covers the
// query phase only (index construction and graph load are excluded).

enum class Method { mc, per_target, grouped, sampling };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::mc: return "mc";
    case Method::per_target: return "per-target";
    case Method::grouped: return "grouped";
    case Method::sampling: return "sampling";
  }
  return "?";
}

struct BenchConfig {
  double alpha = 0.2;
  std::uint64_t walks = 10000;  // w; r_max follows from the adaptive rule
  double c = 20.0;
  double beta = 0.77;
  std::uint64_t k = 3;
  double mc_constant = 40.0;  // Monte-Carlo walk budget = mc_constant / delta_k
  std::uint32_t num_sets = 10;
  std::uint32_t num_sources = 10;
  std::uint64_t seed = 1;
  bool measure_precision = true;
};

struct BenchCell {
  std::string method;
  std::uint64_t T_size = 0;
  double median_ms = 0.0;
  double precision_at_k = 0.0;
  bool precision_available = false;
  std::uint64_t median_walks = 0;
  std::uint64_t median_query_pushes = 0;
  std::uint64_t precompute_pushes = 0;  // median per set
  std::uint64_t index_bytes = 0;        // median per set (grouped+sampler kinds)
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline std::uint64_t median_u64(std::vector<std::uint64_t> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

inline std::vector<node_t> draw_targets(node_t n, std::uint64_t size, Rng& rng) {
  std::set<node_t> picked;
  while (picked.size() < size) picked.insert(rng.next_below(n));
  return {picked.begin(), picked.end()};
}

template <typename R>
inline std::vector<node_t> top_k_of(const R& ranking, std::size_t k) {
  std::vector<node_t> out;
  for (std::size_t i = 0; i < ranking.size() && i < k; ++i) out.push_back(ranking[i].first);
  return out;
}

inline double precision_against(const std::vector<node_t>& method_top,
                                const std::vector<std::pair<node_t, double>>& oracle_top) {
  if (oracle_top.empty()) return 0.0;
  std::size_t hits = 0;
  for (node_t t : method_top)
    for (const auto& [o, _] : oracle_top)
      if (t == o) {
        ++hits;
        break;
      }
  return static_cast<double>(hits) / static_cast<double>(oracle_top.size());
}

}  // namespace detail

inline std::vector<BenchCell> run_search_bench(const Graph& g, const BenchConfig& cfg,
                                               const std::vector<std::uint64_t>& T_sizes,
                                               const std::vector<Method>& methods) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchCell> cells;

  const oracle::ExactPpr global = oracle::global_pagerank(g, cfg.alpha);
  Rng rng(cfg.seed);
  const bool oracle_ok = cfg.measure_precision && g.num_nodes() <= oracle::kMaxOracleNodes;

  for (const std::uint64_t T_size : T_sizes) {
    struct SetData {
      std::vector<node_t> targets;
      std::vector<node_t> sources;
      double r_max = 0.0;
      double delta = 0.0;
      GroupedIndex grouped;
      SamplerIndex sampler;
      std::uint64_t precompute_pushes = 0;
      std::uint64_t index_bytes = 0;
      std::vector<std::vector<std::pair<node_t, double>>> oracle_top;  // per source
    };
    std::vector<SetData> sets(cfg.num_sets);

    const bool need_grouped =
        std::count(methods.begin(), methods.end(), Method::grouped) > 0;
    const bool need_sampler =
        std::count(methods.begin(), methods.end(), Method::sampling) > 0;

    for (auto& sd : sets) {
      sd.targets = detail::draw_targets(g.num_nodes(), T_size, rng);
      for (std::uint32_t i = 0; i < cfg.num_sources; ++i)
        sd.sources.push_back(rng.next_below(g.num_nodes()));
      double pr_T = 0.0;
      for (node_t t : sd.targets) pr_T += global.pi[t];
      sd.r_max = adaptive_r_max(T_size, pr_T, cfg.walks, cfg.beta, cfg.k, cfg.c);
      sd.delta = cfg.c * sd.r_max / static_cast<double>(cfg.walks);
      if (need_grouped) {
        sd.grouped = build_grouped(g, cfg.alpha, sd.targets, sd.r_max);
        sd.index_bytes += container::serialize(sd.grouped, g).size();
        for (const auto& s : sd.grouped.stats) sd.precompute_pushes += s.push_count;
      }
      if (need_sampler) {
        sd.sampler = build_sampler_index(g, cfg.alpha, sd.targets, sd.r_max);
        sd.index_bytes += container::serialize(sd.sampler, g).size();
        if (!need_grouped)
          for (const auto& s : sd.sampler.stats) sd.precompute_pushes += s.push_count;
      }
      if (oracle_ok)
        for (node_t s : sd.sources)
          sd.oracle_top.push_back(oracle::exact_top_k(
              g, cfg.alpha, SourceDistribution::single(s), sd.targets, cfg.k));
    }

    for (const Method method : methods) {
      BenchCell cell;
      cell.method = method_name(method);
      cell.T_size = T_size;
      std::vector<double> times_ms;
      std::vector<double> precisions;
      std::vector<std::uint64_t> walks_used, pushes_used, pre_pushes, bytes;

      Rng method_rng = Rng::derive(cfg.seed, 1000 * T_size + static_cast<int>(method));
      bool warmed_up = false;
      for (std::size_t si = 0; si < sets.size(); ++si) {
        SetData& sd = sets[si];
        pre_pushes.push_back(sd.precompute_pushes);
        bytes.push_back(sd.index_bytes);
        for (std::size_t qi = 0; qi < sd.sources.size(); ++qi) {
          const SourceDistribution src = SourceDistribution::single(sd.sources[qi]);
          std::vector<node_t> top;
          std::uint64_t q_walks = 0, q_pushes = 0;

          auto run_once = [&](Rng& qrng) {
            switch (method) {
              case Method::mc: {
                const std::uint64_t budget = static_cast<std::uint64_t>(
                    std::ceil(cfg.mc_constant / sd.delta));
                const McResult r = monte_carlo_search(g, cfg.alpha, src, sd.targets, budget,
                                                      budget, qrng);
                q_walks = r.walks_used;
                top = detail::top_k_of(r.ranking, cfg.k);
                break;
              }
              case Method::per_target: {
                const ForwardVector x = forward_vector(g, cfg.alpha, src, cfg.walks, qrng);
                std::vector<std::pair<node_t, double>> scored;
                scored.reserve(sd.targets.size());
                for (node_t t : sd.targets) {
                  const ReverseVector y = approx_contributions(g, cfg.alpha, t, sd.r_max);
                  q_pushes += y.push_count;
                  scored.push_back({t, estimate_from_vectors(x, y)});
                }
                std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
                  return a.second != b.second ? a.second > b.second : a.first < b.first;
                });
                q_walks = cfg.walks;
                top = detail::top_k_of(scored, cfg.k);
                break;
              }
              case Method::grouped: {
                const GroupedScores r =
                    rank_targets_grouped(g, cfg.alpha, src, sd.grouped, cfg.walks, qrng);
                q_walks = cfg.walks;
                top = detail::top_k_of(r.ranking, cfg.k);
                break;
              }
              case Method::sampling: {
                const SampleResult r = sample_and_rank(g, cfg.alpha, src, sd.sampler, cfg.walks,
                                                       cfg.walks, qrng);
                q_walks = cfg.walks;
                top = detail::top_k_of(r.ranking, cfg.k);
                break;
              }
            }
          };

          if (!warmed_up) {
            Rng warm_rng = Rng::derive(cfg.seed, 0xBEEF);
            run_once(warm_rng);  // excluded from timing
            warmed_up = true;
            q_walks = q_pushes = 0;
            top.clear();
          }
          Rng qrng = method_rng.split();
          const auto t0 = clock::now();
          run_once(qrng);
          const auto t1 = clock::now();
          times_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
          walks_used.push_back(q_walks);
          pushes_used.push_back(q_pushes);
          if (oracle_ok)
            precisions.push_back(detail::precision_against(top, sd.oracle_top[qi]));
        }
      }

      cell.median_ms = detail::median(times_ms);
      cell.median_walks = detail::median_u64(walks_used);
      cell.median_query_pushes = detail::median_u64(pushes_used);
      cell.precompute_pushes = detail::median_u64(pre_pushes);
      cell.index_bytes = detail::median_u64(bytes);
      cell.precision_available = oracle_ok;
      if (oracle_ok) cell.precision_at_k = detail::median(precisions);
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace bippr::bench
