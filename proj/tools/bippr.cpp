// bippr: bidirectional personalized PageRank estimation and search.
//
// Subcommands: estimate | precompute | search | bench | oracle | gen
// Exit codes:  0 success, 1 no-signal/truncated result, 2 input error,
//              3 push budget exceeded.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bippr/bench.hpp"
#include "bippr/bidirectional.hpp"
#include "bippr/container.hpp"
#include "bippr/graph.hpp"
#include "bippr/grouped_index.hpp"
#include "bippr/oracle.hpp"
#include "bippr/sampler_search.hpp"
#include "bippr/walks.hpp"

namespace {

using namespace bippr;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Graph load_graph(const std::string& path, bool weighted) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  return load_edge_list(in, weighted);
}

KeywordMap load_keyword_file(const std::string& path, node_t n) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open keyword file '" + path + "'");
  return load_keywords(in, n);
}

std::vector<node_t> parse_target_list(const std::string& csv, node_t n) {
  std::vector<node_t> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::uint64_t id;
    if (!detail::parse_u64(tok, id) || id >= n)
      throw InputError("bad target id '" + tok + "'");
    out.push_back(static_cast<node_t>(id));
  }
  if (out.empty()) throw InputError("empty target list");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t value) {
  if (opt->count() > 0) return value;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  std::cout << "seed=" << s << "\n";
  return s;
}

struct CommonOpts {
  std::string graph_path;
  bool weighted = false;
  std::string keywords_path;
  std::string keyword;
  std::string targets_csv;
  double alpha = 0.2;
  std::uint64_t seed = 0;
  const CLI::Option* seed_opt = nullptr;
};

std::vector<node_t> resolve_targets(const CommonOpts& c, const Graph& g) {
  const bool by_keyword = !c.keyword.empty();
  const bool by_list = !c.targets_csv.empty();
  if (by_keyword == by_list)
    throw InputError("need exactly one of --keyword or --targets");
  if (by_list) return parse_target_list(c.targets_csv, g.num_nodes());
  if (c.keywords_path.empty()) throw InputError("--keyword requires --keywords FILE");
  const KeywordMap km = load_keyword_file(c.keywords_path, g.num_nodes());
  const auto& t = km.targets(c.keyword);
  if (t.empty()) throw InputError("keyword '" + c.keyword + "' has no targets");
  return t;
}

void print_ranking_scores(const std::vector<std::pair<node_t, double>>& ranking,
                          std::size_t k) {
  for (std::size_t i = 0; i < ranking.size() && i < k; ++i)
    std::cout << "rank=" << (i + 1) << " target=" << ranking[i].first
              << " score=" << fmt(ranking[i].second) << "\n";
}

void print_ranking_counts(const std::vector<std::pair<node_t, std::uint64_t>>& ranking,
                          std::size_t k) {
  for (std::size_t i = 0; i < ranking.size() && i < k; ++i)
    std::cout << "rank=" << (i + 1) << " target=" << ranking[i].first
              << " count=" << ranking[i].second << "\n";
}

// Shared adaptive r_max rule (per-set): needs the global PageRank mass of T.
double adaptive_rmax_for(const Graph& g, double alpha, const std::vector<node_t>& targets,
                         std::uint64_t walks, double beta, std::uint64_t k, double c) {
  const oracle::ExactPpr global = oracle::global_pagerank(g, alpha);
  double pr_T = 0.0;
  for (node_t t : targets) pr_T += global.pi[t];
  return adaptive_r_max(targets.size(), pr_T, walks, beta, k, c);
}

int cmd_estimate(const CommonOpts& common, node_t source, node_t target, double delta_in,
                 double epsilon, double p_fail, double c_in, bool c_given, double rmax_in,
                 bool rmax_given, std::uint64_t push_budget) {
  const Graph g = load_graph(common.graph_path, common.weighted);
  if (source >= g.num_nodes() || target >= g.num_nodes())
    throw InputError("source or target out of range");

  EstimatorParams params;
  params.alpha = common.alpha;
  params.delta = delta_in > 0 ? delta_in : 4.0 / g.num_nodes();
  params.epsilon = epsilon;
  params.p_fail = p_fail;
  params.c = c_given ? c_in : kPracticalC;
  params.push_budget = push_budget;
  if (rmax_given) {
    params.r_max = rmax_in;
  } else {
    params.balanced = true;  // runtime-balanced push when no threshold given
  }

  Rng rng(common.seed);
  const PprEstimate est =
      bidirectional_ppr(g, SourceDistribution::single(source), target, params, rng);
  std::cout << "value=" << fmt(est.value) << " p_term=" << fmt(est.p_term)
            << " walk_term=" << fmt(est.walk_term) << " w=" << est.w
            << " rmax=" << fmt(rmax_given ? params.r_max : est.r_max_achieved)
            << " rmax_achieved=" << fmt(est.r_max_achieved)
            << " guarantee=" << (est.within_guarantee ? "in" : "out") << "\n";
  return 0;
}

int cmd_precompute(const CommonOpts& common, const std::string& method, double rmax_in,
                   bool rmax_given, bool adaptive, double beta, std::uint64_t k, double c,
                   std::uint64_t walks, const std::string& out_path,
                   std::uint64_t push_budget) {
  const Graph g = load_graph(common.graph_path, common.weighted);
  if (common.keywords_path.empty()) throw InputError("precompute requires --keywords");
  const KeywordMap km = load_keyword_file(common.keywords_path, g.num_nodes());
  if (method != "grouped" && method != "sampling")
    throw InputError("precompute method must be grouped or sampling");

  std::vector<std::string> keywords;
  if (!common.keyword.empty())
    keywords.push_back(common.keyword);
  else
    keywords = km.keywords();
  if (keywords.empty()) throw InputError("no keywords to precompute");

  const std::size_t gamma = km.gamma();
  std::uint64_t total_residual_entries = 0;
  double bound_r_max = 0.0;

  for (const std::string& kw : keywords) {
    const auto& targets = km.targets(kw);
    if (targets.empty()) throw InputError("keyword '" + kw + "' has no targets");
    double r_max = rmax_in;
    if (adaptive)
      r_max = adaptive_rmax_for(g, common.alpha, targets, walks, beta, k, c);
    else if (!rmax_given)
      throw InputError("precompute requires --rmax or --adaptive-rmax");

    std::string bytes;
    std::uint64_t residual_entries = 0, touched = 0;
    try {
      if (method == "grouped") {
        const GroupedIndex idx = build_grouped(g, common.alpha, targets, r_max, push_budget);
        residual_entries = idx.stored_residual_entries();
        touched = idx.total_touched_mass();
        bytes = container::serialize(idx, g);
      } else {
        const SamplerIndex idx =
            build_sampler_index(g, common.alpha, targets, r_max, push_budget);
        residual_entries = idx.stored_residual_entries();
        touched = idx.total_touched_mass();
        bytes = container::serialize(idx, g);
      }
    } catch (const BudgetError& e) {
      throw BudgetError("keyword '" + kw + "': " + e.what(), e.target);
    }

    const std::string path =
        keywords.size() == 1 ? out_path : out_path + "." + kw + ".idx";
    container::write_file(path, bytes);
    total_residual_entries += residual_entries;
    bound_r_max = std::max(bound_r_max, r_max);

    std::cout << "keyword=" << kw << " targets=" << targets.size() << " rmax=" << fmt(r_max)
              << " residual_entries=" << residual_entries << " touched_mass=" << touched
              << " bytes=" << bytes.size() << " file=" << path << "\n";
  }

  // Storage bound: total residual entries across keyword sets is at most
  // gamma * m / (alpha * r_max) for the smallest r_max in use.
  const double bound = static_cast<double>(gamma) * static_cast<double>(g.num_edges()) /
                       (common.alpha * bound_r_max);
  std::cout << "total_residual_entries=" << total_residual_entries << " gamma=" << gamma
            << " storage_bound=" << fmt(bound) << "\n";
  return 0;
}

int cmd_search(const CommonOpts& common, const std::string& method, node_t source,
               const std::string& index_path, double rmax_in, bool rmax_given, bool adaptive,
               double beta, std::uint64_t kk, double c, std::uint64_t walks,
               std::uint64_t samples_in, std::uint64_t walk_budget, std::uint64_t top_k,
               std::uint64_t push_budget) {
  const Graph g = load_graph(common.graph_path, common.weighted);
  if (source >= g.num_nodes()) throw InputError("source out of range");
  const SourceDistribution src = SourceDistribution::single(source);
  const std::vector<node_t> targets = resolve_targets(common, g);
  const std::size_t k = top_k == 0 ? targets.size() : top_k;
  Rng rng(common.seed);

  auto pick_rmax = [&]() {
    if (rmax_given) return rmax_in;
    if (adaptive) return adaptive_rmax_for(g, common.alpha, targets, walks, beta, kk, c);
    return default_r_max(g, 0.5, common.alpha, 0.01);
  };

  if (method == "oracle") {
    const auto ranking = oracle::exact_top_k(g, common.alpha, src, targets, k);
    std::cout << "method=oracle targets=" << targets.size() << "\n";
    print_ranking_scores(ranking, k);
    return 0;
  }

  if (method == "mc") {
    const std::uint64_t n_samples = samples_in == 0 ? 1000 : samples_in;
    const McResult res =
        monte_carlo_search(g, common.alpha, src, targets, n_samples, walk_budget, rng);
    std::cout << "method=mc targets=" << targets.size() << " walks_used=" << res.walks_used
              << " hits=" << res.hits << (res.truncated ? " truncated=1" : "") << "\n";
    print_ranking_counts(res.ranking, k);
    return res.truncated ? 1 : 0;
  }

  if (method == "per-target") {
    const double r_max = pick_rmax();
    const ForwardVector x = forward_vector(g, common.alpha, src, walks, rng);
    std::vector<std::pair<node_t, double>> scored;
    for (node_t t : targets) {
      const ReverseVector y = approx_contributions(g, common.alpha, t, r_max, push_budget);
      scored.push_back({t, estimate_from_vectors(x, y)});
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::cout << "method=per-target targets=" << targets.size() << " rmax=" << fmt(r_max)
              << " walks=" << walks << "\n";
    print_ranking_scores(scored, k);
    return 0;
  }

  if (method == "grouped") {
    GroupedIndex idx;
    if (!index_path.empty()) {
      idx = container::deserialize_grouped(container::read_file(index_path), g);
    } else {
      idx = build_grouped(g, common.alpha, targets, pick_rmax(), push_budget);
    }
    const GroupedScores res = rank_targets_grouped(g, common.alpha, src, idx, walks, rng);
    std::cout << "method=grouped targets=" << idx.targets.size() << " rmax=" << fmt(idx.r_max)
              << " walks=" << walks << " entries_touched=" << res.entries_touched << "\n";
    print_ranking_scores(res.ranking, k);
    return 0;
  }

  if (method == "sampling") {
    SamplerIndex idx;
    if (!index_path.empty()) {
      idx = container::deserialize_sampler(container::read_file(index_path), g);
    } else {
      idx = build_sampler_index(g, common.alpha, targets, pick_rmax(), push_budget);
    }
    const std::uint64_t n_samples = samples_in == 0 ? walks : samples_in;
    const SampleResult res =
        sample_and_rank(g, common.alpha, src, idx, walks, n_samples, rng);
    if (res.no_signal) {
      std::cout << "method=sampling no-signal\n";
      return 1;
    }
    std::cout << "method=sampling targets=" << idx.targets.size()
              << " rmax=" << fmt(idx.r_max) << " walks=" << walks
              << " samples=" << res.samples << "\n";
    print_ranking_counts(res.ranking, k);
    return 0;
  }

  throw InputError("unknown search method '" + method + "'");
}

int cmd_oracle(const CommonOpts& common, node_t source, std::uint64_t top_k) {
  const Graph g = load_graph(common.graph_path, common.weighted);
  if (source >= g.num_nodes()) throw InputError("source out of range");
  const std::vector<node_t> targets = resolve_targets(common, g);
  const std::size_t k = top_k == 0 ? targets.size() : top_k;
  const auto ranking =
      oracle::exact_top_k(g, common.alpha, SourceDistribution::single(source), targets, k);
  std::cout << "method=oracle targets=" << targets.size() << "\n";
  print_ranking_scores(ranking, k);
  return 0;
}

int cmd_bench(const CommonOpts& common, const std::string& T_csv, const std::string& methods_csv,
              std::uint64_t walks, double c, double beta, std::uint64_t k, double mc_constant,
              std::uint32_t num_sets, std::uint32_t num_sources, const std::string& out_prefix) {
  const Graph g = load_graph(common.graph_path, common.weighted);

  std::vector<std::uint64_t> T_sizes;
  {
    std::stringstream ss(T_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::uint64_t v;
      if (!detail::parse_u64(tok, v) || v == 0 || v > g.num_nodes())
        throw InputError("bad target-set size '" + tok + "'");
      T_sizes.push_back(v);
    }
  }
  std::vector<bench::Method> methods;
  {
    std::stringstream ss(methods_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "mc") methods.push_back(bench::Method::mc);
      else if (tok == "per-target") methods.push_back(bench::Method::per_target);
      else if (tok == "grouped") methods.push_back(bench::Method::grouped);
      else if (tok == "sampling") methods.push_back(bench::Method::sampling);
      else throw InputError("bad bench method '" + tok + "'");
    }
  }
  if (T_sizes.empty() || methods.empty()) throw InputError("bench needs sizes and methods");

  bench::BenchConfig cfg;
  cfg.alpha = common.alpha;
  cfg.walks = walks;
  cfg.c = c;
  cfg.beta = beta;
  cfg.k = k;
  cfg.mc_constant = mc_constant;
  cfg.num_sets = num_sets;
  cfg.num_sources = num_sources;
  cfg.seed = common.seed;

  const auto cells = bench::run_search_bench(g, cfg, T_sizes, methods);

  // Deterministic summary on stdout; wall times go to the report files only.
  for (const auto& cell : cells) {
    std::cout << "method=" << cell.method << " T=" << cell.T_size;
    if (cell.precision_available)
      std::cout << " precision_at_" << k << "=" << fmt(cell.precision_at_k);
    else
      std::cout << " precision_at_" << k << "=unavailable";
    std::cout << " walks=" << cell.median_walks << " pushes_query=" << cell.median_query_pushes
              << " pushes_precompute=" << cell.precompute_pushes
              << " index_bytes=" << cell.index_bytes << "\n";
  }

  std::ofstream report(out_prefix + "_report.txt");
  std::ofstream runtime(out_prefix + "_runtime.dat");
  std::ofstream precision(out_prefix + "_precision.dat");
  if (!report || !runtime || !precision)
    throw InputError("cannot write bench output files at prefix '" + out_prefix + "'");
  runtime << "# T method median_ms\n";
  precision << "# T method precision_at_" << k << "\n";
  for (const auto& cell : cells) {
    report << "method=" << cell.method << " T=" << cell.T_size
           << " median_ms=" << fmt(cell.median_ms) << " precision_at_" << k << "="
           << (cell.precision_available ? fmt(cell.precision_at_k) : "unavailable")
           << " walks=" << cell.median_walks << " pushes_query=" << cell.median_query_pushes
           << " pushes_precompute=" << cell.precompute_pushes
           << " index_bytes=" << cell.index_bytes << "\n";
    runtime << cell.T_size << " " << cell.method << " " << fmt(cell.median_ms) << "\n";
    if (cell.precision_available)
      precision << cell.T_size << " " << cell.method << " " << fmt(cell.precision_at_k) << "\n";
  }
  return 0;
}

int cmd_gen(const std::string& model, node_t n, double p, double exponent, std::uint64_t seed,
            const std::string& out_path) {
  SyntheticModel m = Cycle{};
  if (model == "cycle") m = Cycle{};
  else if (model == "er") m = ErdosRenyi{p};
  else if (model == "plaw") m = DirectedPowerLaw{exponent};
  else throw InputError("unknown model '" + model + "' (cycle|er|plaw)");

  const Graph g = generate_synthetic(n, m, seed);
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot open '" + out_path + "' for writing");
  out << "#nodes " << g.num_nodes() << "\n";
  for (node_t u = 0; u < g.num_nodes(); ++u)
    for (node_t v : g.out_neighbors(u)) out << u << "\t" << v << "\n";
  std::cout << "n=" << g.num_nodes() << " m=" << g.num_edges() << " file=" << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bidirectional personalized PageRank estimation and search"};
  app.require_subcommand(1);

  CommonOpts common;
  double delta = 0.0, epsilon = 0.5, p_fail = 0.01, c = 20.0, rmax = 0.0;
  double beta = 0.77, mc_constant = 40.0, exponent = 2.5, er_p = 0.05;
  std::uint64_t k = 3, walks = 10000, samples = 0, walk_budget = 1000000;
  std::uint64_t top_k = 0, push_budget = kDefaultPushBudget, n_gen = 100;
  std::uint32_t num_sets = 10, num_sources = 10;
  node_t source = 0, target = 0;
  std::string method, out_path = "bippr_out", index_path, T_csv = "10,100,1000";
  std::string methods_csv = "mc,per-target,grouped,sampling", model = "er";
  std::vector<double> adaptive_args;

  auto add_common = [&](CLI::App* sub, bool with_keywords = true) {
    sub->add_option("--graph", common.graph_path, "edge-list file")->required();
    sub->add_flag("--weighted", common.weighted, "edge list has a weight column");
    sub->add_option("--alpha", common.alpha, "teleport probability");
    common.seed_opt = sub->add_option("--seed", common.seed, "rng seed");
    if (with_keywords) {
      sub->add_option("--keywords", common.keywords_path, "keyword file");
      sub->add_option("--keyword", common.keyword, "keyword selecting the target set");
      sub->add_option("--targets", common.targets_csv, "explicit target ids, comma separated");
    }
  };

  auto* est = app.add_subcommand("estimate", "single-pair PPR estimate");
  add_common(est, false);
  est->add_option("--source", source, "start node")->required();
  est->add_option("--target", target, "target node")->required();
  est->add_option("--delta", delta, "minimum PPR threshold (default 4/n)");
  est->add_option("--epsilon", epsilon, "relative error");
  est->add_option("--pfail", p_fail, "failure probability");
  auto* c_opt = est->add_option("--c", c, "walk-count constant");
  auto* rmax_opt = est->add_option("--rmax", rmax, "residual threshold (default: balanced)");
  est->add_option("--push-budget", push_budget, "max pushes per reverse push");

  auto* pre = app.add_subcommand("precompute", "build and persist a search index");
  add_common(pre);
  pre->add_option("--method", method, "grouped|sampling")->required();
  auto* pre_rmax = pre->add_option("--rmax", rmax, "residual threshold");
  auto* pre_adapt = pre->add_option("--adaptive-rmax", adaptive_args,
                                    "beta k c: per-set residual rule")->expected(3);
  pre->add_option("--walks", walks, "walk budget for the adaptive rule");
  pre->add_option("--out", out_path, "output file (or prefix with many keywords)")->required();
  pre->add_option("--push-budget", push_budget, "max pushes per reverse push");

  auto* sea = app.add_subcommand("search", "rank a target set by PPR from a source");
  add_common(sea);
  sea->add_option("--method", method, "mc|per-target|grouped|sampling|oracle")->required();
  sea->add_option("--source", source, "start node")->required();
  sea->add_option("--index", index_path, "persisted index (grouped/sampling)");
  auto* sea_rmax = sea->add_option("--rmax", rmax, "residual threshold");
  auto* sea_adapt = sea->add_option("--adaptive-rmax", adaptive_args,
                                    "beta k c: per-set residual rule")->expected(3);
  sea->add_option("--walks", walks, "forward walks");
  sea->add_option("--samples", samples, "samples (mc hits / sampling draws)");
  sea->add_option("--walk-budget", walk_budget, "mc walk budget");
  sea->add_option("--k", top_k, "print top-k only (default: all)");
  sea->add_option("--push-budget", push_budget, "max pushes per reverse push");

  auto* ora = app.add_subcommand("oracle", "exact ranking by power iteration");
  add_common(ora);
  ora->add_option("--source", source, "start node")->required();
  ora->add_option("--k", top_k, "print top-k only (default: all)");

  auto* ben = app.add_subcommand("bench", "timing/precision sweep over |T|");
  add_common(ben, false);
  ben->add_option("--Tsizes", T_csv, "target-set sizes, comma separated");
  ben->add_option("--methods", methods_csv, "methods, comma separated");
  ben->add_option("--walks", walks, "walk budget w");
  ben->add_option("--c", c, "accuracy constant");
  ben->add_option("--beta", beta, "power-law exponent");
  ben->add_option("--k", k, "top-k for precision");
  ben->add_option("--mc-constant", mc_constant, "mc walk budget multiplier");
  ben->add_option("--sets", num_sets, "target sets per size");
  ben->add_option("--sources", num_sources, "sources per target set");
  ben->add_option("--out", out_path, "output file prefix");

  auto* gen = app.add_subcommand("gen", "write a synthetic edge-list file");
  gen->add_option("--model", model, "cycle|er|plaw")->required();
  gen->add_option("--n", n_gen, "node count")->required();
  gen->add_option("--p", er_p, "er edge probability");
  gen->add_option("--exponent", exponent, "plaw in-degree exponent");
  auto* gen_seed = gen->add_option("--seed", common.seed, "rng seed");
  gen->add_option("--out", out_path, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) {
      common.seed = resolve_seed(common.seed_opt, common.seed);
      return cmd_estimate(common, source, target, delta, epsilon, p_fail, c,
                          c_opt->count() > 0, rmax, rmax_opt->count() > 0, push_budget);
    }
    if (pre->parsed()) {
      const bool adaptive = pre_adapt->count() > 0;
      if (adaptive) {
        beta = adaptive_args[0];
        k = static_cast<std::uint64_t>(adaptive_args[1]);
        c = adaptive_args[2];
      }
      return cmd_precompute(common, method, rmax, pre_rmax->count() > 0, adaptive, beta, k, c,
                            walks, out_path, push_budget);
    }
    if (sea->parsed()) {
      common.seed = resolve_seed(common.seed_opt, common.seed);
      const bool adaptive = sea_adapt->count() > 0;
      if (adaptive) {
        beta = adaptive_args[0];
        k = static_cast<std::uint64_t>(adaptive_args[1]);
        c = adaptive_args[2];
      }
      return cmd_search(common, method, source, index_path, rmax, sea_rmax->count() > 0,
                        adaptive, beta, k, c, walks, samples, walk_budget, top_k, push_budget);
    }
    if (ora->parsed()) return cmd_oracle(common, source, top_k);
    if (ben->parsed()) {
      common.seed = resolve_seed(common.seed_opt, common.seed);
      return cmd_bench(common, T_csv, methods_csv, walks, c, beta, k, mc_constant, num_sets,
                       num_sources, out_path);
    }
    if (gen->parsed()) {
      if (gen_seed->count() == 0) common.seed = 1;
      return cmd_gen(model, n_gen, er_p, exponent, common.seed, out_path);
    }
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
