#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "bippr/errors.hpp"
#include "bippr/rng.hpp"

namespace bippr {

using node_t = std::uint32_t;

inline constexpr node_t kMaxNodeId = 0xFFFFFFFEu;
inline constexpr double kStochasticTol = 1e-9;

struct Edge {
  node_t u;
  node_t v;
  double w;
};

// Immutable directed weighted graph in CSR form with both out- and
// in-adjacency. Out-weights are normalized so every row sums to 1; nodes with
// no out-edge get an implicit self-loop of weight 1 at construction time so
// that random-walk semantics are total. Immutable after construction and safe
// for unrestricted concurrent reads.
class Graph {
 public:
  // `edges` need not be sorted. Duplicate (u,v) pairs are an error; weights
  // must be strictly positive. `n_hint` extends the id space beyond the
  // largest endpoint seen (for isolated trailing nodes).
  static Graph build(std::vector<Edge> edges, node_t n_hint = 0) {
    Graph g;
    node_t max_id = n_hint == 0 ? 0 : n_hint - 1;
    for (const Edge& e : edges) {
      max_id = std::max({max_id, e.u, e.v});
      if (!(e.w > 0.0) || !std::isfinite(e.w))
        throw InputError("edge weight must be strictly positive and finite");
    }
    if (edges.empty() && n_hint == 0) throw InputError("graph has no edges and no node count");
    g.n_ = max_id + 1;

    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v)
        throw InputError("duplicate edge " + std::to_string(edges[i].u) + "->" +
                         std::to_string(edges[i].v));

    // Self-loop for every node with out-degree 0, so walks never get stuck.
    std::vector<char> has_out(g.n_, 0);
    for (const Edge& e : edges) has_out[e.u] = 1;
    for (node_t u = 0; u < g.n_; ++u)
      if (!has_out[u]) {
        edges.push_back({u, u, 1.0});
        ++g.dangling_fixed_;
      }
    if (g.dangling_fixed_ > 0)
      std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
      });

    g.m_ = edges.size();
    g.out_off_.assign(g.n_ + 1, 0);
    for (const Edge& e : edges) ++g.out_off_[e.u + 1];
    for (node_t u = 0; u < g.n_; ++u) g.out_off_[u + 1] += g.out_off_[u];
    g.out_nbr_.resize(g.m_);
    g.out_wt_.resize(g.m_);
    g.out_cum_.resize(g.m_);
    {
      std::size_t i = 0;
      for (const Edge& e : edges) {
        g.out_nbr_[i] = e.v;
        g.out_wt_[i] = e.w;
        ++i;
      }
    }
    // Normalize each row; keep a cumulative copy for O(log d) walk steps.
    for (node_t u = 0; u < g.n_; ++u) {
      const std::size_t b = g.out_off_[u], e = g.out_off_[u + 1];
      double sum = 0.0;
      for (std::size_t i = b; i < e; ++i) sum += g.out_wt_[i];
      double acc = 0.0;
      for (std::size_t i = b; i < e; ++i) {
        g.out_wt_[i] /= sum;
        acc += g.out_wt_[i];
        g.out_cum_[i] = acc;
      }
      if (e > b) g.out_cum_[e - 1] = 1.0;
    }

    // Exact transpose (weights are the normalized out-weights).
    g.in_off_.assign(g.n_ + 1, 0);
    for (std::size_t i = 0; i < g.m_; ++i) ++g.in_off_[g.out_nbr_[i] + 1];
    for (node_t u = 0; u < g.n_; ++u) g.in_off_[u + 1] += g.in_off_[u];
    g.in_nbr_.resize(g.m_);
    g.in_wt_.resize(g.m_);
    {
      std::vector<std::size_t> cursor(g.in_off_.begin(), g.in_off_.end() - 1);
      for (node_t u = 0; u < g.n_; ++u)
        for (std::size_t i = g.out_off_[u]; i < g.out_off_[u + 1]; ++i) {
          const std::size_t slot = cursor[g.out_nbr_[i]]++;
          g.in_nbr_[slot] = u;
          g.in_wt_[slot] = g.out_wt_[i];
        }
    }
    g.fingerprint_ = g.compute_fingerprint();
    return g;
  }

  node_t num_nodes() const { return n_; }
  std::uint64_t num_edges() const { return m_; }
  double average_degree() const { return static_cast<double>(m_) / static_cast<double>(n_); }
  node_t dangling_fixed() const { return dangling_fixed_; }

  node_t out_degree(node_t u) const {
    return static_cast<node_t>(out_off_[u + 1] - out_off_[u]);
  }
  node_t in_degree(node_t u) const { return static_cast<node_t>(in_off_[u + 1] - in_off_[u]); }

  std::span<const node_t> out_neighbors(node_t u) const {
    return {out_nbr_.data() + out_off_[u], out_off_[u + 1] - out_off_[u]};
  }
  std::span<const double> out_weights(node_t u) const {
    return {out_wt_.data() + out_off_[u], out_off_[u + 1] - out_off_[u]};
  }
  std::span<const node_t> in_neighbors(node_t u) const {
    return {in_nbr_.data() + in_off_[u], in_off_[u + 1] - in_off_[u]};
  }
  std::span<const double> in_weights(node_t u) const {
    return {in_wt_.data() + in_off_[u], in_off_[u + 1] - in_off_[u]};
  }

  // One weighted transition from u. `r01` must be uniform in [0,1).
  node_t step(node_t u, double r01) const {
    const std::size_t b = out_off_[u], e = out_off_[u + 1];
    const double* first = out_cum_.data() + b;
    const double* last = out_cum_.data() + e;
    const double* it = std::upper_bound(first, last, r01);
    if (it == last) --it;
    return out_nbr_[b + static_cast<std::size_t>(it - first)];
  }

  // Stable identity of (n, m, adjacency, weights); used to bind persisted
  // indexes to the graph they were built from.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::uint64_t compute_fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xFF;
        h *= 0x100000001b3ULL;
      }
    };
    mix(n_);
    mix(m_);
    for (node_t u = 0; u < n_; ++u) {
      mix(out_degree(u));
      for (std::size_t i = out_off_[u]; i < out_off_[u + 1]; ++i) {
        mix(out_nbr_[i]);
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(double));
        std::memcpy(&bits, &out_wt_[i], sizeof(bits));
        mix(bits);
      }
    }
    return h;
  }

  node_t n_ = 0;
  std::uint64_t m_ = 0;
  node_t dangling_fixed_ = 0;
  std::vector<std::size_t> out_off_, in_off_;
  std::vector<node_t> out_nbr_, in_nbr_;
  std::vector<double> out_wt_, in_wt_, out_cum_;
  std::uint64_t fingerprint_ = 0;
};

namespace detail {

inline bool parse_u64(const std::string& tok, std::uint64_t& out) {
  if (tok.empty()) return false;
  std::uint64_t v = 0;
  for (char ch : tok) {
    if (ch < '0' || ch > '9') return false;
    const std::uint64_t d = static_cast<std::uint64_t>(ch - '0');
    if (v > (UINT64_MAX - d) / 10) return false;
    v = v * 10 + d;
  }
  out = v;
  return true;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline node_t parse_node_id(const std::string& tok, std::size_t line_no) {
  std::uint64_t id;
  if (!parse_u64(tok, id))
    throw InputError("line " + std::to_string(line_no) + ": bad node id '" + tok + "'");
  if (id > kMaxNodeId)
    throw InputError("line " + std::to_string(line_no) + ": node id overflow");
  return static_cast<node_t>(id);
}

}  // namespace detail

// Edge-list format: UTF-8 text, '#'-prefixed comment lines, optional
// "#nodes N" header, TAB-separated "u\tv" (unweighted) or "u\tv\tw"
// (weighted). Any malformed line rejects the whole load with its line number.
inline Graph load_edge_list(std::istream& in, bool weighted) {
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  node_t n_hint = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string word;
      hs >> word;
      if (word == "nodes") {
        std::string count;
        hs >> count;
        std::uint64_t nv;
        if (!detail::parse_u64(count, nv) || nv == 0 || nv > static_cast<std::uint64_t>(kMaxNodeId) + 1)
          throw InputError("line " + std::to_string(line_no) + ": bad #nodes header");
        n_hint = static_cast<node_t>(nv);
      }
      continue;
    }
    const auto fields = detail::split_tabs(line);
    if (fields.size() != (weighted ? 3u : 2u))
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       (weighted ? std::string("u<TAB>v<TAB>w") : std::string("u<TAB>v")));
    const node_t u = detail::parse_node_id(fields[0], line_no);
    const node_t v = detail::parse_node_id(fields[1], line_no);
    double w = 1.0;
    if (weighted) {
      try {
        std::size_t used = 0;
        w = std::stod(fields[2], &used);
        if (used != fields[2].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InputError("line " + std::to_string(line_no) + ": bad weight '" + fields[2] + "'");
      }
      if (!(w > 0.0) || !std::isfinite(w))
        throw InputError("line " + std::to_string(line_no) + ": weight must be positive");
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
    if (!seen.insert(key).second)
      throw InputError("line " + std::to_string(line_no) + ": duplicate edge " +
                       std::to_string(u) + "->" + std::to_string(v));
    edges.push_back({u, v, w});
  }
  if (n_hint > 0)
    for (const Edge& e : edges)
      if (e.u >= n_hint || e.v >= n_hint)
        throw InputError("#nodes header smaller than max node id");
  return Graph::build(std::move(edges), n_hint);
}

// Keyword map: keyword -> sorted duplicate-free target list, plus the inverse
// node -> keyword list. gamma() is the maximum number of keywords on any node.
class KeywordMap {
 public:
  const std::vector<node_t>& targets(const std::string& keyword) const {
    static const std::vector<node_t> empty;
    const auto it = by_keyword_.find(keyword);
    return it == by_keyword_.end() ? empty : it->second;
  }

  const std::vector<std::string>& keywords_of(node_t v) const {
    static const std::vector<std::string> empty;
    const auto it = by_node_.find(v);
    return it == by_node_.end() ? empty : it->second;
  }

  std::vector<std::string> keywords() const {
    std::vector<std::string> out;
    out.reserve(by_keyword_.size());
    for (const auto& [kw, _] : by_keyword_) out.push_back(kw);
    return out;  // std::map keeps these sorted
  }

  std::size_t gamma() const {
    std::size_t g = 0;
    for (const auto& [_, kws] : by_node_) g = std::max(g, kws.size());
    return g;
  }

  void add(node_t v, const std::string& keyword) {
    auto& list = by_keyword_[keyword];
    const auto it = std::lower_bound(list.begin(), list.end(), v);
    if (it != list.end() && *it == v) return;
    list.insert(it, v);
    by_node_[v].push_back(keyword);
  }

 private:
  std::map<std::string, std::vector<node_t>> by_keyword_;
  std::unordered_map<node_t, std::vector<std::string>> by_node_;
};

// Keyword file format: lines "node<TAB>kw1,kw2,...". Node ids must be < n.
inline KeywordMap load_keywords(std::istream& in, node_t n) {
  KeywordMap km;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() != 2)
      throw InputError("line " + std::to_string(line_no) + ": expected node<TAB>keywords");
    const node_t v = detail::parse_node_id(fields[0], line_no);
    if (v >= n)
      throw InputError("line " + std::to_string(line_no) + ": node id " + std::to_string(v) +
                       " not in graph (n=" + std::to_string(n) + ")");
    std::stringstream ks(fields[1]);
    std::string kw;
    bool any = false;
    while (std::getline(ks, kw, ',')) {
      if (kw.empty()) continue;
      km.add(v, kw);
      any = true;
    }
    if (!any) throw InputError("line " + std::to_string(line_no) + ": no keywords");
  }
  return km;
}

// Either a single start node or an explicit sparse probability vector.
class SourceDistribution {
 public:
  static SourceDistribution single(node_t s) {
    SourceDistribution d;
    d.entries_.push_back({s, 1.0});
    d.cumulative_.push_back(1.0);
    d.single_ = true;
    return d;
  }

  static SourceDistribution sparse(std::vector<std::pair<node_t, double>> entries) {
    if (entries.empty()) throw InputError("source distribution is empty");
    std::sort(entries.begin(), entries.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i > 0 && entries[i].first == entries[i - 1].first)
        throw InputError("source distribution has duplicate node");
      if (entries[i].second < 0.0) throw InputError("source distribution entry is negative");
      sum += entries[i].second;
    }
    if (std::abs(sum - 1.0) > kStochasticTol)
      throw InputError("source distribution does not sum to 1");
    SourceDistribution d;
    d.entries_ = std::move(entries);
    d.cumulative_.reserve(d.entries_.size());
    double acc = 0.0;
    for (const auto& [_, p] : d.entries_) {
      acc += p;
      d.cumulative_.push_back(acc);
    }
    d.cumulative_.back() = 1.0;
    return d;
  }

  bool is_single() const { return single_; }
  const std::vector<std::pair<node_t, double>>& entries() const { return entries_; }

  node_t sample(Rng& rng) const {
    if (single_) return entries_[0].first;
    const double r = rng.next_double();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    const std::size_t idx =
        std::min(static_cast<std::size_t>(it - cumulative_.begin()), entries_.size() - 1);
    return entries_[idx].first;
  }

  node_t max_node() const { return entries_.back().first; }

 private:
  std::vector<std::pair<node_t, double>> entries_;  // sorted by node
  std::vector<double> cumulative_;
  bool single_ = false;
};

// --- synthetic graphs (test and benchmark fixtures) ------------------------

struct Cycle {};
struct ErdosRenyi {
  double p;
};
struct DirectedPowerLaw {
  double exponent;  // target in-degree power-law exponent, > 1
};
using SyntheticModel = std::variant<Cycle, ErdosRenyi, DirectedPowerLaw>;

// Deterministic for fixed (n, model, seed). Every node ends up with
// out-degree >= 1 (Graph::build adds self-loops to sinks).
inline Graph generate_synthetic(node_t n, const SyntheticModel& model, std::uint64_t seed) {
  if (n < 1) throw InputError("generate_synthetic: n must be >= 1");
  std::vector<Edge> edges;

  if (std::holds_alternative<Cycle>(model)) {
    for (node_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
    return Graph::build(std::move(edges), n);
  }

  if (const auto* er = std::get_if<ErdosRenyi>(&model)) {
    if (er->p < 0.0 || er->p > 1.0) throw InputError("erdos_renyi: p must be in [0,1]");
    Rng rng(seed);
    for (node_t u = 0; u < n; ++u)
      for (node_t v = 0; v < n; ++v) {
        if (u == v) continue;
        if (rng.next_double() < er->p) edges.push_back({u, v, 1.0});
      }
    return Graph::build(std::move(edges), n);
  }

  const auto& pl = std::get<DirectedPowerLaw>(model);
  if (pl.exponent <= 1.0) throw InputError("directed_power_law: exponent must be > 1");
  Rng rng(seed);

  // Preferential targets: node v is chosen with weight (v+1)^(-1/(exp-1)),
  // which yields a power-law in-degree tail with the requested exponent.
  // A random permutation cycle keeps the graph strongly connected so that
  // personalized scores are positive for every (s, t) pair.
  const double a = 1.0 / (pl.exponent - 1.0);
  std::vector<double> cum(n);
  double acc = 0.0;
  for (node_t v = 0; v < n; ++v) {
    acc += std::pow(static_cast<double>(v + 1), -a);
    cum[v] = acc;
  }
  const double total = acc;

  std::vector<node_t> perm(n);
  for (node_t i = 0; i < n; ++i) perm[i] = i;
  for (node_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.next_below(i)]);

  std::unordered_set<std::uint64_t> seen;
  auto add_edge = [&](node_t u, node_t v) {
    const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
    if (seen.insert(key).second) edges.push_back({u, v, 1.0});
  };
  for (node_t i = 0; i < n; ++i) add_edge(perm[i], perm[(i + 1) % n]);

  for (node_t u = 0; u < n; ++u) {
    const node_t extra = 2 + rng.next_below(7);  // mean out-degree ~ 6.5
    for (node_t k = 0; k < extra; ++k) {
      const double r = rng.next_double() * total;
      const auto it = std::upper_bound(cum.begin(), cum.end(), r);
      node_t v = static_cast<node_t>(std::min<std::size_t>(it - cum.begin(), n - 1));
      if (v == u) continue;
      add_edge(u, v);
    }
  }
  return Graph::build(std::move(edges), n);
}

}  // namespace bippr
