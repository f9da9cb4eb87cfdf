#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "bippr/errors.hpp"
#include "bippr/graph.hpp"
#include "bippr/grouped_index.hpp"
#include "bippr/reverse_push.hpp"
#include "bippr/sampler_search.hpp"

namespace bippr {

// Versioned binary container for persisted indexes. Little-endian, fixed
// field order, trailing checksum over the whole stream; loads verify the
// checksum and the graph fingerprint before anything else is interpreted.
// Alias tables are derived data and are rebuilt on load.

struct ContainerError : InputError {
  explicit ContainerError(const std::string& what) : InputError(what) {}
};

namespace container {

inline constexpr char kMagic[8] = {'B', 'I', 'P', 'P', 'R', 'I', 'D', 'X'};
inline constexpr std::uint32_t kVersion = 1;

enum class Kind : std::uint8_t {
  grouped = 1,
  sampler = 2,
  reverse_vectors = 3,
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Writer {
  std::string buf;

  void raw(const void* p, std::size_t len) {
    buf.append(static_cast<const char*>(p), len);
  }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
};

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  void raw(void* p, std::size_t len) {
    if (pos + len > buf.size()) throw ContainerError("container truncated");
    std::memcpy(p, buf.data() + pos, len);
    pos += len;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    raw(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, 8);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

inline void write_header(Writer& w, Kind kind, const Graph& g, double alpha, double r_max,
                         const std::vector<node_t>& targets) {
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u64(g.num_nodes());
  w.u64(g.num_edges());
  w.u64(g.fingerprint());
  w.f64(alpha);
  w.f64(r_max);
  w.u64(targets.size());
  for (node_t t : targets) w.u32(t);
}

struct Header {
  Kind kind;
  std::uint64_t n, m, fingerprint;
  double alpha, r_max;
  std::vector<node_t> targets;
};

inline Header read_header(Reader& r, const Graph& g) {
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ContainerError("container: bad magic bytes");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw ContainerError("container: unsupported format version " + std::to_string(version));
  Header h;
  h.kind = static_cast<Kind>(r.u8());
  h.n = r.u64();
  h.m = r.u64();
  h.fingerprint = r.u64();
  if (h.n != g.num_nodes() || h.m != g.num_edges() || h.fingerprint != g.fingerprint())
    throw ContainerError("container: graph fingerprint mismatch");
  h.alpha = r.f64();
  h.r_max = r.f64();
  const std::uint64_t nt = r.u64();
  h.targets.reserve(nt);
  for (std::uint64_t i = 0; i < nt; ++i) h.targets.push_back(r.u32());
  return h;
}

inline void write_stats(Writer& w, const std::vector<TargetStats>& stats) {
  for (const auto& s : stats) {
    w.u32(s.target);
    w.u64(s.push_count);
    w.u64(s.touched_mass);
    w.u64(s.p_entries);
    w.u64(s.r_entries);
  }
}

inline std::vector<TargetStats> read_stats(Reader& r, std::size_t count) {
  std::vector<TargetStats> stats(count);
  for (auto& s : stats) {
    s.target = r.u32();
    s.push_count = r.u64();
    s.touched_mass = r.u64();
    s.p_entries = r.u64();
    s.r_entries = r.u64();
  }
  return stats;
}

inline std::string seal(Writer& w) {
  w.u64(fnv1a(w.buf));
  return std::move(w.buf);
}

inline Reader open_checked(const std::string& bytes) {
  if (bytes.size() < 8) throw ContainerError("container truncated");
  const std::string body = bytes.substr(0, bytes.size() - 8);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  if (fnv1a(body) != stored) throw ContainerError("container: checksum mismatch");
  return Reader{bytes};
}

}  // namespace detail

// --- grouped index ----------------------------------------------------------

inline std::string serialize(const GroupedIndex& idx, const Graph& g) {
  detail::Writer w;
  detail::write_header(w, Kind::grouped, g, idx.alpha, idx.r_max, idx.targets);
  detail::write_stats(w, idx.stats);
  w.u64(idx.coords.size());
  for (std::size_t gi = 0; gi < idx.coords.size(); ++gi) {
    w.u64(idx.coords[gi]);
    const std::uint64_t b = idx.group_off[gi], e = idx.group_off[gi + 1];
    w.u64(e - b);
    for (std::uint64_t i = b; i < e; ++i) {
      w.u32(idx.entry_target[i]);
      w.f64(idx.entry_value[i]);
    }
  }
  return detail::seal(w);
}

inline GroupedIndex deserialize_grouped(const std::string& bytes, const Graph& g) {
  detail::Reader r = detail::open_checked(bytes);
  const detail::Header h = detail::read_header(r, g);
  if (h.kind != Kind::grouped) throw ContainerError("container: not a grouped index");
  GroupedIndex idx;
  idx.targets = h.targets;
  idx.alpha = h.alpha;
  idx.r_max = h.r_max;
  idx.stats = detail::read_stats(r, idx.targets.size());
  const std::uint64_t nc = r.u64();
  idx.group_off.push_back(0);
  for (std::uint64_t gi = 0; gi < nc; ++gi) {
    idx.coords.push_back(r.u64());
    const std::uint64_t sz = r.u64();
    for (std::uint64_t i = 0; i < sz; ++i) {
      idx.entry_target.push_back(r.u32());
      idx.entry_value.push_back(r.f64());
    }
    idx.group_off.push_back(idx.entry_target.size());
  }
  return idx;
}

// --- sampler index ----------------------------------------------------------

inline std::string serialize(const SamplerIndex& idx, const Graph& g) {
  detail::Writer w;
  detail::write_header(w, Kind::sampler, g, idx.alpha, idx.r_max, idx.targets);
  detail::write_stats(w, idx.stats);
  w.u64(idx.coords.size());
  for (std::size_t gi = 0; gi < idx.coords.size(); ++gi) {
    w.u64(idx.coords[gi]);
    w.f64(idx.aggregate[gi]);
  }
  for (std::size_t gi = 0; gi < idx.coords.size(); ++gi) {
    const std::uint64_t b = idx.group_off[gi], e = idx.group_off[gi + 1];
    w.u64(e - b);
    for (std::uint64_t i = b; i < e; ++i) {
      w.u32(idx.entry_target[i]);
      w.f64(idx.entry_weight[i]);
    }
  }
  return detail::seal(w);
}

inline SamplerIndex deserialize_sampler(const std::string& bytes, const Graph& g) {
  detail::Reader r = detail::open_checked(bytes);
  const detail::Header h = detail::read_header(r, g);
  if (h.kind != Kind::sampler) throw ContainerError("container: not a sampler index");
  SamplerIndex idx;
  idx.targets = h.targets;
  idx.alpha = h.alpha;
  idx.r_max = h.r_max;
  idx.stats = detail::read_stats(r, idx.targets.size());
  const std::uint64_t nc = r.u64();
  for (std::uint64_t gi = 0; gi < nc; ++gi) {
    idx.coords.push_back(r.u64());
    idx.aggregate.push_back(r.f64());
  }
  idx.group_off.push_back(0);
  for (std::uint64_t gi = 0; gi < nc; ++gi) {
    const std::uint64_t sz = r.u64();
    for (std::uint64_t i = 0; i < sz; ++i) {
      idx.entry_target.push_back(r.u32());
      idx.entry_weight.push_back(r.f64());
    }
    idx.group_off.push_back(idx.entry_target.size());
  }
  idx.rebuild_samplers();
  return idx;
}

// --- raw reverse vectors ----------------------------------------------------

inline std::string serialize(const std::vector<ReverseVector>& vecs, const Graph& g, double alpha,
                             double r_max) {
  detail::Writer w;
  std::vector<node_t> targets;
  targets.reserve(vecs.size());
  for (const auto& y : vecs) targets.push_back(y.target);
  detail::write_header(w, Kind::reverse_vectors, g, alpha, r_max, targets);
  for (const auto& y : vecs) {
    w.u32(y.target);
    w.f64(y.r_max_achieved);
    w.u64(y.push_count);
    w.u64(y.touched_mass);
    w.u64(y.p.size());
    for (const auto& [v, val] : y.p) {
      w.u32(v);
      w.f64(val);
    }
    w.u64(y.r.size());
    for (const auto& [v, val] : y.r) {
      w.u32(v);
      w.f64(val);
    }
  }
  return detail::seal(w);
}

inline std::vector<ReverseVector> deserialize_reverse_vectors(const std::string& bytes,
                                                              const Graph& g) {
  detail::Reader r = detail::open_checked(bytes);
  const detail::Header h = detail::read_header(r, g);
  if (h.kind != Kind::reverse_vectors)
    throw ContainerError("container: not a reverse-vector set");
  std::vector<ReverseVector> out;
  out.reserve(h.targets.size());
  for (std::size_t i = 0; i < h.targets.size(); ++i) {
    ReverseVector y;
    y.target = r.u32();
    y.r_max_achieved = r.f64();
    y.push_count = r.u64();
    y.touched_mass = r.u64();
    const std::uint64_t np = r.u64();
    for (std::uint64_t j = 0; j < np; ++j) {
      const node_t v = r.u32();
      y.p.push_back({v, r.f64()});
    }
    const std::uint64_t nr = r.u64();
    for (std::uint64_t j = 0; j < nr; ++j) {
      const node_t v = r.u32();
      y.r.push_back({v, r.f64()});
    }
    out.push_back(std::move(y));
  }
  return out;
}

// --- file helpers -----------------------------------------------------------

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

inline Kind peek_kind(const std::string& bytes) {
  if (bytes.size() < 13) throw ContainerError("container truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw ContainerError("container: bad magic bytes");
  return static_cast<Kind>(static_cast<std::uint8_t>(bytes[12]));
}

}  // namespace container
}  // namespace bippr
