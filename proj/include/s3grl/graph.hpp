// Copyright 2026 The s3grl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "s3grl/common.hpp"
#include "s3grl/sparse.hpp"

namespace s3grl {

/**
 * Immutable undirected graph in compressed-row form.
 *
 * Neighbor lists are strictly increasing and never contain the node itself.
 * Optional node features are a dense row-major float matrix with one row per
 * node.
 */
class Graph {
 public:
  Graph() = default;

  /// Builds a graph on nodes [0, num_nodes). Duplicate and reversed edges are
  /// merged and self-loops dropped.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
    std::vector<Edge> directed;
    directed.reserve(edges.size() * 2);
    for (const auto& e : edges) {
      if (e.first >= num_nodes || e.second >= num_nodes)
        throw Error("edge (" + std::to_string(e.first) + ", " + std::to_string(e.second) +
                    ") references a node outside [0, " + std::to_string(num_nodes) + ")");
      if (e.first == e.second) continue;
      directed.push_back(e);
      directed.push_back({e.second, e.first});
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    Graph g;
    g.num_nodes_ = num_nodes;
    g.offsets_.assign(num_nodes + 1, 0);
    g.neighbors_.reserve(directed.size());
    for (const auto& e : directed) {
      ++g.offsets_[e.first + 1];
      g.neighbors_.push_back(e.second);
    }
    for (std::size_t i = 0; i < num_nodes; ++i) g.offsets_[i + 1] += g.offsets_[i];
    return g;
  }

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId node) const {
    return {neighbors_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }
  std::size_t degree(NodeId node) const { return offsets_[node + 1] - offsets_[node]; }

  bool has_edge(NodeId a, NodeId b) const {
    const auto nbrs = neighbors(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
  }

  bool contains(NodeId node) const noexcept { return node < num_nodes_; }

  /// Edge list with first < second, sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (NodeId a = 0; a < num_nodes_; ++a)
      for (NodeId b : neighbors(a))
        if (a < b) out.push_back({a, b});
    return out;
  }

  /// Copy with the given undirected edges removed; features carried over.
  Graph without_edges(std::span<const Edge> removed) const {
    std::vector<Edge> drop(removed.begin(), removed.end());
    for (auto& e : drop) e = e.normalized();
    std::sort(drop.begin(), drop.end());
    std::vector<Edge> kept;
    for (const auto& e : edges())
      if (!std::binary_search(drop.begin(), drop.end(), e)) kept.push_back(e);
    Graph g = from_edges(num_nodes_, kept);
    g.features_ = features_;
    g.feature_dim_ = feature_dim_;
    return g;
  }

  bool has_features() const noexcept { return feature_dim_ > 0; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::span<const float> feature_row(NodeId node) const {
    return {features_.data() + static_cast<std::size_t>(node) * feature_dim_, feature_dim_};
  }

  /// Copy with features attached. data is row-major, num_nodes x dim.
  Graph with_features(std::vector<float> data, std::size_t dim) const {
    if (dim == 0 || data.size() != num_nodes_ * dim)
      throw Error("feature matrix has " + std::to_string(data.size()) + " values, expected " +
                  std::to_string(num_nodes_) + " x " + std::to_string(dim));
    Graph g = *this;
    g.features_ = std::move(data);
    g.feature_dim_ = dim;
    return g;
  }

  /// Copy with features from another graph of the same node count.
  Graph with_features_of(const Graph& other) const {
    Graph g = *this;
    g.features_ = other.features_;
    g.feature_dim_ = other.feature_dim_;
    return g;
  }

  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const std::vector<NodeId>& adjacency() const noexcept { return neighbors_; }
  const std::vector<float>& features() const noexcept { return features_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.offsets_ == b.offsets_ && a.neighbors_ == b.neighbors_ &&
           a.feature_dim_ == b.feature_dim_ && a.features_ == b.features_;
  }

 private:
  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::vector<float> features_;
  std::size_t feature_dim_ = 0;
};

// ---------------------------------------------------------------------------
// Loading and writing
// ---------------------------------------------------------------------------

enum class IdMapping {
  Preserve,  ///< node ids are used as-is; the graph spans 0..max_id
  Compact,   ///< distinct ids are remapped to 0..k-1 in ascending order
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && !(line[i] == ' ' || line[i] == '\t' || line[i] == ',' || line[i] == '\r')) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace detail

/// Reads a whitespace-separated "u v" edge list. Lines starting with
/// comment_prefix (after leading blanks) and blank lines are skipped.
inline Graph load_edge_list(const std::filesystem::path& path, char comment_prefix = '#',
                            IdMapping mapping = IdMapping::Preserve) {
  auto in = detail::open_input(path);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    const auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || view[first] == comment_prefix) continue;
    const auto fields = detail::split_fields(view);
    std::uint64_t a = 0, b = 0;
    if (fields.size() < 2 || !detail::parse_number(fields[0], a) || !detail::parse_number(fields[1], b))
      throw ParseError("malformed edge line '" + line + "' in " + path.string(), line_no);
    raw.emplace_back(a, b);
  }
  if (raw.empty()) throw Error("edge list " + path.string() + " contains no edges");

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  std::size_t num_nodes = 0;
  if (mapping == IdMapping::Preserve) {
    std::uint64_t max_id = 0;
    for (auto [a, b] : raw) max_id = std::max({max_id, a, b});
    if (max_id >= std::numeric_limits<NodeId>::max()) throw Error("node id too large in " + path.string());
    num_nodes = static_cast<std::size_t>(max_id) + 1;
    for (auto [a, b] : raw) edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b)});
  } else {
    std::vector<std::uint64_t> ids;
    for (auto [a, b] : raw) {
      ids.push_back(a);
      ids.push_back(b);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto index_of = [&](std::uint64_t id) {
      return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    for (auto [a, b] : raw) edges.push_back({index_of(a), index_of(b)});
    num_nodes = ids.size();
    std::ofstream sidecar(path.string() + ".ids");
    if (!sidecar) throw Error("cannot write id sidecar for " + path.string());
    sidecar << "# dense_id original_id\n";
    for (std::size_t i = 0; i < ids.size(); ++i) sidecar << i << ' ' << ids[i] << '\n';
  }
  Graph g = Graph::from_edges(num_nodes, edges);
  if (g.num_edges() == 0) throw Error("edge list " + path.string() + " contains only self-loops");
  return g;
}

inline void write_edge_list(const Graph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# nodes " << graph.num_nodes() << " edges " << graph.num_edges() << '\n';
  for (const auto& e : graph.edges()) out << e.first << ' ' << e.second << '\n';
}

/// Attaches one feature row per node, comma or whitespace separated.
inline Graph load_features(const std::filesystem::path& path, const Graph& graph) {
  auto in = detail::open_input(path);
  std::vector<float> data;
  std::size_t dim = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (rows == 0) dim = fields.size();
    if (fields.size() != dim)
      throw ParseError("ragged feature row " + std::to_string(rows) + ": " + std::to_string(fields.size()) +
                           " values, expected " + std::to_string(dim),
                       line_no);
    for (auto f : fields) {
      float value = 0;
      if (!detail::parse_number(f, value))
        throw ParseError("bad feature value '" + std::string(f) + "' in row " + std::to_string(rows), line_no);
      data.push_back(value);
    }
    ++rows;
  }
  if (rows != graph.num_nodes())
    throw Error("feature file " + path.string() + " has " + std::to_string(rows) + " rows, graph has " +
                std::to_string(graph.num_nodes()) + " nodes");
  return graph.with_features(std::move(data), dim);
}

// ---------------------------------------------------------------------------
// Splits and negative sampling
// ---------------------------------------------------------------------------

struct SplitRatios {
  double train = 0.85;
  double valid = 0.05;
  double test = 0.10;
};

struct EdgeSplit {
  Graph observed_graph;
  std::vector<Edge> train_pos, valid_pos, test_pos;
  std::vector<Edge> train_neg, valid_neg, test_neg;
  SplitRatios ratios;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t pair_key(Edge e) {
  e = e.normalized();
  return (static_cast<std::uint64_t>(e.first) << 32) | e.second;
}

}  // namespace detail

/// Uniform rejection sampling of distinct unordered non-edges, disjoint from
/// exclude. Falls back to enumeration when non-edges are scarce.
inline std::vector<Edge> sample_negatives(const Graph& graph, std::size_t count, std::uint64_t seed,
                                          std::span<const Edge> exclude = {}) {
  const std::uint64_t n = graph.num_nodes();
  std::set<std::uint64_t> excluded;
  for (const auto& e : exclude)
    if (e.first != e.second && !graph.has_edge(e.first, e.second)) excluded.insert(detail::pair_key(e));
  const std::uint64_t all_pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  const std::uint64_t available = all_pairs - graph.num_edges() - excluded.size();
  if (count > available)
    throw Error("cannot draw " + std::to_string(count) + " negatives: only " + std::to_string(available) +
                " non-edges available");

  Rng rng(seed);
  std::vector<Edge> out;
  out.reserve(count);
  if (available < 4 * count) {
    std::vector<Edge> pool;
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b)
        if (!graph.has_edge(a, b) && !excluded.count(detail::pair_key({a, b}))) pool.push_back({a, b});
    for (std::size_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }
  std::set<std::uint64_t> chosen;
  while (out.size() < count) {
    const auto a = static_cast<NodeId>(rng.below(n));
    const auto b = static_cast<NodeId>(rng.below(n));
    if (a == b || graph.has_edge(a, b)) continue;
    const Edge e = Edge{a, b}.normalized();
    const auto key = detail::pair_key(e);
    if (excluded.count(key) || !chosen.insert(key).second) continue;
    out.push_back(e);
  }
  return out;
}

/// Seeded shuffle-and-partition of the edge set. Valid and test get
/// floor(m * ratio) edges, train the remainder. Negatives are drawn per split,
/// equal in count to positives and disjoint across splits.
inline EdgeSplit split_edges(const Graph& graph, SplitRatios ratios, std::uint64_t seed) {
  if (ratios.train <= 0 || ratios.valid <= 0 || ratios.test <= 0 ||
      std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9)
    throw Error("split ratios must be positive and sum to 1");
  auto edges = graph.edges();
  const std::size_t m = edges.size();
  const auto n_valid = static_cast<std::size_t>(std::floor(static_cast<double>(m) * ratios.valid + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(m) * ratios.test + 1e-9));
  if (n_valid == 0 || n_test == 0 || n_valid + n_test >= m)
    throw Error("split of " + std::to_string(m) + " edges leaves an empty partition");
  const std::size_t n_train = m - n_valid - n_test;

  Rng rng(mix_seed(seed, 0x5350));
  shuffle(edges, rng);

  EdgeSplit split;
  split.ratios = ratios;
  split.seed = seed;
  split.train_pos.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.valid_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_train),
                         edges.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  split.test_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), edges.end());

  std::vector<Edge> held_out = split.valid_pos;
  held_out.insert(held_out.end(), split.test_pos.begin(), split.test_pos.end());
  split.observed_graph = graph.without_edges(held_out);

  std::vector<Edge> taken;
  split.train_neg = sample_negatives(graph, n_train, mix_seed(seed, 1), taken);
  taken.insert(taken.end(), split.train_neg.begin(), split.train_neg.end());
  split.valid_neg = sample_negatives(graph, n_valid, mix_seed(seed, 2), taken);
  taken.insert(taken.end(), split.valid_neg.begin(), split.valid_neg.end());
  split.test_neg = sample_negatives(graph, n_test, mix_seed(seed, 3), taken);
  return split;
}

inline nlohmann::json split_manifest(const EdgeSplit& split) {
  return {
      {"seed", split.seed},
      {"ratios", {{"train", split.ratios.train}, {"valid", split.ratios.valid}, {"test", split.ratios.test}}},
      {"counts",
       {{"train_pos", split.train_pos.size()},
        {"valid_pos", split.valid_pos.size()},
        {"test_pos", split.test_pos.size()},
        {"train_neg", split.train_neg.size()},
        {"valid_neg", split.valid_neg.size()},
        {"test_neg", split.test_neg.size()},
        {"observed_edges", split.observed_graph.num_edges()}}},
      {"negative_sampling", "uniform non-edges, per split, equal to positives"},
      {"observed_graph", "original minus valid and test positives"},
  };
}

/// Persists each split as an edge-list file plus split.json into dir.
inline void save_split(const EdgeSplit& split, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::vector<Edge>& edges) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    for (const auto& e : edges) out << e.first << ' ' << e.second << '\n';
  };
  write("train_pos.txt", split.train_pos);
  write("valid_pos.txt", split.valid_pos);
  write("test_pos.txt", split.test_pos);
  write("train_neg.txt", split.train_neg);
  write("valid_neg.txt", split.valid_neg);
  write("test_neg.txt", split.test_neg);
  std::ofstream manifest(dir / "split.json");
  manifest << split_manifest(split).dump(2) << '\n';
}

/// Reads a plain "u v" pair file (no deduplication, order kept).
inline std::vector<Edge> load_pairs(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::vector<Edge> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    NodeId a = 0, b = 0;
    if (fields.size() < 2 || !detail::parse_number(fields[0], a) || !detail::parse_number(fields[1], b))
      throw ParseError("malformed pair line in " + path.string(), line_no);
    out.push_back({a, b});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

/// D^-1/2 (A + I) D^-1/2 with D the row sums of A + I.
template <typename T = double>
CsrMatrix<T> normalized_adjacency(const Graph& graph) {
  const std::size_t n = graph.num_nodes();
  CsrMatrix<T> out;
  out.rows = n;
  out.offsets.assign(n + 1, 0);
  std::vector<T> inv_sqrt(n);
  for (NodeId i = 0; i < n; ++i) inv_sqrt[i] = T{1} / std::sqrt(static_cast<T>(graph.degree(i) + 1));
  for (NodeId i = 0; i < n; ++i) {
    bool self_done = false;
    for (NodeId j : graph.neighbors(i)) {
      if (!self_done && i < j) {
        out.columns.push_back(i);
        out.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
        self_done = true;
      }
      out.columns.push_back(j);
      out.values.push_back(inv_sqrt[i] * inv_sqrt[j]);
    }
    if (!self_done) {
      out.columns.push_back(i);
      out.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
    }
    out.offsets[i + 1] = out.columns.size();
  }
  return out;
}

inline void check_node(const Graph& graph, NodeId node) {
  if (!graph.contains(node))
    throw Error("node id " + std::to_string(node) + " out of range [0, " + std::to_string(graph.num_nodes()) + ")");
}

/// N(u) ∩ N(v), ascending.
inline std::vector<NodeId> common_neighbors(const Graph& graph, NodeId u, NodeId v) {
  check_node(graph, u);
  check_node(graph, v);
  if (u == v) throw Error("common_neighbors needs two distinct nodes");
  const auto a = graph.neighbors(u);
  const auto b = graph.neighbors(v);
  std::vector<NodeId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace s3grl
