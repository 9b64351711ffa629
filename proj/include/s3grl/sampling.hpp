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
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "s3grl/common.hpp"
#include "s3grl/graph.hpp"

namespace s3grl {

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Hop distances of a subgraph node to the two targets.
struct TargetDistances {
  std::uint32_t to_u = kUnreachable;
  std::uint32_t to_v = kUnreachable;
  friend bool operator==(const TargetDistances&, const TargetDistances&) = default;
};

/**
 * Node-induced local graph around a target pair.
 *
 * Local id i corresponds to global_ids[i]; local ids 0 and 1 are the targets
 * u and v. The (u, v) edge itself is never part of `local`.
 *
 * hop_distances for non-target nodes follow the double-radius convention:
 * the distance to u is measured with v removed and vice versa. The two target
 * rows hold the plain in-subgraph distance between u and v.
 */
struct Subgraph {
  std::vector<NodeId> global_ids;
  Graph local;
  std::vector<TargetDistances> hop_distances;

  std::size_t size() const noexcept { return global_ids.size(); }

  /// Local position of a global node, or size() when absent.
  std::size_t find(NodeId global) const {
    const auto it = std::find(global_ids.begin(), global_ids.end(), global);
    return static_cast<std::size_t>(it - global_ids.begin());
  }
};

namespace detail {

/// BFS distances on g from source; `blocked` (if < n) is treated as removed.
inline std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId source, NodeId blocked = kUnreachable,
                                                std::uint32_t max_depth = kUnreachable) {
  std::vector<std::uint32_t> dist(g.num_nodes(), kUnreachable);
  std::vector<NodeId> frontier{source}, next;
  dist[source] = 0;
  for (std::uint32_t depth = 0; !frontier.empty() && depth < max_depth; ++depth) {
    next.clear();
    for (NodeId x : frontier)
      for (NodeId y : g.neighbors(x))
        if (y != blocked && dist[y] == kUnreachable) {
          dist[y] = depth + 1;
          next.push_back(y);
        }
    frontier.swap(next);
  }
  return dist;
}

inline void check_targets(const Graph& graph, NodeId u, NodeId v) {
  check_node(graph, u);
  check_node(graph, v);
  if (u == v) throw Error("target pair must hold two distinct nodes");
}

}  // namespace detail

/// Builds the induced subgraph over `ids` (ids[0] = u, ids[1] = v), dropping
/// the target edge, and fills hop distances.
inline Subgraph induce_subgraph(const Graph& graph, std::vector<NodeId> ids) {
  Subgraph sub;
  std::unordered_map<NodeId, NodeId> local_of;
  local_of.reserve(ids.size() * 2);
  for (std::size_t i = 0; i < ids.size(); ++i) local_of.emplace(ids[i], static_cast<NodeId>(i));
  if (local_of.size() != ids.size()) throw Error("subgraph node list has duplicates");

  std::vector<Edge> local_edges;
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (NodeId nb : graph.neighbors(ids[a])) {
      const auto it = local_of.find(nb);
      if (it == local_of.end() || it->second <= a) continue;
      if (a == 0 && it->second == 1) continue;  // target link
      local_edges.push_back({static_cast<NodeId>(a), it->second});
    }
  sub.local = Graph::from_edges(ids.size(), local_edges);
  sub.global_ids = std::move(ids);

  const auto from_u = detail::bfs_distances(sub.local, 0, 1);
  const auto from_v = detail::bfs_distances(sub.local, 1, 0);
  const auto plain = detail::bfs_distances(sub.local, 0);
  sub.hop_distances.resize(sub.size());
  for (std::size_t i = 2; i < sub.size(); ++i) sub.hop_distances[i] = {from_u[i], from_v[i]};
  sub.hop_distances[0] = {0, plain[1]};
  sub.hop_distances[1] = {plain[1], 0};
  return sub;
}

/// Enclosing h-hop subgraph: every node within distance h of u or v, with the
/// target link removed. Nodes are ordered targets first, then hop by hop with
/// ascending ids within a hop.
inline Subgraph extract_h_hop(const Graph& graph, NodeId u, NodeId v, std::uint32_t h) {
  detail::check_targets(graph, u, v);
  if (h < 1) throw Error("hop count must be at least 1");
  std::vector<NodeId> ids{u, v};
  std::vector<NodeId> frontier{u, v}, next;
  std::unordered_map<NodeId, bool> seen{{u, true}, {v, true}};
  for (std::uint32_t hop = 0; hop < h && !frontier.empty(); ++hop) {
    next.clear();
    for (NodeId x : frontier)
      for (NodeId y : graph.neighbors(x))
        if (seen.emplace(y, true).second) next.push_back(y);
    std::sort(next.begin(), next.end());
    ids.insert(ids.end(), next.begin(), next.end());
    frontier.swap(next);
  }
  return induce_subgraph(graph, std::move(ids));
}

/// Subgraph induced by k uniform random walks of l steps from each target,
/// on the graph with the target link removed. A walk that reaches a node with
/// no usable neighbor ends there. Deterministic in (seed, u, v).
inline Subgraph random_walk_subgraph(const Graph& graph, NodeId u, NodeId v, std::uint32_t k, std::uint32_t l,
                                     std::uint64_t seed) {
  detail::check_targets(graph, u, v);
  if (k < 1 || l < 1) throw Error("random walk count and length must be at least 1");
  const Edge target = Edge{u, v}.normalized();
  Rng rng(mix_seed(seed, target.first, target.second));

  std::vector<NodeId> visited;
  for (NodeId root : {u, v}) {
    for (std::uint32_t walk = 0; walk < k; ++walk) {
      NodeId at = root;
      for (std::uint32_t step = 0; step < l; ++step) {
        const auto nbrs = graph.neighbors(at);
        const NodeId other = at == u ? v : (at == v ? u : kUnreachable);
        const bool skip_target = other != kUnreachable && std::binary_search(nbrs.begin(), nbrs.end(), other);
        const std::size_t usable = nbrs.size() - (skip_target ? 1 : 0);
        if (usable == 0) break;
        std::size_t pick = static_cast<std::size_t>(rng.below(usable));
        if (skip_target) {
          const auto pos = static_cast<std::size_t>(std::lower_bound(nbrs.begin(), nbrs.end(), other) - nbrs.begin());
          if (pick >= pos) ++pick;
        }
        at = nbrs[pick];
        visited.push_back(at);
      }
    }
  }
  std::sort(visited.begin(), visited.end());
  visited.erase(std::unique(visited.begin(), visited.end()), visited.end());
  std::vector<NodeId> ids{u, v};
  for (NodeId x : visited)
    if (x != u && x != v) ids.push_back(x);
  return induce_subgraph(graph, std::move(ids));
}

/// G^i: a and b adjacent iff 1 <= d_G(a, b) <= i. Features are carried over.
inline Graph graph_power(const Graph& graph, std::uint32_t power) {
  if (power < 1) throw Error("graph power must be at least 1");
  if (power == 1) return graph;
  std::vector<Edge> edges;
  std::vector<std::uint32_t> dist(graph.num_nodes(), kUnreachable);
  std::vector<NodeId> touched, frontier, next;
  for (NodeId s = 0; s < graph.num_nodes(); ++s) {
    frontier.assign(1, s);
    touched.assign(1, s);
    dist[s] = 0;
    for (std::uint32_t depth = 0; depth < power && !frontier.empty(); ++depth) {
      next.clear();
      for (NodeId x : frontier)
        for (NodeId y : graph.neighbors(x))
          if (dist[y] == kUnreachable) {
            dist[y] = depth + 1;
            next.push_back(y);
            touched.push_back(y);
            if (s < y) edges.push_back({s, y});
          }
      frontier.swap(next);
    }
    for (NodeId t : touched) dist[t] = kUnreachable;
  }
  return Graph::from_edges(graph.num_nodes(), edges).with_features_of(graph);
}

/// Lazily computed graph powers, shared by concurrent workers.
class GraphPowerCache {
 public:
  explicit GraphPowerCache(const Graph& base) : base_(&base) {}

  const Graph& get(std::uint32_t power) {
    if (power <= 1) return *base_;
    std::lock_guard lock(mutex_);
    auto& slot = powers_[power];
    if (!slot) slot = std::make_unique<Graph>(graph_power(*base_, power));
    return *slot;
  }

  const Graph& base() const noexcept { return *base_; }

 private:
  const Graph* base_;
  std::mutex mutex_;
  std::map<std::uint32_t, std::unique_ptr<Graph>> powers_;
};

namespace detail {

/**
 * h-hop subgraph of (G - uv)^i around (u, v), built on the ball of radius
 * i*h + i around the targets. A path of length <= i between two nodes within
 * i*h of a target never leaves that ball, so the local power is exact.
 */
inline Subgraph sop_subgraph_local(const Graph& graph, NodeId u, NodeId v, std::uint32_t power, std::uint32_t h) {
  const std::uint32_t core = power * h;
  const std::uint32_t radius = core + power;
  auto is_target_link = [&](NodeId x, NodeId y) { return (x == u && y == v) || (x == v && y == u); };

  std::unordered_map<NodeId, std::uint32_t> dist{{u, 0}, {v, 0}};
  std::vector<NodeId> frontier{u, v}, next, kept{u, v};
  for (std::uint32_t depth = 0; depth < radius && !frontier.empty(); ++depth) {
    next.clear();
    for (NodeId x : frontier)
      for (NodeId y : graph.neighbors(x))
        if (dist.emplace(y, depth + 1).second) {
          next.push_back(y);
          if (depth + 1 <= core) kept.push_back(y);
        }
    frontier.swap(next);
  }
  std::sort(kept.begin(), kept.end());
  std::unordered_map<NodeId, NodeId> local_of;
  for (std::size_t i = 0; i < kept.size(); ++i) local_of.emplace(kept[i], static_cast<NodeId>(i));

  std::vector<Edge> edges;
  std::unordered_map<NodeId, std::uint32_t> reach;
  for (NodeId a : kept) {
    reach.clear();
    reach.emplace(a, 0);
    frontier.assign(1, a);
    for (std::uint32_t depth = 0; depth < power && !frontier.empty(); ++depth) {
      next.clear();
      for (NodeId x : frontier)
        for (NodeId y : graph.neighbors(x))
          if (!is_target_link(x, y) && dist.count(y) && reach.emplace(y, depth + 1).second) next.push_back(y);
      frontier.swap(next);
    }
    for (const auto& [b, d] : reach)
      if (a < b)
        if (auto it = local_of.find(b); it != local_of.end()) edges.push_back({local_of.at(a), it->second});
  }
  const Graph local = Graph::from_edges(kept.size(), edges);
  Subgraph sub = extract_h_hop(local, local_of.at(u), local_of.at(v), h);
  for (auto& id : sub.global_ids) id = kept[id];
  return sub;
}

}  // namespace detail

/**
 * h-hop subgraph of G^i around (u, v), where G^i is formed after removing the
 * target link from G. Removing (u, v) only from G^i would keep the edges it
 * induces (u to every neighbor of v at i = 2), which exist for training
 * positives but never for held-out ones. power 0 and 1 both use G itself;
 * the caller decides the diffusion (identity for power 0).
 */
inline Subgraph sop_subgraph(const Graph& graph, NodeId u, NodeId v, std::uint32_t power, std::uint32_t h) {
  detail::check_targets(graph, u, v);
  if (h < 1) throw Error("hop count must be at least 1");
  if (power <= 1) return extract_h_hop(graph, u, v, h);
  return detail::sop_subgraph_local(graph, u, v, power, h);
}

/// As above; pairs without an edge in G read the cached global power.
inline Subgraph sop_subgraph(GraphPowerCache& cache, NodeId u, NodeId v, std::uint32_t power, std::uint32_t h) {
  const Graph& base = cache.base();
  detail::check_targets(base, u, v);
  if (h < 1) throw Error("hop count must be at least 1");
  if (power <= 1) return extract_h_hop(base, u, v, h);
  if (base.has_edge(u, v)) return detail::sop_subgraph_local(base, u, v, power, h);
  return extract_h_hop(cache.get(power), u, v, h);
}

}  // namespace s3grl
