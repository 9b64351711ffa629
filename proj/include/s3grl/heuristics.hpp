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

#include <cassert>
#include <cmath>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "s3grl/common.hpp"
#include "s3grl/graph.hpp"

namespace s3grl {

enum class Heuristic { CN, AA, PPR };

inline std::string to_string(Heuristic h) {
  switch (h) {
    case Heuristic::CN: return "CN";
    case Heuristic::AA: return "AA";
    case Heuristic::PPR: return "PPR";
  }
  return "?";
}

inline Heuristic parse_heuristic(const std::string& s) {
  if (s == "CN") return Heuristic::CN;
  if (s == "AA") return Heuristic::AA;
  if (s == "PPR") return Heuristic::PPR;
  throw Error("unknown heuristic '" + s + "' (expected CN, AA or PPR)");
}

struct PprParams {
  double alpha = 0.15;  ///< teleport probability
  double tol = 1e-6;    ///< L1 change between iterations
  std::size_t max_iterations = 10000;
};

/**
 * Personalized PageRank vector of `source`: the fixed point of
 *   pi = alpha * e_source + (1 - alpha) * pi P,   P = D^-1 A,
 * by power iteration. Mass at a node without neighbors returns to the source,
 * so the vector always sums to one.
 */
inline std::vector<double> personalized_pagerank(const Graph& graph, NodeId source, const PprParams& params = {}) {
  check_node(graph, source);
  const std::size_t n = graph.num_nodes();
  std::vector<double> pi(n, 0.0), next(n);
  pi[source] = 1.0;
  for (std::size_t it = 0; it < params.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    double dangling = 0.0;
    for (NodeId a = 0; a < n; ++a) {
      if (pi[a] == 0.0) continue;
      const auto nbrs = graph.neighbors(a);
      if (nbrs.empty()) {
        dangling += pi[a];
        continue;
      }
      const double share = (1.0 - params.alpha) * pi[a] / static_cast<double>(nbrs.size());
      for (NodeId b : nbrs) next[b] += share;
    }
    next[source] += params.alpha + (1.0 - params.alpha) * dangling;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - pi[i]);
    pi.swap(next);
    if (change < params.tol) break;
  }
  return pi;
}

/// Bounded LRU memo of PPR vectors, safe for concurrent use.
class PprCache {
 public:
  PprCache(const Graph& graph, PprParams params = {}, std::size_t capacity = 4096)
      : graph_(&graph), params_(params), capacity_(capacity) {}

  std::shared_ptr<const std::vector<double>> get(NodeId source) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = index_.find(source); it != index_.end()) {
        order_.splice(order_.begin(), order_, it->second);
        return it->second->second;
      }
    }
    auto vec = std::make_shared<const std::vector<double>>(personalized_pagerank(*graph_, source, params_));
    std::lock_guard lock(mutex_);
    if (index_.count(source)) return index_[source]->second;
    order_.emplace_front(source, vec);
    index_[source] = order_.begin();
    if (order_.size() > capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
    }
    return vec;
  }

  const Graph& graph() const noexcept { return *graph_; }

 private:
  using Entry = std::pair<NodeId, std::shared_ptr<const std::vector<double>>>;
  const Graph* graph_;
  PprParams params_;
  std::size_t capacity_;
  std::mutex mutex_;
  std::list<Entry> order_;
  std::unordered_map<NodeId, std::list<Entry>::iterator> index_;
};

inline double adamic_adar(const Graph& graph, NodeId u, NodeId v) {
  double score = 0.0;
  for (NodeId w : common_neighbors(graph, u, v)) {
    assert(graph.degree(w) >= 2);
    score += 1.0 / std::log(static_cast<double>(graph.degree(w)));
  }
  return score;
}

/// PPR score pi_u(v) + pi_v(u).
inline double ppr_score(PprCache& cache, NodeId u, NodeId v) {
  return (*cache.get(u))[v] + (*cache.get(v))[u];
}

inline double heuristic_score(const Graph& graph, NodeId u, NodeId v, Heuristic method, const PprParams& ppr = {}) {
  switch (method) {
    case Heuristic::CN: return static_cast<double>(common_neighbors(graph, u, v).size());
    case Heuristic::AA: return adamic_adar(graph, u, v);
    case Heuristic::PPR: {
      check_node(graph, u);
      check_node(graph, v);
      return personalized_pagerank(graph, u, ppr)[v] + personalized_pagerank(graph, v, ppr)[u];
    }
  }
  return 0.0;
}

/// Scores many pairs, reusing PPR vectors across pairs.
inline std::vector<double> heuristic_scores(const Graph& graph, std::span<const Edge> pairs, Heuristic method,
                                            const PprParams& ppr = {}) {
  std::vector<double> out;
  out.reserve(pairs.size());
  if (method != Heuristic::PPR) {
    for (const auto& e : pairs) out.push_back(heuristic_score(graph, e.first, e.second, method));
    return out;
  }
  PprCache cache(graph, ppr);
  for (const auto& e : pairs) {
    check_node(graph, e.first);
    check_node(graph, e.second);
    out.push_back(ppr_score(cache, e.first, e.second));
  }
  return out;
}

}  // namespace s3grl
