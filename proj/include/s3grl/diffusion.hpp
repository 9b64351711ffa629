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
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "s3grl/common.hpp"
#include "s3grl/graph.hpp"
#include "s3grl/labeling.hpp"
#include "s3grl/sampling.hpp"
#include "s3grl/sparse.hpp"

namespace s3grl {

enum class Variant { PoS, PoSPlus, SoP, PoSScaLed, PoSPlusScaLed };
enum class Pooling { Center, CCN };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::PoS: return "PoS";
    case Variant::PoSPlus: return "PoSPlus";
    case Variant::SoP: return "SoP";
    case Variant::PoSScaLed: return "PoSScaLed";
    case Variant::PoSPlusScaLed: return "PoSPlusScaLed";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  for (auto v : {Variant::PoS, Variant::PoSPlus, Variant::SoP, Variant::PoSScaLed, Variant::PoSPlusScaLed})
    if (to_string(v) == s) return v;
  throw Error("unknown variant '" + s + "' (expected PoS, PoSPlus, SoP, PoSScaLed or PoSPlusScaLed)");
}

inline std::string to_string(Pooling p) { return p == Pooling::Center ? "center" : "ccn"; }

inline Pooling parse_pooling(const std::string& s) {
  if (s == "center") return Pooling::Center;
  if (s == "ccn") return Pooling::CCN;
  throw Error("unknown pooling '" + s + "' (expected center or ccn)");
}

constexpr bool uses_random_walks(Variant v) noexcept {
  return v == Variant::PoSScaLed || v == Variant::PoSPlusScaLed;
}

constexpr Pooling default_pooling(Variant v) noexcept {
  return v == Variant::PoSPlus || v == Variant::PoSPlusScaLed ? Pooling::CCN : Pooling::Center;
}

/// The sampling-operator set of one experiment plus the record layout knobs.
struct SamplingOperatorSet {
  Variant variant = Variant::PoS;
  std::uint32_t r = 3;
  std::uint32_t h = 2;
  std::uint32_t k = 20;  // walks per target (ScaLed only)
  std::uint32_t l = 3;   // walk length (ScaLed only)
  LabelScheme labeling = LabelScheme::ZeroOne;
  Pooling pooling = Pooling::Center;
  std::size_t label_cap = 100;
  std::size_t ccn_cap = 128;
  bool normalize_adjacency = false;
  std::uint64_t walk_seed = 0;

  void validate() const {
    if (r < 1) throw Error("sampling.r must be at least 1");
    if (h < 1) throw Error("sampling.h must be at least 1");
    if (uses_random_walks(variant) && (k < 1 || l < 1)) throw Error("sampling.k and sampling.l must be at least 1");
    if (label_cap < 2) throw Error("sampling.label_cap must be at least 2");
    if (variant != Variant::SoP && pooling != default_pooling(variant))
      throw Error("variant " + to_string(variant) + " requires " + to_string(default_pooling(variant)) + " pooling");
  }

  std::size_t label_width() const noexcept { return fixed_label_width(labeling, label_cap); }

  std::size_t block_width(const Graph& graph) const noexcept {
    return label_width() + (graph.has_features() ? graph.feature_dim() : 1);
  }
};

inline void to_json(nlohmann::json& j, const SamplingOperatorSet& c) {
  j = {{"variant", to_string(c.variant)},
       {"r", c.r},
       {"h", c.h},
       {"k", c.k},
       {"l", c.l},
       {"labeling", to_string(c.labeling)},
       {"pooling", to_string(c.pooling)},
       {"label_cap", c.label_cap},
       {"ccn_cap", c.ccn_cap},
       {"ccn_truncation", "highest degree first, ties by ascending id"},
       {"normalize_adjacency", c.normalize_adjacency},
       {"walk_seed", c.walk_seed}};
}

// ---------------------------------------------------------------------------
// LinkRecord
// ---------------------------------------------------------------------------

/// Fixed part of an on-disk record: u, v, label, p, r+1, w.
inline constexpr std::size_t kRecordHeaderBytes = 4 + 4 + 1 + 2 + 2 + 4;

constexpr std::size_t record_byte_size(std::size_t pooled, std::size_t operators, std::size_t width) noexcept {
  return kRecordHeaderBytes + 4 * pooled + 4 * operators * pooled * width;
}

/**
 * Precomputed pooled rows for one candidate link.
 *
 * values holds num_operators blocks, each pooled_count x block_width,
 * row-major. Block 0 is the identity operator.
 */
struct LinkRecord {
  NodeId u = 0;
  NodeId v = 0;
  std::uint8_t label = 0;
  std::vector<NodeId> pooled_ids;
  std::uint16_t num_operators = 0;
  std::uint32_t block_width = 0;
  std::vector<float> values;

  std::size_t pooled_count() const noexcept { return pooled_ids.size(); }

  Eigen::Map<const RowMatrixF> block(std::size_t op) const {
    const auto rows = static_cast<Eigen::Index>(pooled_count());
    return {values.data() + op * pooled_count() * block_width, rows, static_cast<Eigen::Index>(block_width)};
  }

  std::span<const float> row(std::size_t op, std::size_t pooled) const {
    return {values.data() + (op * pooled_count() + pooled) * block_width, block_width};
  }
  std::span<float> row(std::size_t op, std::size_t pooled) {
    return {values.data() + (op * pooled_count() + pooled) * block_width, block_width};
  }

  std::size_t byte_size() const noexcept { return record_byte_size(pooled_count(), num_operators, block_width); }

  friend bool operator==(const LinkRecord&, const LinkRecord&) = default;
};

// ---------------------------------------------------------------------------
// Diffusion
// ---------------------------------------------------------------------------

namespace detail {

/// Operator used for the powers: raw 0/1 adjacency or its normalized form.
class SubgraphOperator {
 public:
  SubgraphOperator(const Graph& local, bool normalize) : local_(&local) {
    if (normalize) normalized_ = normalized_adjacency<double>(local);
    normalize_ = normalize;
  }

  /// out = x^T M
  void apply(const std::vector<double>& x, std::vector<double>& out) const {
    out.assign(x.size(), 0.0);
    if (normalize_) {
      normalized_.left_multiply(x, out);
      return;
    }
    for (NodeId a = 0; a < x.size(); ++a) {
      const double xa = x[a];
      if (xa == 0.0) continue;
      for (NodeId b : local_->neighbors(a)) out[b] += xa;
    }
  }

 private:
  const Graph* local_;
  bool normalize_ = false;
  CsrMatrix<double> normalized_;
};

/// Indicator vector of `start` pushed through powers 0..max_power of the
/// operator; result[i] = e_start^T M^i.
inline std::vector<std::vector<double>> indicator_powers(const SubgraphOperator& op, std::size_t n, std::size_t start,
                                                         std::uint32_t max_power) {
  std::vector<std::vector<double>> out(max_power + 1);
  out[0].assign(n, 0.0);
  out[0][start] = 1.0;
  for (std::uint32_t i = 1; i <= max_power; ++i) op.apply(out[i - 1], out[i]);
  return out;
}

}  // namespace detail

/// Rows of (A_uv^power X_uv) at the pooled local positions, computed by
/// repeated sparse row-vector products from each pooled node's indicator.
inline RowMatrixF pooled_rows_of_power(const Subgraph& sub, const LabeledFeatures& features, std::uint32_t power,
                                       std::span<const std::size_t> pooled_local_ids, bool normalize = false) {
  if (static_cast<std::size_t>(features.matrix.rows()) != sub.size())
    throw Error("labeled features do not match subgraph size");
  const detail::SubgraphOperator op(sub.local, normalize);
  RowMatrixF out = RowMatrixF::Zero(static_cast<Eigen::Index>(pooled_local_ids.size()), features.matrix.cols());
  for (std::size_t p = 0; p < pooled_local_ids.size(); ++p) {
    if (pooled_local_ids[p] >= sub.size()) throw Error("pooled local id out of range");
    const auto walk = detail::indicator_powers(op, sub.size(), pooled_local_ids[p], power);
    const auto& x = walk[power];
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(features.matrix.cols());
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k] != 0.0) acc += x[k] * features.matrix.row(static_cast<Eigen::Index>(k)).cast<double>();
    out.row(static_cast<Eigen::Index>(p)) = acc.cast<float>();
  }
  return out;
}

/// Pooled node set: the targets, then (CCN) common neighbors in the graph,
/// highest degree first, truncated at ccn_cap.
inline std::vector<NodeId> pooled_nodes(const Graph& graph, NodeId u, NodeId v, const SamplingOperatorSet& config) {
  std::vector<NodeId> pooled{u, v};
  if (config.pooling != Pooling::CCN) return pooled;
  auto cn = common_neighbors(graph, u, v);
  std::stable_sort(cn.begin(), cn.end(), [&](NodeId a, NodeId b) { return graph.degree(a) > graph.degree(b); });
  if (cn.size() > config.ccn_cap) cn.resize(config.ccn_cap);
  pooled.insert(pooled.end(), cn.begin(), cn.end());
  return pooled;
}

namespace detail {

/// Adds the diffused rows for operators [first_op, first_op + powers.size())
/// of one subgraph into the record. powers[j] is the diffusion power applied
/// for operator first_op + j.
inline void fill_blocks(LinkRecord& record, const Graph& graph, const Subgraph& sub,
                        const SamplingOperatorSet& config, std::uint32_t first_op,
                        std::span<const std::uint32_t> powers) {
  const auto labels = config.labeling == LabelScheme::ZeroOne ? zero_one_labels(sub) : drnl_labels(sub);
  const std::size_t label_width = config.label_width();
  const std::size_t feat_dim = graph.has_features() ? graph.feature_dim() : 1;
  const SubgraphOperator op(sub.local, config.normalize_adjacency);
  const std::uint32_t max_power = *std::max_element(powers.begin(), powers.end());
  std::vector<double> acc(record.block_width);

  for (std::size_t p = 0; p < record.pooled_count(); ++p) {
    const std::size_t local = sub.find(record.pooled_ids[p]);
    if (local == sub.size()) continue;  // absent from this subgraph: zero row
    const auto walk = indicator_powers(op, sub.size(), local, max_power);
    for (std::size_t j = 0; j < powers.size(); ++j) {
      const auto& x = walk[powers[j]];
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double weight = x[k];
        if (weight == 0.0) continue;
        acc[std::min<std::size_t>(labels[k], std::min(config.label_cap, label_width - 1))] += weight;
        if (graph.has_features()) {
          const auto feat = graph.feature_row(sub.global_ids[k]);
          for (std::size_t f = 0; f < feat_dim; ++f) acc[label_width + f] += weight * feat[f];
        } else {
          acc[label_width] += weight;
        }
      }
      auto out = record.row(first_op + j, p);
      std::transform(acc.begin(), acc.end(), out.begin(), [](double a) { return static_cast<float>(a); });
    }
  }
}

}  // namespace detail

/**
 * Builds the LinkRecord of one link.
 *
 * PoS variants diffuse one subgraph (h-hop or random-walk induced) with
 * adjacency powers 0..r. SoP uses the h-hop subgraph of G for the identity
 * block and, for operator i >= 1, the h-hop subgraph of G^i with a single
 * adjacency application. Pooled nodes missing from an operator's subgraph
 * keep zero rows.
 */
inline LinkRecord build_link_record(const Graph& graph, const LabeledLink& link, const SamplingOperatorSet& config,
                                    GraphPowerCache* powers = nullptr) {
  config.validate();
  detail::check_targets(graph, link.u, link.v);
  LinkRecord record;
  record.u = link.u;
  record.v = link.v;
  record.label = link.label;
  record.pooled_ids = pooled_nodes(graph, link.u, link.v, config);
  record.num_operators = static_cast<std::uint16_t>(config.r + 1);
  record.block_width = static_cast<std::uint32_t>(config.block_width(graph));
  record.values.assign(record.num_operators * record.pooled_count() * record.block_width, 0.0F);

  if (config.variant == Variant::SoP) {
    const std::uint32_t identity[] = {0};
    detail::fill_blocks(record, graph, extract_h_hop(graph, link.u, link.v, config.h), config, 0, identity);
    const std::uint32_t adjacency[] = {1};
    for (std::uint32_t i = 1; i <= config.r; ++i) {
      const Subgraph sub = powers ? sop_subgraph(*powers, link.u, link.v, i, config.h)
                                  : sop_subgraph(graph, link.u, link.v, i, config.h);
      detail::fill_blocks(record, graph, sub, config, i, adjacency);
    }
    return record;
  }

  const Subgraph sub = uses_random_walks(config.variant)
                           ? random_walk_subgraph(graph, link.u, link.v, config.k, config.l, config.walk_seed)
                           : extract_h_hop(graph, link.u, link.v, config.h);
  std::vector<std::uint32_t> all_powers(config.r + 1);
  for (std::uint32_t i = 0; i <= config.r; ++i) all_powers[i] = i;
  detail::fill_blocks(record, graph, sub, config, 0, all_powers);
  return record;
}

}  // namespace s3grl
