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
#include <optional>
#include <string>
#include <vector>

#include "s3grl/common.hpp"
#include "s3grl/graph.hpp"
#include "s3grl/sampling.hpp"

namespace s3grl {

enum class LabelScheme { ZeroOne, DRNL };

inline std::string to_string(LabelScheme s) { return s == LabelScheme::ZeroOne ? "zero_one" : "drnl"; }

inline LabelScheme parse_label_scheme(const std::string& s) {
  if (s == "zero_one" || s == "zo") return LabelScheme::ZeroOne;
  if (s == "drnl" || s == "DRNL") return LabelScheme::DRNL;
  throw Error("unknown labeling scheme '" + s + "'");
}

/// Subgraph rows of [one-hot label | raw features], in global_ids order.
struct LabeledFeatures {
  RowMatrixF matrix;
  LabelScheme scheme = LabelScheme::ZeroOne;
  std::size_t label_dim = 0;
};

inline std::vector<std::uint32_t> zero_one_labels(const Subgraph& sub) {
  std::vector<std::uint32_t> labels(sub.size(), 0);
  for (std::size_t i = 0; i < std::min<std::size_t>(2, sub.size()); ++i) labels[i] = 1;
  return labels;
}

/// Double-radius label of a node at distances (du, dv) from the targets.
constexpr std::uint32_t drnl_label(std::uint32_t du, std::uint32_t dv) noexcept {
  if (du == kUnreachable || dv == kUnreachable) return 0;
  const std::uint32_t s = du + dv;
  const std::uint32_t half = s / 2;
  return 1 + std::min(du, dv) + half * (half + s % 2 - 1);
}

inline std::vector<std::uint32_t> drnl_labels(const Subgraph& sub) {
  std::vector<std::uint32_t> labels(sub.size(), 0);
  for (std::size_t i = 0; i < sub.size(); ++i)
    labels[i] = i < 2 ? 1 : drnl_label(sub.hop_distances[i].to_u, sub.hop_distances[i].to_v);
  return labels;
}

/// Raw feature rows for the subgraph nodes. Graphs without features get the
/// implicit all-ones column.
inline RowMatrixF gather_features(const Graph& graph, const Subgraph& sub) {
  if (!graph.has_features()) return RowMatrixF::Ones(static_cast<Eigen::Index>(sub.size()), 1);
  RowMatrixF out(static_cast<Eigen::Index>(sub.size()), static_cast<Eigen::Index>(graph.feature_dim()));
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const auto row = graph.feature_row(sub.global_ids[i]);
    std::copy(row.begin(), row.end(), out.row(static_cast<Eigen::Index>(i)).data());
  }
  return out;
}

/// Width of the label block a record uses for a scheme.
constexpr std::size_t fixed_label_width(LabelScheme scheme, std::size_t label_cap) noexcept {
  return scheme == LabelScheme::ZeroOne ? 2 : label_cap + 1;
}

/**
 * One-hot encodes the scheme's labels (values above label_cap clamp to it) and
 * prepends them to the raw feature rows.
 *
 * Without `fixed_width` the label block has min(max label, label_cap) + 1
 * columns (always 2 for zero-one). Passing a width pads the block so records
 * across a dataset share one layout.
 */
inline LabeledFeatures augment_features(const Subgraph& sub, const RowMatrixF& raw, LabelScheme scheme,
                                        std::size_t label_cap = 100,
                                        std::optional<std::size_t> fixed_width = std::nullopt) {
  if (label_cap < 2) throw Error("label_cap must be at least 2");
  if (static_cast<std::size_t>(raw.rows()) != sub.size()) throw Error("feature rows do not match subgraph size");
  const auto labels = scheme == LabelScheme::ZeroOne ? zero_one_labels(sub) : drnl_labels(sub);
  std::size_t label_dim = 2;
  if (scheme == LabelScheme::DRNL) {
    const std::uint32_t top = labels.empty() ? 1 : *std::max_element(labels.begin(), labels.end());
    label_dim = std::min<std::size_t>(top, label_cap) + 1;
  }
  if (fixed_width) {
    if (*fixed_width < label_dim) throw Error("fixed label width smaller than observed labels");
    label_dim = *fixed_width;
  }
  LabeledFeatures out;
  out.scheme = scheme;
  out.label_dim = label_dim;
  out.matrix = RowMatrixF::Zero(raw.rows(), static_cast<Eigen::Index>(label_dim) + raw.cols());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const auto label = std::min<std::size_t>(labels[i], std::min(label_cap, label_dim - 1));
    out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(label)) = 1.0F;
  }
  out.matrix.rightCols(raw.cols()) = raw;
  return out;
}

}  // namespace s3grl
