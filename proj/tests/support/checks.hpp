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
#include <limits>
#include <vector>

#include "oracles.hpp"

namespace checks {

/// Largest |got - want| / max(1, |want|) over a record's blocks, or infinity
/// when the shapes disagree.
inline double record_error(const s3grl::LinkRecord& rec, const std::vector<oracle::Dense>& expected) {
  constexpr double kMismatch = std::numeric_limits<double>::infinity();
  if (expected.size() != rec.num_operators) return kMismatch;
  double worst = 0.0;
  for (std::size_t op = 0; op < expected.size(); ++op) {
    if (expected[op].size() != rec.pooled_count()) return kMismatch;
    for (std::size_t p = 0; p < rec.pooled_count(); ++p) {
      const auto row = rec.row(op, p);
      if (expected[op][p].size() != row.size()) return kMismatch;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const double want = expected[op][p][c];
        worst = std::max(worst, std::abs(row[c] - want) / std::max(1.0, std::abs(want)));
      }
    }
  }
  return worst;
}

/// Initialized parameters with nonzero biases, so pre-activations of
/// all-zero pooled rows sit off the ReLU kink where differences are one-sided.
inline s3grl::ModelParams<double> fd_params(std::size_t in_dim, std::size_t hidden, s3grl::Pooling pooling,
                                            s3grl::Aggregation agg, s3grl::Rng& rng) {
  auto p = s3grl::ModelParams<double>::init(in_dim, hidden, pooling, agg, rng());
  for (Eigen::Index i = 0; i < p.hidden_b.size(); ++i) p.hidden_b(i) = 2.0 * rng.uniform() - 1.0;
  p.out_b(0) = 2.0 * rng.uniform() - 1.0;
  return p;
}

inline double loss_at(const std::vector<const s3grl::LinkRecord*>& batch, const s3grl::ModelParams<double>& p,
                      double dropout, std::uint64_t seed) {
  s3grl::Rng rng(seed);
  return s3grl::loss_and_gradients<double>(batch, p, dropout, rng).loss;
}

/// Largest per-tensor relative error ||analytic - numeric|| / (||analytic|| + ||numeric||)
/// against central differences. Re-seeding replays the same dropout masks.
inline double gradient_error(const std::vector<const s3grl::LinkRecord*>& batch, s3grl::ModelParams<double> p,
                             double dropout, std::uint64_t seed) {
  s3grl::Rng rng(seed);
  const auto analytic = s3grl::loss_and_gradients<double>(batch, p, dropout, rng).grads;
  const auto a_tensors = analytic.tensors();
  auto p_tensors = p.tensors();
  double worst = 0.0;
  constexpr double h = 1e-6;
  for (std::size_t t = 0; t < p_tensors.size(); ++t) {
    double diff = 0.0, norm_a = 0.0, norm_n = 0.0;
    for (std::size_t i = 0; i < p_tensors[t].size(); ++i) {
      const double saved = p_tensors[t][i];
      p_tensors[t][i] = saved + h;
      const double up = loss_at(batch, p, dropout, seed);
      p_tensors[t][i] = saved - h;
      const double down = loss_at(batch, p, dropout, seed);
      p_tensors[t][i] = saved;
      const double numeric = (up - down) / (2 * h);
      diff += (a_tensors[t][i] - numeric) * (a_tensors[t][i] - numeric);
      norm_a += a_tensors[t][i] * a_tensors[t][i];
      norm_n += numeric * numeric;
    }
    const double denom = std::sqrt(norm_a) + std::sqrt(norm_n);
    if (denom > 1e-12) worst = std::max(worst, std::sqrt(diff) / denom);
  }
  return worst;
}

}  // namespace checks
