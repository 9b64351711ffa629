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
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "s3grl/common.hpp"

namespace s3grl {

struct ScoredPairs {
  std::vector<double> pos_scores;
  std::vector<double> neg_scores;
};

/// Mann-Whitney AUC: P(pos > neg) + P(pos == neg) / 2, via one sort.
inline double auc(const ScoredPairs& scored) {
  const auto& pos = scored.pos_scores;
  const auto& neg = scored.neg_scores;
  if (pos.empty() || neg.empty()) throw Error("auc needs at least one positive and one negative score");
  std::vector<std::pair<double, bool>> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.emplace_back(s, true);
  for (double s : neg) all.emplace_back(s, false);
  for (const auto& [s, is_pos] : all)
    if (!std::isfinite(s)) throw Error("auc got a non-finite score");
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  // Sum of positive ranks with tied groups sharing their mean rank.
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < all.size() && all[j].first == all[i].first) pos_in_group += all[j++].second ? 1 : 0;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    pos_rank_sum += mean_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const auto np = static_cast<double>(pos.size());
  const auto nn = static_cast<double>(neg.size());
  return (pos_rank_sum - np * (np + 1) / 2.0) / (np * nn);
}

/// Fraction of positives scoring strictly above the k-th highest negative.
inline double hits_at_k(const ScoredPairs& scored, std::size_t k) {
  if (k == 0) throw Error("hits_at_k needs k >= 1");
  if (scored.neg_scores.size() < k) throw Error("hits_at_k needs at least k negatives");
  if (scored.pos_scores.empty()) throw Error("hits_at_k needs at least one positive");
  std::vector<double> neg = scored.neg_scores;
  std::nth_element(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(k - 1), neg.end(), std::greater<>());
  const double threshold = neg[k - 1];
  const auto hits = std::count_if(scored.pos_scores.begin(), scored.pos_scores.end(),
                                  [&](double s) { return s > threshold; });
  return static_cast<double>(hits) / static_cast<double>(scored.pos_scores.size());
}

struct RankingQuery {
  double pos_score = 0;
  std::vector<double> neg_scores;
};

/// Mean reciprocal rank with rank = 1 + #{negatives >= positive}.
inline double mrr(std::span<const RankingQuery> queries) {
  if (queries.empty()) throw Error("mrr needs at least one query");
  double total = 0.0;
  for (const auto& q : queries) {
    if (q.neg_scores.empty()) throw Error("mrr query without negatives");
    const auto worse_or_tied =
        std::count_if(q.neg_scores.begin(), q.neg_scores.end(), [&](double s) { return s >= q.pos_score; });
    total += 1.0 / static_cast<double>(1 + worse_or_tied);
  }
  return total / static_cast<double>(queries.size());
}

/// MRR where every positive is ranked against one shared negative list.
inline double mrr_shared_negatives(const ScoredPairs& scored) {
  if (scored.pos_scores.empty() || scored.neg_scores.empty()) throw Error("mrr needs positives and negatives");
  std::vector<double> neg = scored.neg_scores;
  std::sort(neg.begin(), neg.end());
  double total = 0.0;
  for (double s : scored.pos_scores) {
    const auto at_least = static_cast<double>(neg.end() - std::lower_bound(neg.begin(), neg.end(), s));
    total += 1.0 / (1.0 + at_least);
  }
  return total / static_cast<double>(scored.pos_scores.size());
}

}  // namespace s3grl
