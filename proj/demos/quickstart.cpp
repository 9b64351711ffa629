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


// Trains a PoS head on a planted-partition graph and compares it with the
// common-neighbor baseline.

#include <iostream>

#include "s3grl/s3grl.hpp"

int main() {
  using namespace s3grl;

  // Four communities of 50 nodes, dense inside and sparse across.
  Rng rng(42);
  std::vector<Edge> edges;
  for (NodeId a = 0; a < 200; ++a)
    for (NodeId b = a + 1; b < 200; ++b)
      if (rng.uniform() < (a / 50 == b / 50 ? 0.12 : 0.004)) edges.emplace_back(a, b);
  const Graph graph = Graph::from_edges(200, edges);
  std::cout << "graph: " << graph.num_nodes() << " nodes, " << graph.num_edges() << " edges\n";

  const EdgeSplit split = split_edges(graph, {}, /*seed=*/0);

  SamplingOperatorSet sampling;
  sampling.variant = Variant::PoS;
  sampling.r = 3;
  sampling.h = 2;
  const auto train_links = labeled_links(split.train_pos, split.train_neg);
  const auto valid_links = labeled_links(split.valid_pos, split.valid_neg);
  const auto test_links = labeled_links(split.test_pos, split.test_neg);
  GraphPowerCache cache(split.observed_graph);
  const auto train_set = build_records(split.observed_graph, train_links, sampling, 1, &cache);
  const auto valid_set = build_records(split.observed_graph, valid_links, sampling, 1, &cache);
  const auto test_set = build_records(split.observed_graph, test_links, sampling, 1, &cache);
  std::cout << "records: " << train_set.size() << " train, " << train_set.front().byte_size() << " bytes each\n";

  TrainConfig config;
  config.hidden = 64;
  config.epochs = 20;
  config.adam.lr = 1e-2;
  const TrainResult result = train(train_set, valid_set, config);
  std::cout << "best epoch " << result.best_epoch << ", valid AUC " << result.best_valid_auc << "\n";

  const auto scores = predict<float>(test_set, result.params);
  std::cout << "test AUC (PoS head): " << auc(split_by_label(test_set, scores)) << "\n";

  const auto cn = heuristic_scored(split.observed_graph, split.test_pos, split.test_neg, Heuristic::CN, {});
  std::cout << "test AUC (CN):       " << auc(cn) << "\n";

  const auto storage = storage_comparison(split.observed_graph, train_links, sampling);
  std::cout << "storage: " << storage.record_bytes << " B of records vs " << storage.seal_bytes
            << " B of explicit subgraphs\n";
}
