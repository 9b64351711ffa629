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


#include <gtest/gtest.h>

#include <cmath>

#include "checks.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace s3grl {
namespace {

struct HeadCase {
  Pooling pooling;
  Aggregation agg;
  std::size_t pooled;
  double dropout;
};

std::vector<LinkRecord> random_batch(const HeadCase& c, std::size_t ops, std::size_t width, std::size_t n,
                                     Rng& rng) {
  std::vector<LinkRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pooled = c.pooling == Pooling::CCN ? 2 + rng.below(c.pooled + 1) : 2;
    out.push_back(oracle::random_record(pooled, ops, width, rng, static_cast<std::uint8_t>(rng.below(2))));
  }
  return out;
}

TEST(Forward, ZeroReductionLeavesBiasesOnly) {
  Rng rng(71);
  auto p = ModelParams<double>::init(12, 8, Pooling::Center, Aggregation::Mean, 3);
  p.reduce.setZero();
  p.hidden_b.setRandom();
  p.out_b(0) = 0.3;
  const auto rec = oracle::random_record(2, 3, 4, rng, 1);
  const auto [prob, cache] = forward<double>(rec, p, Mode::Eval, rng);
  EXPECT_TRUE(cache.reduced.isZero());
  const double logit = p.hidden_b.cwiseMax(0.0).dot(p.out_w) + p.out_b(0);
  EXPECT_NEAR(prob, 1.0 / (1.0 + std::exp(-logit)), 1e-15);
}

TEST(Forward, CenterPoolingIgnoresTargetOrder) {
  Rng rng(72);
  const auto p = ModelParams<double>::init(12, 16, Pooling::Center, Aggregation::Mean, 4);
  auto rec = oracle::random_record(2, 3, 4, rng, 1);
  auto swapped = rec;
  for (std::size_t op = 0; op < 3; ++op) {
    auto a = swapped.row(op, 0), b = swapped.row(op, 1);
    std::swap_ranges(a.begin(), a.end(), b.begin());
  }
  const double x = forward<double>(rec, p, Mode::Eval, rng).first;
  const double y = forward<double>(swapped, p, Mode::Eval, rng).first;
  EXPECT_EQ(x, y);
}

TEST(Forward, MatchesScalarOracle) {
  Rng rng(73);
  for (auto pooling : {Pooling::Center, Pooling::CCN})
    for (auto agg : {Aggregation::Mean, Aggregation::Sum, Aggregation::Max})
      for (int trial = 0; trial < 10; ++trial) {
        auto p = ModelParams<double>::init(15, 7, pooling, agg, static_cast<std::uint64_t>(trial));
        if (trial % 2 == 1)
          for (Eigen::Index i = 0; i < p.input_scale.size(); ++i) p.input_scale(i) = 0.1 + 2.0 * rng.uniform();
        const std::size_t pooled = pooling == Pooling::CCN ? 2 + rng.below(5) : 2;
        const auto rec = oracle::random_record(pooled, 3, 5, rng, 0);
        EXPECT_NEAR(forward<double>(rec, p, Mode::Eval, rng).first, oracle::forward_probability(rec, p), 1e-6);
        // Batched evaluation gives the same numbers as one at a time.
        const std::vector<LinkRecord> two{rec, rec};
        const auto scores = predict<double>(two, p);
        EXPECT_NEAR(scores[1], oracle::forward_probability(rec, p), 1e-6);
      }
}

TEST(Forward, EmptyCommonNeighborSetAggregatesToZero) {
  Rng rng(74);
  const auto p = ModelParams<double>::init(6, 4, Pooling::CCN, Aggregation::Max, 1);
  const auto rec = oracle::random_record(2, 2, 3, rng, 1);
  const auto [prob, cache] = forward<double>(rec, p, Mode::Eval, rng);
  EXPECT_TRUE(cache.pooled.rightCols(4).isZero());
  EXPECT_NEAR(prob, oracle::forward_probability(rec, p), 1e-12);
}

TEST(Forward, ShapeMismatchThrows) {
  Rng rng(75);
  const auto p = ModelParams<double>::init(12, 4, Pooling::Center, Aggregation::Mean, 1);
  const auto rec = oracle::random_record(2, 3, 5, rng, 1);
  EXPECT_THROW(forward<double>(rec, p, Mode::Eval, rng), Error);
}

TEST(Forward, DropoutZeroTrainEqualsEval) {
  Rng rng(76);
  const auto p = ModelParams<float>::init(12, 32, Pooling::CCN, Aggregation::Mean, 1);
  const auto rec = oracle::random_record(5, 3, 4, rng, 1);
  EXPECT_EQ(forward<float>(rec, p, Mode::Train, rng, 0.0).first, forward<float>(rec, p, Mode::Eval, rng, 0.5).first);
}

TEST(Loss, HalfProbabilityGivesLogTwo) {
  Rng rng(77);
  auto p = ModelParams<double>::init(8, 4, Pooling::Center, Aggregation::Mean, 1);
  p.out_w.setZero();
  p.out_b.setZero();
  const auto batch = random_batch({Pooling::Center, Aggregation::Mean, 0, 0.0}, 2, 4, 9, rng);
  EXPECT_NEAR(checks::loss_at(pointers_to(batch), p, 0.0, 1), std::log(2.0), 1e-15);
}

TEST(Loss, StableForHugeLogits) {
  EXPECT_NEAR(detail::bce_with_logits(1000.0, 1.0), 0.0, 1e-12);
  EXPECT_NEAR(detail::bce_with_logits(1000.0, 0.0), 1000.0, 1e-9);
  EXPECT_NEAR(detail::bce_with_logits(-1000.0, 1.0), 1000.0, 1e-9);
  EXPECT_TRUE(std::isfinite(detail::bce_with_logits(-1e30, 0.0)));
}

TEST(Loss, DuplicatedBatchLeavesLossAndGradients) {
  Rng rng(78);
  const auto p = ModelParams<double>::init(8, 6, Pooling::CCN, Aggregation::Sum, 2);
  const auto batch = random_batch({Pooling::CCN, Aggregation::Sum, 3, 0.0}, 2, 4, 5, rng);
  auto doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  Rng r1(0), r2(0);
  const auto a = loss_and_gradients<double>(pointers_to(batch), p, 0.0, r1);
  const auto b = loss_and_gradients<double>(pointers_to(doubled), p, 0.0, r2);
  EXPECT_NEAR(a.loss, b.loss, 1e-14);
  const auto ta = a.grads.tensors(), tb = b.grads.tensors();
  for (std::size_t t = 0; t < ta.size(); ++t)
    for (std::size_t i = 0; i < ta[t].size(); ++i) EXPECT_NEAR(ta[t][i], tb[t][i], 1e-14);
}

TEST(Gradients, MatchCentralFiniteDifferences) {
  Rng rng(79);
  const HeadCase cases[] = {
      {Pooling::Center, Aggregation::Mean, 0, 0.0}, {Pooling::Center, Aggregation::Mean, 0, 0.5},
      {Pooling::CCN, Aggregation::Mean, 4, 0.0},    {Pooling::CCN, Aggregation::Sum, 4, 0.0},
      {Pooling::CCN, Aggregation::Max, 4, 0.0},     {Pooling::CCN, Aggregation::Mean, 3, 0.3},
      {Pooling::CCN, Aggregation::Max, 3, 0.5},     {Pooling::CCN, Aggregation::Sum, 0, 0.2},
  };
  int configs = 0;
  for (const auto& c : cases)
    for (int trial = 0; trial < 3; ++trial) {
      const std::size_t ops = 1 + rng.below(3), width = 2 + rng.below(3), hidden = 3 + rng.below(5);
      const auto p = checks::fd_params(ops * width, hidden, c.pooling, c.agg, rng);
      const auto batch = random_batch(c, ops, width, 1 + rng.below(6), rng);
      const double err = checks::gradient_error(pointers_to(batch), p, c.dropout, rng());
      EXPECT_LT(err, 1e-4) << to_string(c.pooling) << "/" << to_string(c.agg) << " dropout " << c.dropout;
      ++configs;
    }
  EXPECT_GE(configs, 20);
}

TEST(Adam, MatchesHandTraceOnOneParameter) {
  // Minimize x^2 from x = 1 with lr 0.1; reference values from the update
  // rule evaluated by hand.
  auto p = ModelParams<double>::zeros(1, 1, Pooling::Center, Aggregation::Mean);
  p.out_b(0) = 1.0;
  AdamConfig cfg;
  cfg.lr = 0.1;
  Adam<double> adam(p, cfg);
  const double expected[] = {0.9000000005, 0.8004122286917928, 0.7015862729460303};
  for (double want : expected) {
    auto g = p.zeros_like();
    g.out_b(0) = 2.0 * p.out_b(0);
    adam.step(p, g);
    EXPECT_NEAR(p.out_b(0), want, 1e-12);
    EXPECT_EQ(p.reduce(0, 0), 0.0);
  }
  EXPECT_EQ(adam.steps(), 3U);
}

std::vector<LinkRecord> separable(std::size_t n, Rng& rng) {
  // Positives carry a large first feature on both targets, negatives a small one.
  std::vector<LinkRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t label = i % 2 == 0 ? 1 : 0;
    auto r = oracle::random_record(2, 2, 3, rng, label);
    for (std::size_t op = 0; op < 2; ++op)
      for (std::size_t j = 0; j < 2; ++j) {
        r.row(op, j)[0] = label ? 2.0F + static_cast<float>(rng.uniform()) : static_cast<float>(rng.uniform()) * 0.2F;
        r.row(op, j)[1] = static_cast<float>(rng.uniform()) * 0.1F;
        r.row(op, j)[2] = 1.0F;
      }
    out.push_back(r);
  }
  return out;
}

TEST(Train, SeparableToyReachesPerfectAuc) {
  Rng rng(80);
  const auto train_set = separable(200, rng);
  const auto valid_set = separable(60, rng);
  TrainConfig cfg;
  cfg.hidden = 16;
  cfg.epochs = 50;
  cfg.adam.lr = 1e-2;
  const auto result = train(train_set, valid_set, cfg);
  EXPECT_DOUBLE_EQ(auc(split_by_label(train_set, predict<float>(train_set, result.params))), 1.0);
  EXPECT_DOUBLE_EQ(result.best_valid_auc, 1.0);
  EXPECT_EQ(result.history.size(), 50U);
}

TEST(Train, SameSeedSameHistory) {
  Rng rng(81);
  const auto train_set = separable(100, rng);
  const auto valid_set = separable(40, rng);
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.epochs = 5;
  cfg.seed = 9;
  const auto a = train(train_set, valid_set, cfg);
  const auto b = train(train_set, valid_set, cfg);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].valid_auc, b.history[i].valid_auc);
  }
  EXPECT_EQ(a.params.reduce, b.params.reduce);
  EXPECT_EQ(a.best_epoch, b.best_epoch);
}

TEST(Train, ZeroLearningRateKeepsParameters) {
  Rng rng(82);
  const auto train_set = separable(64, rng);
  const auto valid_set = separable(20, rng);
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.epochs = 4;
  cfg.dropout = 0.0;
  cfg.adam.lr = 0.0;
  const auto result = train(train_set, valid_set, cfg);
  const auto initial = ModelParams<float>::init(6, 8, Pooling::Center, Aggregation::Mean, cfg.seed);
  EXPECT_EQ(result.params.reduce, initial.reduce);
  EXPECT_EQ(result.params.out_w, initial.out_w);
  for (const auto& e : result.history) {
    EXPECT_EQ(e.valid_auc, result.history.front().valid_auc);
    EXPECT_NEAR(e.train_loss, result.history.front().train_loss, 1e-6);
  }
  EXPECT_EQ(result.best_epoch, 1U);
}

TEST(Train, RejectsBadConfig) {
  Rng rng(83);
  const auto data = separable(10, rng);
  TrainConfig cfg;
  cfg.dropout = 1.0;
  EXPECT_THROW(train(data, data, cfg), Error);
  cfg = TrainConfig{};
  cfg.epochs = 0;
  EXPECT_THROW(train(data, data, cfg), Error);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(train(data, data, cfg), Error);
  EXPECT_THROW(train({}, data, TrainConfig{}), Error);
}

TEST(Predict, ProbabilitiesAreInUnitIntervalAndRepeatable) {
  Rng rng(84);
  const auto data = separable(50, rng);
  const auto p = ModelParams<float>::init(6, 16, Pooling::Center, Aggregation::Mean, 5);
  const auto a = predict<float>(data, p);
  EXPECT_EQ(a, predict<float>(data, p));
  for (double s : a) {
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
}

TEST(Checkpoint, RoundTrip) {
  testutil::TempDir dir;
  auto p = ModelParams<float>::init(20, 12, Pooling::CCN, Aggregation::Max, 8);
  p.input_scale.setLinSpaced(0.5F, 3.0F);
  save_checkpoint(dir / "m.ckpt", p, {{"note", "test"}});
  const auto q = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(q.reduce, p.reduce);
  EXPECT_EQ(q.hidden_w, p.hidden_w);
  EXPECT_EQ(q.hidden_b, p.hidden_b);
  EXPECT_EQ(q.out_w, p.out_w);
  EXPECT_EQ(q.out_b, p.out_b);
  EXPECT_EQ(q.input_scale, p.input_scale);
  EXPECT_EQ(q.pooling, Pooling::CCN);
  EXPECT_EQ(q.agg, Aggregation::Max);
  const auto bytes = testutil::slurp(dir / "m.ckpt");
  dir.write("cut.ckpt", bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(load_checkpoint(dir / "cut.ckpt"), Error);
}

TEST(InputScale, IsInverseRootMeanSquarePerColumn) {
  Rng rng(83);
  std::vector<LinkRecord> records;
  for (int i = 0; i < 7; ++i) records.push_back(oracle::random_record(2 + rng.below(3), 2, 3, rng, 1));
  for (auto& r : records)
    for (std::size_t j = 0; j < r.pooled_count(); ++j) r.row(1, j)[2] = 0.0F;
  const auto scale = fit_input_scale(records, 6);
  for (std::size_t col = 0; col < 6; ++col) {
    double sum_sq = 0;
    std::size_t rows = 0;
    for (const auto& r : records)
      for (std::size_t j = 0; j < r.pooled_count(); ++j, ++rows) {
        const double x = r.row(col / 3, j)[col % 3];
        sum_sq += x * x;
      }
    const double want = col == 5 ? 1.0 : std::sqrt(static_cast<double>(rows) / sum_sq);
    EXPECT_NEAR(scale(static_cast<Eigen::Index>(col)), want, 1e-5 * want) << "column " << col;
  }
}

TEST(Train, LearnsOnLargeUnnormalizedInputs) {
  // Positives and negatives differ only in magnitude, at the scale of raw
  // third adjacency powers.
  Rng rng(84);
  auto make = [&](std::size_t n) {
    auto set = separable(n, rng);
    for (auto& r : set)
      for (auto& x : r.values) x *= 300.0F;
    return set;
  };
  const auto train_set = make(200), valid_set = make(60);
  TrainConfig cfg;
  cfg.hidden = 16;
  cfg.epochs = 20;
  const auto result = train(train_set, valid_set, cfg);
  EXPECT_LT(result.history.front().train_loss, 5.0);
  EXPECT_GT(result.best_valid_auc, 0.95);
}

TEST(ModelParams, ShapesFollowPooling) {
  const auto c = ModelParams<float>::init(10, 256, Pooling::Center, Aggregation::Mean, 0);
  EXPECT_EQ(c.pool_dim(), 256U);
  const auto n = ModelParams<float>::init(10, 256, Pooling::CCN, Aggregation::Mean, 0);
  EXPECT_EQ(n.pool_dim(), 512U);
  EXPECT_TRUE(n.all_finite());
  EXPECT_EQ(n.hidden_b.size(), 256);
  EXPECT_EQ(n.out_w.size(), 256);
}

}  // namespace
}  // namespace s3grl
