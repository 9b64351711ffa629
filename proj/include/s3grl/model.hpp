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

// Trainable head on top of precomputed LinkRecords:
//
//   z_j   = relu(x_j W)                  x_j: pooled row j, all blocks concatenated
//   q     = z_u * z_v                    center pooling (Hadamard)
//         | [z_u * z_v, AGG_cn z_cn]     center + common-neighbor pooling
//   h     = dropout(relu(q H + b_h))
//   P_uv  = sigmoid(h . o + b_o)
//
// trained with mean binary cross-entropy and Adam.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "s3grl/common.hpp"
#include "s3grl/diffusion.hpp"
#include "s3grl/metrics.hpp"
#include "s3grl/record_io.hpp"

namespace s3grl {

enum class Aggregation { Mean, Sum, Max };

inline std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::Mean: return "mean";
    case Aggregation::Sum: return "sum";
    case Aggregation::Max: return "max";
  }
  return "?";
}

inline Aggregation parse_aggregation(const std::string& s) {
  if (s == "mean") return Aggregation::Mean;
  if (s == "sum") return Aggregation::Sum;
  if (s == "max") return Aggregation::Max;
  throw Error("unknown aggregation '" + s + "' (expected mean, sum or max)");
}

enum class Mode { Train, Eval };

template <typename T>
struct ModelParams {
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  Matrix reduce;    ///< W: in_dim x hidden
  Matrix hidden_w;  ///< pool_dim x hidden
  Vector hidden_b;  ///< hidden
  Vector out_w;     ///< hidden
  Vector out_b;     ///< 1
  Vector input_scale;  ///< fixed per-column input multiplier, fitted before training; not trained
  Pooling pooling = Pooling::Center;
  Aggregation agg = Aggregation::Mean;

  std::size_t in_dim() const noexcept { return static_cast<std::size_t>(reduce.rows()); }
  std::size_t hidden() const noexcept { return static_cast<std::size_t>(reduce.cols()); }
  std::size_t pool_dim() const noexcept { return static_cast<std::size_t>(hidden_w.rows()); }

  static ModelParams zeros(std::size_t in_dim, std::size_t hidden, Pooling pooling, Aggregation agg) {
    const auto in = static_cast<Eigen::Index>(in_dim);
    const auto hid = static_cast<Eigen::Index>(hidden);
    const auto pool = pooling == Pooling::Center ? hid : 2 * hid;
    ModelParams p;
    p.reduce = Matrix::Zero(in, hid);
    p.hidden_w = Matrix::Zero(pool, hid);
    p.hidden_b = Vector::Zero(hid);
    p.out_w = Vector::Zero(hid);
    p.out_b = Vector::Zero(1);
    p.input_scale = Vector::Ones(in);
    p.pooling = pooling;
    p.agg = agg;
    return p;
  }

  /// Glorot-uniform weights, zero biases.
  static ModelParams init(std::size_t in_dim, std::size_t hidden, Pooling pooling, Aggregation agg,
                          std::uint64_t seed) {
    ModelParams p = zeros(in_dim, hidden, pooling, agg);
    Rng rng(mix_seed(seed, 0x1417));
    auto fill = [&](auto& m, double fan_in, double fan_out) {
      const double bound = std::sqrt(6.0 / (fan_in + fan_out));
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>((2.0 * rng.uniform() - 1.0) * bound);
    };
    fill(p.reduce, static_cast<double>(p.reduce.rows()), static_cast<double>(p.reduce.cols()));
    fill(p.hidden_w, static_cast<double>(p.hidden_w.rows()), static_cast<double>(p.hidden_w.cols()));
    fill(p.out_w, static_cast<double>(p.out_w.rows()), 1.0);
    return p;
  }

  /// Gradient-shaped zeros; input_scale is copied since it is not a parameter.
  ModelParams zeros_like() const {
    auto z = zeros(in_dim(), hidden(), pooling, agg);
    z.input_scale = input_scale;
    return z;
  }

  /// Every trainable tensor as a flat span, in a fixed order.
  std::vector<std::span<T>> tensors() {
    return {{reduce.data(), static_cast<std::size_t>(reduce.size())},
            {hidden_w.data(), static_cast<std::size_t>(hidden_w.size())},
            {hidden_b.data(), static_cast<std::size_t>(hidden_b.size())},
            {out_w.data(), static_cast<std::size_t>(out_w.size())},
            {out_b.data(), 1}};
  }
  std::vector<std::span<const T>> tensors() const {
    auto spans = const_cast<ModelParams*>(this)->tensors();
    return {spans.begin(), spans.end()};
  }

  template <typename U>
  ModelParams<U> cast() const {
    ModelParams<U> out;
    out.reduce = reduce.template cast<U>();
    out.hidden_w = hidden_w.template cast<U>();
    out.hidden_b = hidden_b.template cast<U>();
    out.out_w = out_w.template cast<U>();
    out.out_b = out_b.template cast<U>();
    out.input_scale = input_scale.template cast<U>();
    out.pooling = pooling;
    out.agg = agg;
    return out;
  }

  bool all_finite() const {
    for (auto t : tensors())
      for (T x : t)
        if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }
};

/// Intermediates of a batch forward pass, kept for backprop.
template <typename T>
struct ForwardCache {
  using Matrix = typename ModelParams<T>::Matrix;
  using Vector = typename ModelParams<T>::Vector;

  Matrix inputs;                       ///< all pooled rows, stacked
  std::vector<std::size_t> row_begin;  ///< per example, plus end sentinel
  Matrix reduced_pre, reduced;         ///< x W before / after relu
  Matrix pooled;                       ///< batch x pool_dim
  std::vector<Eigen::Index> max_source;  ///< Max aggregation: winning row per (example, unit), -1 if none
  Matrix hidden_pre, hidden;           ///< hidden layer before relu / after relu and dropout
  Matrix dropout_scale;                ///< empty in eval mode
  Vector logits;
  Vector probs;
};

namespace detail {

template <typename T>
T sigmoid(T x) {
  return x >= 0 ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

/// Binary cross-entropy with logits, stable for large |s|.
template <typename T>
T bce_with_logits(T s, T y) {
  return std::max(s, T(0)) - s * y + std::log1p(std::exp(-std::abs(s)));
}

template <typename T>
void check_shape(const LinkRecord& r, const ModelParams<T>& params) {
  if (static_cast<std::size_t>(r.num_operators) * r.block_width != params.in_dim())
    throw Error("record layout (" + std::to_string(r.num_operators) + " x " + std::to_string(r.block_width) +
                ") does not match model input width " + std::to_string(params.in_dim()));
  if (r.pooled_count() < 2) throw Error("record has fewer than two pooled rows");
}

}  // namespace detail

/// Batch forward pass. rng drives dropout in train mode only.
template <typename T>
ForwardCache<T> forward_batch(std::span<const LinkRecord* const> batch, const ModelParams<T>& params, Mode mode,
                              Rng& rng, double dropout) {
  using Matrix = typename ModelParams<T>::Matrix;
  ForwardCache<T> c;
  const auto hid = static_cast<Eigen::Index>(params.hidden());
  const auto batch_size = static_cast<Eigen::Index>(batch.size());

  c.row_begin.reserve(batch.size() + 1);
  std::size_t rows = 0;
  for (const auto* r : batch) {
    detail::check_shape(*r, params);
    c.row_begin.push_back(rows);
    rows += r->pooled_count();
  }
  c.row_begin.push_back(rows);

  c.inputs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(params.in_dim()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& r = *batch[b];
    for (std::size_t j = 0; j < r.pooled_count(); ++j) {
      const auto row = static_cast<Eigen::Index>(c.row_begin[b] + j);
      for (std::size_t op = 0; op < r.num_operators; ++op) {
        const auto src = r.row(op, j);
        for (std::size_t f = 0; f < src.size(); ++f) {
          const auto col = static_cast<Eigen::Index>(op * r.block_width + f);
          c.inputs(row, col) = static_cast<T>(src[f]) * params.input_scale(col);
        }
      }
    }
  }

  c.reduced_pre.noalias() = c.inputs * params.reduce;
  c.reduced = c.reduced_pre.cwiseMax(T(0));

  c.pooled = Matrix::Zero(batch_size, static_cast<Eigen::Index>(params.pool_dim()));
  if (params.agg == Aggregation::Max && params.pooling == Pooling::CCN)
    c.max_source.assign(batch.size() * static_cast<std::size_t>(hid), -1);
  for (Eigen::Index b = 0; b < batch_size; ++b) {
    const auto first = static_cast<Eigen::Index>(c.row_begin[static_cast<std::size_t>(b)]);
    const auto last = static_cast<Eigen::Index>(c.row_begin[static_cast<std::size_t>(b) + 1]);
    c.pooled.row(b).head(hid) = c.reduced.row(first).cwiseProduct(c.reduced.row(first + 1));
    if (params.pooling != Pooling::CCN || last - first <= 2) continue;
    auto tail = c.pooled.row(b).tail(hid);
    const auto cn_rows = c.reduced.middleRows(first + 2, last - first - 2);
    switch (params.agg) {
      case Aggregation::Mean: tail = cn_rows.colwise().sum() / static_cast<T>(cn_rows.rows()); break;
      case Aggregation::Sum: tail = cn_rows.colwise().sum(); break;
      case Aggregation::Max:
        for (Eigen::Index k = 0; k < hid; ++k) {
          Eigen::Index arg = 0;
          tail(k) = cn_rows.col(k).maxCoeff(&arg);
          c.max_source[static_cast<std::size_t>(b * hid + k)] = first + 2 + arg;
        }
        break;
    }
  }

  c.hidden_pre.noalias() = c.pooled * params.hidden_w;
  c.hidden_pre.rowwise() += params.hidden_b.transpose();
  c.hidden = c.hidden_pre.cwiseMax(T(0));
  if (mode == Mode::Train && dropout > 0) {
    const T keep_scale = T(1) / static_cast<T>(1.0 - dropout);
    c.dropout_scale.resize(batch_size, hid);
    for (Eigen::Index b = 0; b < batch_size; ++b)
      for (Eigen::Index k = 0; k < hid; ++k) c.dropout_scale(b, k) = rng.uniform() < dropout ? T(0) : keep_scale;
    c.hidden = c.hidden.cwiseProduct(c.dropout_scale);
  }
  c.logits = c.hidden * params.out_w;
  c.logits.array() += params.out_b(0);
  c.probs = c.logits.unaryExpr([](T s) { return detail::sigmoid(s); });
  return c;
}

/// Forward pass for a single record; returns P_uv and the cache.
template <typename T>
std::pair<T, ForwardCache<T>> forward(const LinkRecord& record, const ModelParams<T>& params, Mode mode, Rng& rng,
                                      double dropout = 0.5) {
  const LinkRecord* one[] = {&record};
  auto cache = forward_batch<T>(one, params, mode, rng, dropout);
  return {cache.probs(0), std::move(cache)};
}

template <typename T>
struct LossAndGradients {
  T loss = 0;
  ModelParams<T> grads;
};

/**
 * Mean binary cross-entropy over the batch and its exact gradients. The
 * dropout mask drawn in the forward pass is reused in the backward pass.
 */
template <typename T>
LossAndGradients<T> loss_and_gradients(std::span<const LinkRecord* const> batch, const ModelParams<T>& params,
                                       double dropout, Rng& rng) {
  using Matrix = typename ModelParams<T>::Matrix;
  using Vector = typename ModelParams<T>::Vector;
  if (batch.empty()) throw Error("loss_and_gradients needs a nonempty batch");
  const auto c = forward_batch<T>(batch, params, Mode::Train, rng, dropout);
  const auto hid = static_cast<Eigen::Index>(params.hidden());
  const auto batch_size = static_cast<Eigen::Index>(batch.size());
  const T inv_n = T(1) / static_cast<T>(batch.size());

  LossAndGradients<T> out;
  out.grads = params.zeros_like();
  Vector d_logit(batch_size);
  for (Eigen::Index b = 0; b < batch_size; ++b) {
    const T y = static_cast<T>(batch[static_cast<std::size_t>(b)]->label);
    out.loss += detail::bce_with_logits(c.logits(b), y);
    d_logit(b) = (c.probs(b) - y) * inv_n;
  }
  out.loss *= inv_n;

  auto& g = out.grads;
  g.out_w.noalias() = c.hidden.transpose() * d_logit;
  g.out_b(0) = d_logit.sum();

  Matrix d_hidden = d_logit * params.out_w.transpose();
  if (c.dropout_scale.size() > 0) d_hidden = d_hidden.cwiseProduct(c.dropout_scale);
  const Matrix d_hidden_pre = d_hidden.cwiseProduct((c.hidden_pre.array() > T(0)).template cast<T>().matrix());
  g.hidden_w.noalias() = c.pooled.transpose() * d_hidden_pre;
  g.hidden_b = d_hidden_pre.colwise().sum().transpose();

  const Matrix d_pooled = d_hidden_pre * params.hidden_w.transpose();
  Matrix d_reduced = Matrix::Zero(c.reduced.rows(), hid);
  for (Eigen::Index b = 0; b < batch_size; ++b) {
    const auto first = static_cast<Eigen::Index>(c.row_begin[static_cast<std::size_t>(b)]);
    const auto last = static_cast<Eigen::Index>(c.row_begin[static_cast<std::size_t>(b) + 1]);
    const auto d_center = d_pooled.row(b).head(hid);
    d_reduced.row(first) += d_center.cwiseProduct(c.reduced.row(first + 1));
    d_reduced.row(first + 1) += d_center.cwiseProduct(c.reduced.row(first));
    if (params.pooling != Pooling::CCN || last - first <= 2) continue;
    const auto d_cn = d_pooled.row(b).tail(hid);
    const auto count = last - first - 2;
    switch (params.agg) {
      case Aggregation::Mean:
        for (Eigen::Index j = first + 2; j < last; ++j) d_reduced.row(j) += d_cn / static_cast<T>(count);
        break;
      case Aggregation::Sum:
        for (Eigen::Index j = first + 2; j < last; ++j) d_reduced.row(j) += d_cn;
        break;
      case Aggregation::Max:
        for (Eigen::Index k = 0; k < hid; ++k)
          d_reduced(c.max_source[static_cast<std::size_t>(b * hid + k)], k) += d_cn(k);
        break;
    }
  }
  const Matrix d_reduced_pre = d_reduced.cwiseProduct((c.reduced_pre.array() > T(0)).template cast<T>().matrix());
  g.reduce.noalias() = c.inputs.transpose() * d_reduced_pre;
  return out;
}

// ---------------------------------------------------------------------------
// Optimizer and training loop
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias-corrected moments.
template <typename T>
class Adam {
 public:
  Adam(const ModelParams<T>& like, AdamConfig config) : config_(config), m_(like.zeros_like()), v_(like.zeros_like()) {}

  void step(ModelParams<T>& params, const ModelParams<T>& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    auto p = params.tensors();
    auto g = grads.tensors();
    auto m = m_.tensors();
    auto v = v_.tensors();
    for (std::size_t t = 0; t < p.size(); ++t)
      for (std::size_t i = 0; i < p[t].size(); ++i) {
        const double gi = static_cast<double>(g[t][i]);
        m[t][i] = static_cast<T>(config_.beta1 * static_cast<double>(m[t][i]) + (1.0 - config_.beta1) * gi);
        v[t][i] = static_cast<T>(config_.beta2 * static_cast<double>(v[t][i]) + (1.0 - config_.beta2) * gi * gi);
        const double m_hat = static_cast<double>(m[t][i]) / c1;
        const double v_hat = static_cast<double>(v[t][i]) / c2;
        p[t][i] = static_cast<T>(static_cast<double>(p[t][i]) - config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps));
      }
  }

  std::size_t steps() const noexcept { return t_; }

 private:
  AdamConfig config_;
  ModelParams<T> m_, v_;
  std::size_t t_ = 0;
};

struct TrainConfig {
  std::size_t hidden = 256;
  double dropout = 0.5;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  AdamConfig adam;
  std::uint64_t seed = 0;
  Pooling pooling = Pooling::Center;
  Aggregation agg = Aggregation::Mean;

  void validate() const {
    if (!(dropout >= 0.0 && dropout < 1.0)) throw Error("training.dropout must be in [0, 1)");
    if (epochs < 1) throw Error("training.epochs must be at least 1");
    if (batch_size < 1) throw Error("training.batch_size must be at least 1");
    if (hidden < 1) throw Error("training.hidden must be at least 1");
    if (adam.lr < 0) throw Error("training.lr must be nonnegative");
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"hidden", c.hidden},
       {"dropout", c.dropout},
       {"dropout_placement", "after the MLP hidden activation"},
       {"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"lr", c.adam.lr},
       {"beta1", c.adam.beta1},
       {"beta2", c.adam.beta2},
       {"eps", c.adam.eps},
       {"seed", c.seed},
       {"pooling", to_string(c.pooling)},
       {"agg", to_string(c.agg)},
       {"activation", "relu"},
       {"loss", "mean binary cross-entropy"}};
}

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0;
  double valid_auc = 0;
  double seconds = 0;
};

struct TrainResult {
  ModelParams<float> params;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
  double best_valid_auc = 0;
};

inline std::vector<const LinkRecord*> pointers_to(std::span<const LinkRecord> records) {
  std::vector<const LinkRecord*> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(&r);
  return out;
}

/// Eval-mode probabilities, in input order.
template <typename T>
std::vector<double> predict(std::span<const LinkRecord> records, const ModelParams<T>& params) {
  std::vector<double> out;
  out.reserve(records.size());
  Rng unused(0);
  constexpr std::size_t kChunk = 256;
  const auto ptrs = pointers_to(records);
  for (std::size_t begin = 0; begin < ptrs.size(); begin += kChunk) {
    const std::size_t end = std::min(ptrs.size(), begin + kChunk);
    const auto c = forward_batch<T>(std::span(ptrs).subspan(begin, end - begin), params, Mode::Eval, unused, 0.0);
    for (Eigen::Index i = 0; i < c.probs.size(); ++i) out.push_back(static_cast<double>(c.probs(i)));
  }
  return out;
}

inline std::vector<double> predict(const std::filesystem::path& record_file, const ModelParams<float>& params) {
  const auto records = RecordReader(record_file).read_all();
  return predict<float>(records, params);
}

inline ScoredPairs split_by_label(std::span<const LinkRecord> records, const std::vector<double>& scores) {
  ScoredPairs out;
  for (std::size_t i = 0; i < records.size(); ++i)
    (records[i].label ? out.pos_scores : out.neg_scores).push_back(scores[i]);
  return out;
}

/**
 * Per-column 1 / RMS over every pooled row of `records` (1 for all-zero
 * columns). Raw adjacency powers grow quickly with the power, and unscaled
 * inputs saturate the Hadamard pooling at initialization.
 */
inline Eigen::VectorXf fit_input_scale(std::span<const LinkRecord> records, std::size_t in_dim) {
  std::vector<double> sum_sq(in_dim, 0.0);
  std::size_t rows = 0;
  for (const auto& r : records) {
    for (std::size_t j = 0; j < r.pooled_count(); ++j)
      for (std::size_t op = 0; op < r.num_operators; ++op) {
        const auto src = r.row(op, j);
        for (std::size_t f = 0; f < src.size(); ++f)
          sum_sq[op * r.block_width + f] += static_cast<double>(src[f]) * static_cast<double>(src[f]);
      }
    rows += r.pooled_count();
  }
  Eigen::VectorXf scale = Eigen::VectorXf::Ones(static_cast<Eigen::Index>(in_dim));
  for (std::size_t i = 0; i < in_dim; ++i)
    if (sum_sq[i] > 0) scale(static_cast<Eigen::Index>(i)) = static_cast<float>(std::sqrt(static_cast<double>(rows) / sum_sq[i]));
  return scale;
}

/**
 * Trains with seeded per-epoch shuffles and returns the parameters of the
 * epoch with the highest validation AUC (earliest on ties).
 */
inline TrainResult train(std::span<const LinkRecord> train_set, std::span<const LinkRecord> valid_set,
                         const TrainConfig& config) {
  config.validate();
  if (train_set.empty()) throw Error("training set is empty");
  const std::size_t in_dim = static_cast<std::size_t>(train_set[0].num_operators) * train_set[0].block_width;
  auto params = ModelParams<float>::init(in_dim, config.hidden, config.pooling, config.agg, config.seed);
  for (const auto& r : train_set) detail::check_shape(r, params);
  params.input_scale = fit_input_scale(train_set, in_dim);
  Adam<float> adam(params, config.adam);

  TrainResult result;
  result.params = params;
  result.best_valid_auc = -1.0;
  const auto all = pointers_to(train_set);
  std::vector<std::size_t> order(train_set.size());
  Rng dropout_rng(mix_seed(config.seed, 0xd120));
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(mix_seed(config.seed, 0x5f1e, epoch));
    shuffle(order, shuffle_rng);

    double loss_sum = 0.0;
    std::vector<const LinkRecord*> batch;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(all[order[i]]);
      const auto lg = loss_and_gradients<float>(batch, params, config.dropout, dropout_rng);
      loss_sum += static_cast<double>(lg.loss) * static_cast<double>(batch.size());
      adam.step(params, lg.grads);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(order.size());
    if (!valid_set.empty()) stats.valid_auc = auc(split_by_label(valid_set, predict<float>(valid_set, params)));
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.push_back(stats);
    if (stats.valid_auc > result.best_valid_auc) {
      result.best_valid_auc = stats.valid_auc;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  return result;
}

inline TrainResult train(const std::filesystem::path& train_file, const std::filesystem::path& valid_file,
                         const TrainConfig& config) {
  const auto train_set = RecordReader(train_file).read_all();
  const auto valid_set = RecordReader(valid_file).read_all();
  return train(train_set, valid_set, config);
}

// ---------------------------------------------------------------------------
// Checkpoints: u32 header length | JSON header | float32 payload (LE)
// ---------------------------------------------------------------------------

inline void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params,
                            const nlohmann::json& config = {}) {
  nlohmann::json header = {{"format", "s3grl-head"},
                           {"version", 1},
                           {"in_dim", params.in_dim()},
                           {"hidden", params.hidden()},
                           {"pool_dim", params.pool_dim()},
                           {"pooling", to_string(params.pooling)},
                           {"agg", to_string(params.agg)},
                           {"layout", "reduce, hidden_w, hidden_b, out_w, out_b, input_scale; column-major"},
                           {"config", config}};
  const std::string text = header.dump();
  std::vector<std::uint8_t> bytes;
  detail::put_u32(bytes, static_cast<std::uint32_t>(text.size()));
  bytes.insert(bytes.end(), text.begin(), text.end());
  for (auto t : params.tensors())
    for (float x : t) detail::put_f32(bytes, x);
  for (float x : params.input_scale) detail::put_f32(bytes, x);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline ModelParams<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4) throw Error("truncated checkpoint " + path.string());
  const std::size_t header_len = detail::get_u32(bytes.data());
  if (bytes.size() < 4 + header_len) throw Error("truncated checkpoint " + path.string());
  const auto header = nlohmann::json::parse(bytes.begin() + 4, bytes.begin() + 4 + static_cast<std::ptrdiff_t>(header_len));
  auto params = ModelParams<float>::zeros(header.at("in_dim").get<std::size_t>(), header.at("hidden").get<std::size_t>(),
                                          parse_pooling(header.at("pooling").get<std::string>()),
                                          parse_aggregation(header.at("agg").get<std::string>()));
  std::size_t offset = 4 + header_len;
  auto read_into = [&](std::span<float> t) {
    if (bytes.size() < offset + 4 * t.size()) throw Error("truncated checkpoint payload " + path.string());
    for (auto& x : t) {
      x = std::bit_cast<float>(detail::get_u32(bytes.data() + offset));
      offset += 4;
    }
  };
  for (auto t : params.tensors()) read_into(t);
  read_into({params.input_scale.data(), static_cast<std::size_t>(params.input_scale.size())});
  if (offset != bytes.size()) throw Error("trailing bytes in checkpoint " + path.string());
  return params;
}

}  // namespace s3grl
