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

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "s3grl/diffusion.hpp"
#include "s3grl/graph.hpp"
#include "s3grl/heuristics.hpp"
#include "s3grl/metrics.hpp"
#include "s3grl/model.hpp"
#include "s3grl/record_io.hpp"

namespace s3grl {

using nlohmann::json;

struct DatasetConfig {
  std::string name = "dataset";
  std::filesystem::path edges;
  std::optional<std::filesystem::path> features;
  IdMapping id_mapping = IdMapping::Preserve;
};

struct EvalConfig {
  std::size_t hits_k = 100;
  bool heuristics_only = false;
  std::vector<Heuristic> heuristics{Heuristic::CN, Heuristic::AA, Heuristic::PPR};
  PprParams ppr;
};

struct RunsConfig {
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t workers = 1;
  std::optional<std::filesystem::path> work_dir;
};

/**
 * Everything needed to rerun an experiment. Every default reproduces the
 * standard protocol: 85/5/10 splits, r = 3, h = 3 on attributed and h = 2 on
 * plain graphs, 256 hidden units, dropout 0.5, 50 epochs, batch 32, seeds 0..9.
 */
struct ExperimentConfig {
  DatasetConfig dataset;
  SplitRatios split;
  SamplingOperatorSet sampling;
  bool h_explicit = false;
  TrainConfig training;
  EvalConfig eval;
  RunsConfig runs;

  /// h from the config, or the attributed/plain default for this graph.
  SamplingOperatorSet sampling_for(const Graph& graph) const {
    SamplingOperatorSet s = sampling;
    if (!h_explicit) s.h = graph.has_features() ? 3 : 2;
    return s;
  }

  static ExperimentConfig from_json(const json& j, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  json echo(const Graph* graph = nullptr) const;
};

namespace detail {

/// Reads typed fields from one config section, naming the field on error and
/// rejecting unknown keys.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (root.contains(name_)) {
      obj_ = root.at(name_);
      if (!obj_.is_object()) throw Error("config field '" + name_ + "' must be an object");
    } else {
      obj_ = json::object();
    }
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!obj_.contains(key) || obj_.at(key).is_null()) return fallback;
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error("config field '" + name_ + "." + key + "': " + e.what());
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  std::string field(const std::string& key) const { return name_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) throw Error("config field '" + name_ + "." + key + "' is not recognized");
  }

 private:
  std::string name_;
  json obj_;
  std::set<std::string> seen_;
};

template <typename F>
auto with_field(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error("config field '" + field + "': " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_json(const json& root, const std::filesystem::path& base_dir) {
  if (!root.is_object()) throw Error("config must be a JSON object");
  static const std::set<std::string> kSections{"dataset", "split", "variant", "sampling", "training", "eval", "runs"};
  for (const auto& [key, value] : root.items())
    if (!kSections.count(key)) throw Error("config field '" + key + "' is not recognized");

  ExperimentConfig c;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  detail::Section ds(root, "dataset");
  c.dataset.name = ds.get<std::string>("name", c.dataset.name);
  const auto edges = ds.get<std::string>("edges", "");
  if (edges.empty()) throw Error("config field 'dataset.edges' is required");
  c.dataset.edges = resolve(edges);
  if (ds.has("features")) c.dataset.features = resolve(ds.get<std::string>("features", ""));
  const auto mapping = ds.get<std::string>("id_mapping", "preserve");
  if (mapping == "compact") c.dataset.id_mapping = IdMapping::Compact;
  else if (mapping != "preserve") throw Error("config field 'dataset.id_mapping' must be preserve or compact");
  ds.finish();

  detail::Section sp(root, "split");
  c.split.train = sp.get<double>("train", c.split.train);
  c.split.valid = sp.get<double>("valid", c.split.valid);
  c.split.test = sp.get<double>("test", c.split.test);
  sp.finish();
  if (c.split.train <= 0 || c.split.valid <= 0 || c.split.test <= 0 ||
      std::abs(c.split.train + c.split.valid + c.split.test - 1.0) > 1e-9)
    throw Error("config field 'split': ratios must be positive and sum to 1");

  if (root.contains("variant")) {
    if (!root.at("variant").is_string()) throw Error("config field 'variant' must be a string");
    c.sampling.variant = detail::with_field("variant", [&] { return parse_variant(root.at("variant").get<std::string>()); });
  }
  c.sampling.pooling = default_pooling(c.sampling.variant);

  detail::Section sa(root, "sampling");
  c.sampling.r = sa.get<std::uint32_t>("r", c.sampling.r);
  c.h_explicit = sa.has("h");
  c.sampling.h = sa.get<std::uint32_t>("h", c.sampling.h);
  c.sampling.k = sa.get<std::uint32_t>("k", c.sampling.k);
  c.sampling.l = sa.get<std::uint32_t>("l", c.sampling.l);
  c.sampling.labeling = detail::with_field(sa.field("labeling"), [&] {
    return parse_label_scheme(sa.get<std::string>("labeling", to_string(c.sampling.labeling)));
  });
  c.sampling.pooling = detail::with_field(sa.field("pooling"), [&] {
    return parse_pooling(sa.get<std::string>("pooling", to_string(c.sampling.pooling)));
  });
  c.sampling.label_cap = sa.get<std::size_t>("label_cap", c.sampling.label_cap);
  c.sampling.ccn_cap = sa.get<std::size_t>("ccn_cap", c.sampling.ccn_cap);
  c.sampling.normalize_adjacency = sa.get<bool>("normalize_adjacency", c.sampling.normalize_adjacency);
  sa.finish();
  detail::with_field("sampling", [&] {
    c.sampling.validate();
    return 0;
  });

  detail::Section tr(root, "training");
  c.training.hidden = tr.get<std::size_t>("hidden", c.training.hidden);
  c.training.dropout = tr.get<double>("dropout", c.training.dropout);
  c.training.epochs = tr.get<std::size_t>("epochs", c.training.epochs);
  c.training.batch_size = tr.get<std::size_t>("batch_size", c.training.batch_size);
  c.training.adam.lr = tr.get<double>("lr", c.training.adam.lr);
  c.training.adam.beta1 = tr.get<double>("beta1", c.training.adam.beta1);
  c.training.adam.beta2 = tr.get<double>("beta2", c.training.adam.beta2);
  c.training.adam.eps = tr.get<double>("eps", c.training.adam.eps);
  c.training.agg = detail::with_field(tr.field("agg"), [&] {
    return parse_aggregation(tr.get<std::string>("agg", to_string(c.training.agg)));
  });
  tr.finish();
  c.training.pooling = c.sampling.pooling;
  detail::with_field("training", [&] {
    c.training.validate();
    return 0;
  });

  detail::Section ev(root, "eval");
  c.eval.hits_k = ev.get<std::size_t>("hits_k", c.eval.hits_k);
  c.eval.heuristics_only = ev.get<bool>("heuristics_only", c.eval.heuristics_only);
  if (ev.has("heuristics")) {
    c.eval.heuristics.clear();
    for (const auto& name : ev.get<std::vector<std::string>>("heuristics", {}))
      c.eval.heuristics.push_back(detail::with_field(ev.field("heuristics"), [&] { return parse_heuristic(name); }));
  }
  c.eval.ppr.alpha = ev.get<double>("ppr_alpha", c.eval.ppr.alpha);
  c.eval.ppr.tol = ev.get<double>("ppr_tol", c.eval.ppr.tol);
  ev.finish();
  if (c.eval.hits_k < 1) throw Error("config field 'eval.hits_k' must be at least 1");
  if (!(c.eval.ppr.alpha > 0 && c.eval.ppr.alpha < 1)) throw Error("config field 'eval.ppr_alpha' must be in (0, 1)");

  detail::Section ru(root, "runs");
  if (ru.has("seeds")) {
    c.runs.seeds = ru.get<std::vector<std::uint64_t>>("seeds", {});
  } else if (ru.has("num_runs")) {
    const auto n = ru.get<std::size_t>("num_runs", 10);
    c.runs.seeds.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.runs.seeds[i] = i;
  }
  ru.get<std::size_t>("num_runs", 0);
  c.runs.workers = ru.get<std::size_t>("workers", c.runs.workers);
  if (ru.has("work_dir")) c.runs.work_dir = resolve(ru.get<std::string>("work_dir", ""));
  ru.finish();
  if (c.runs.seeds.empty()) throw Error("config field 'runs.seeds' must list at least one seed");
  return c;
}

inline ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(root, path.parent_path());
}

inline json ExperimentConfig::echo(const Graph* graph) const {
  json heuristics = json::array();
  for (auto h : eval.heuristics) heuristics.push_back(to_string(h));
  json seeds = runs.seeds;
  const SamplingOperatorSet s = graph ? sampling_for(*graph) : sampling;
  json out = {
      {"dataset",
       {{"name", dataset.name},
        {"edges", dataset.edges.string()},
        {"features", dataset.features ? json(dataset.features->string()) : json(nullptr)},
        {"id_mapping", dataset.id_mapping == IdMapping::Preserve ? "preserve" : "compact"}}},
      {"split", {{"train", split.train}, {"valid", split.valid}, {"test", split.test}}},
      {"variant", to_string(s.variant)},
      {"sampling", s},
      {"training", training},
      {"eval",
       {{"hits_k", eval.hits_k},
        {"heuristics_only", eval.heuristics_only},
        {"heuristics", heuristics},
        {"ppr_alpha", eval.ppr.alpha},
        {"ppr_tol", eval.ppr.tol}}},
      {"runs", {{"seeds", seeds}, {"workers", runs.workers}}},
  };
  // Keep only keys from_json reads so the echo loads back as a config.
  for (const char* key : {"variant", "ccn_truncation", "walk_seed"}) out["sampling"].erase(key);
  for (const char* key : {"dropout_placement", "seed", "pooling", "activation", "loss"}) out["training"].erase(key);
  return out;
}

inline Graph load_dataset(const DatasetConfig& d) {
  Graph g = load_edge_list(d.edges, '#', d.id_mapping);
  if (d.features) g = load_features(*d.features, g);
  return g;
}

inline std::vector<LabeledLink> labeled_links(std::span<const Edge> pos, std::span<const Edge> neg) {
  std::vector<LabeledLink> out;
  out.reserve(pos.size() + neg.size());
  for (const auto& e : pos) out.push_back({e.first, e.second, 1});
  for (const auto& e : neg) out.push_back({e.first, e.second, 0});
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct MetricSet {
  double auc = 0;
  std::optional<double> hits;
  double mrr = 0;
};

inline MetricSet score_metrics(const ScoredPairs& scored, std::size_t hits_k) {
  MetricSet m;
  m.auc = auc(scored);
  if (scored.neg_scores.size() >= hits_k) m.hits = hits_at_k(scored, hits_k);
  m.mrr = mrr_shared_negatives(scored);
  return m;
}

inline json to_json(const MetricSet& m, std::size_t hits_k) {
  return {{"auc", m.auc * 100.0},
          {"hits@" + std::to_string(hits_k), m.hits ? json(*m.hits * 100.0) : json(nullptr)},
          {"mrr", m.mrr * 100.0}};
}

struct RunResult {
  std::uint64_t seed = 0;
  std::optional<MetricSet> model;
  std::size_t best_epoch = 0;
  double best_valid_auc = 0;
  std::vector<std::pair<Heuristic, MetricSet>> heuristics;
  double preprocess_seconds = 0;
  double train_seconds_per_epoch = 0;
  double inference_seconds = 0;
  std::vector<EpochStats> history;
};

struct ExperimentReport {
  json config;
  std::vector<RunResult> runs;
  std::optional<StorageReport> storage;
  std::size_t hits_k = 100;

  json to_json() const;
  std::string text_table() const;
  std::string csv() const;
};

struct MeanStd {
  double mean = 0;
  double std = 0;
};

/// Mean and population standard deviation.
inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  for (double x : xs) out.std += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(out.std / static_cast<double>(xs.size()));
  return out;
}

namespace detail {

struct MethodRow {
  std::string method;
  MeanStd auc;
  std::optional<MeanStd> hits;
  MeanStd mrr;
};

inline std::vector<MethodRow> method_rows(const ExperimentReport& r) {
  std::vector<MethodRow> rows;
  auto collect = [&](const std::string& name, auto pick) {
    std::vector<double> aucs, hits, mrrs;
    bool all_hits = true;
    for (const auto& run : r.runs) {
      const std::optional<MetricSet> m = pick(run);
      if (!m) return;
      aucs.push_back(m->auc * 100.0);
      mrrs.push_back(m->mrr * 100.0);
      if (m->hits) hits.push_back(*m->hits * 100.0);
      else all_hits = false;
    }
    if (aucs.empty()) return;
    rows.push_back({name, mean_std(aucs), all_hits ? std::optional(mean_std(hits)) : std::nullopt, mean_std(mrrs)});
  };
  if (!r.runs.empty() && r.runs.front().model)
    collect(r.config.value("variant", std::string("model")), [](const RunResult& run) { return run.model; });
  if (!r.runs.empty())
    for (std::size_t i = 0; i < r.runs.front().heuristics.size(); ++i)
      collect(to_string(r.runs.front().heuristics[i].first), [i](const RunResult& run) {
        return i < run.heuristics.size() ? std::optional(run.heuristics[i].second) : std::nullopt;
      });
  return rows;
}

}  // namespace detail

inline json ExperimentReport::to_json() const {
  json out;
  out["config"] = config;
  out["protocol"] = {
      {"negatives", "uniform non-edges per split, equal in count to positives"},
      {"message_passing_graph", "valid and test positives removed"},
      {"target_link_removal", "the (u, v) edge is removed from every extracted subgraph"},
      {"mrr", "each test positive ranked against all test negatives, ties counted against it"},
      {"std", "population standard deviation over runs"},
      {"ccn_truncation", "highest degree first, ties by ascending id"},
      {"head", "relu reduction, Hadamard target pooling, relu hidden layer, dropout after it, sigmoid output"},
      {"loss", "mean binary cross-entropy"},
  };
  json runs_json = json::array();
  for (const auto& run : runs) {
    json rj = {{"seed", run.seed}};
    if (run.model) {
      rj["test"] = s3grl::to_json(*run.model, hits_k);
      rj["best_epoch"] = run.best_epoch;
      rj["best_valid_auc"] = run.best_valid_auc * 100.0;
      json hist = json::array();
      for (const auto& e : run.history)
        hist.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"valid_auc", e.valid_auc * 100.0},
                        {"timings", {{"seconds", e.seconds}}}});
      rj["history"] = hist;
    }
    json hj = json::object();
    for (const auto& [h, m] : run.heuristics) hj[to_string(h)] = s3grl::to_json(m, hits_k);
    if (!run.heuristics.empty()) rj["heuristics"] = hj;
    rj["timings"] = {{"preprocess_seconds", run.preprocess_seconds},
                     {"train_seconds_per_epoch", run.train_seconds_per_epoch},
                     {"inference_seconds", run.inference_seconds}};
    runs_json.push_back(rj);
  }
  out["runs"] = runs_json;

  json agg = json::object();
  for (const auto& row : detail::method_rows(*this)) {
    json m = {{"auc", {{"mean", row.auc.mean}, {"std", row.auc.std}}},
              {"mrr", {{"mean", row.mrr.mean}, {"std", row.mrr.std}}}};
    m["hits@" + std::to_string(hits_k)] =
        row.hits ? json{{"mean", row.hits->mean}, {"std", row.hits->std}} : json(nullptr);
    agg[row.method] = m;
  }
  out["aggregate"] = agg;

  std::vector<double> pre, tr, inf;
  for (const auto& run : runs) {
    pre.push_back(run.preprocess_seconds);
    tr.push_back(run.train_seconds_per_epoch);
    inf.push_back(run.inference_seconds);
  }
  out["timings"] = {{"preprocess_seconds", mean_std(pre).mean},
                    {"train_seconds_per_epoch", mean_std(tr).mean},
                    {"inference_seconds", mean_std(inf).mean}};
  out["storage"] = storage ? s3grl::to_json(*storage) : json(nullptr);
  return out;
}

inline std::string ExperimentReport::text_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  const std::string hits_name = "HR@" + std::to_string(hits_k);
  os << std::left << std::setw(16) << "method" << std::right << std::setw(16) << "AUC" << std::setw(16) << hits_name
     << std::setw(16) << "MRR" << '\n';
  auto cell = [](const MeanStd& m) {
    std::ostringstream c;
    c << std::fixed << std::setprecision(2) << m.mean << " +- " << m.std;
    return c.str();
  };
  for (const auto& row : detail::method_rows(*this))
    os << std::left << std::setw(16) << row.method << std::right << std::setw(16) << cell(row.auc) << std::setw(16)
       << (row.hits ? cell(*row.hits) : std::string("n/a")) << std::setw(16) << cell(row.mrr) << '\n';
  if (storage) {
    os << "\nstorage: records " << storage->record_bytes << " B, SEAL-style " << storage->seal_bytes
       << " B, reduction " << storage->reduction_percent << " %\n";
  }
  return os.str();
}

inline std::string ExperimentReport::csv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "method,auc_mean,auc_std,hits_mean,hits_std,mrr_mean,mrr_std\n";
  for (const auto& row : detail::method_rows(*this)) {
    os << row.method << ',' << row.auc.mean << ',' << row.auc.std << ',';
    if (row.hits) os << row.hits->mean << ',' << row.hits->std;
    else os << ',';
    os << ',' << row.mrr.mean << ',' << row.mrr.std << '\n';
  }
  return os.str();
}

/// Removes every "timings" object and "*seconds" field, recursively.
inline json strip_timings(json j) {
  if (j.is_object()) {
    json out = json::object();
    for (auto& [key, value] : j.items()) {
      if (key == "timings" || key.find("seconds") != std::string::npos) continue;
      out[key] = strip_timings(value);
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (auto& v : j) out.push_back(strip_timings(v));
    return out;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct SplitRecords {
  std::vector<LinkRecord> train, valid, test;
};

inline SplitRecords precompute_split(const EdgeSplit& split, const SamplingOperatorSet& sampling,
                                     const RunsConfig& runs, std::uint64_t seed) {
  const Graph& g = split.observed_graph;
  const auto train_links = labeled_links(split.train_pos, split.train_neg);
  const auto valid_links = labeled_links(split.valid_pos, split.valid_neg);
  const auto test_links = labeled_links(split.test_pos, split.test_neg);
  SplitRecords out;
  if (!runs.work_dir) {
    GraphPowerCache cache(g);
    out.train = build_records(g, train_links, sampling, runs.workers, &cache);
    out.valid = build_records(g, valid_links, sampling, runs.workers, &cache);
    out.test = build_records(g, test_links, sampling, runs.workers, &cache);
    return out;
  }
  const auto dir = *runs.work_dir / ("seed" + std::to_string(seed));
  const json extra = {{"seed", seed}};
  precompute_dataset(g, train_links, sampling, dir / "train.s3gr", runs.workers, extra);
  precompute_dataset(g, valid_links, sampling, dir / "valid.s3gr", runs.workers, extra);
  precompute_dataset(g, test_links, sampling, dir / "test.s3gr", runs.workers, extra);
  out.train = RecordReader(dir / "train.s3gr").read_all();
  out.valid = RecordReader(dir / "valid.s3gr").read_all();
  out.test = RecordReader(dir / "test.s3gr").read_all();
  return out;
}

}  // namespace detail

inline ScoredPairs heuristic_scored(const Graph& observed, std::span<const Edge> pos, std::span<const Edge> neg,
                                    Heuristic method, const PprParams& ppr) {
  if (method != Heuristic::PPR)
    return {heuristic_scores(observed, pos, method), heuristic_scores(observed, neg, method)};
  PprCache cache(observed, ppr);
  ScoredPairs out;
  for (const auto& e : pos) out.pos_scores.push_back(ppr_score(cache, e.first, e.second));
  for (const auto& e : neg) out.neg_scores.push_back(ppr_score(cache, e.first, e.second));
  return out;
}

/// One seed of the protocol: split, heuristics, precompute, train, test.
inline RunResult run_seed(const Graph& graph, const ExperimentConfig& config, std::uint64_t seed) {
  RunResult run;
  run.seed = seed;
  const EdgeSplit split = split_edges(graph, config.split, seed);
  for (auto h : config.eval.heuristics)
    run.heuristics.emplace_back(
        h, score_metrics(heuristic_scored(split.observed_graph, split.test_pos, split.test_neg, h, config.eval.ppr),
                         config.eval.hits_k));
  if (config.eval.heuristics_only) return run;

  SamplingOperatorSet sampling = config.sampling_for(graph);
  sampling.walk_seed = seed;
  auto start = std::chrono::steady_clock::now();
  const auto records = detail::precompute_split(split, sampling, config.runs, seed);
  run.preprocess_seconds = detail::seconds_since(start);

  TrainConfig tc = config.training;
  tc.seed = seed;
  tc.pooling = sampling.pooling;
  const auto trained = train(records.train, records.valid, tc);
  run.history = trained.history;
  run.best_epoch = trained.best_epoch;
  run.best_valid_auc = trained.best_valid_auc;
  double epoch_seconds = 0;
  std::size_t counted = 0;
  for (std::size_t i = trained.history.size() > 1 ? 1 : 0; i < trained.history.size(); ++i, ++counted)
    epoch_seconds += trained.history[i].seconds;
  run.train_seconds_per_epoch = counted ? epoch_seconds / static_cast<double>(counted) : 0.0;

  start = std::chrono::steady_clock::now();
  const auto scores = predict<float>(records.test, trained.params);
  run.inference_seconds = detail::seconds_since(start);
  run.model = score_metrics(split_by_label(records.test, scores), config.eval.hits_k);
  return run;
}

/// Runs every seed sequentially and aggregates. Storage is accounted on the
/// first seed's training links.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  const Graph graph = load_dataset(config.dataset);
  ExperimentReport report;
  report.config = config.echo(&graph);
  report.hits_k = config.eval.hits_k;
  for (auto seed : config.runs.seeds) report.runs.push_back(run_seed(graph, config, seed));
  if (!config.eval.heuristics_only) {
    const EdgeSplit split = split_edges(graph, config.split, config.runs.seeds.front());
    report.storage = storage_comparison(split.observed_graph, labeled_links(split.train_pos, split.train_neg),
                                        config.sampling_for(graph));
  }
  return report;
}

inline ExperimentReport run_experiment(const std::filesystem::path& config_path) {
  return run_experiment(ExperimentConfig::load(config_path));
}

// ---------------------------------------------------------------------------
// Timing probe
// ---------------------------------------------------------------------------

struct TimingReport {
  double preprocess_seconds = 0;
  double train_seconds_per_epoch = 0;
  double inference_seconds = 0;
  std::vector<std::uint32_t> probe_hops;
  std::vector<double> probe_preprocess_seconds;
  std::vector<double> probe_seconds_per_record;
  std::vector<std::size_t> probe_record_bytes;
  double inference_ratio = 0;  ///< per-record time at the last probe h over the first
  bool preprocess_grows_with_h = false;

  json to_json() const {
    return {{"timings",
             {{"preprocess_seconds", preprocess_seconds},
              {"train_seconds_per_epoch", train_seconds_per_epoch},
              {"inference_seconds", inference_seconds}}},
            {"independence_probe",
             {{"h", probe_hops},
              {"preprocess_seconds", probe_preprocess_seconds},
              {"inference_seconds_per_record", probe_seconds_per_record},
              {"record_bytes", probe_record_bytes},
              {"inference_ratio", inference_ratio},
              {"preprocess_grows_with_h", preprocess_grows_with_h}}}};
  }
};

struct TimingProbeOptions {
  std::vector<std::uint32_t> hops{1, 3};
  std::size_t probe_links = 256;
  std::size_t repeats = 7;
  double min_seconds_per_trial = 0.05;
  bool train = true;
};

/// Per-record eval-mode inference time over `records`, the minimum of
/// several trials.
inline double time_inference_per_record(std::span<const LinkRecord> records, const ModelParams<float>& params,
                                        std::size_t repeats, double min_seconds) {
  double best = std::numeric_limits<double>::infinity();
  volatile double sink = 0;
  for (std::size_t t = 0; t < repeats; ++t) {
    std::size_t passes = 0;
    const auto start = std::chrono::steady_clock::now();
    double elapsed = 0;
    do {
      const auto scores = predict<float>(records, params);
      sink = sink + scores.front();
      ++passes;
      elapsed = detail::seconds_since(start);
    } while (elapsed < min_seconds);
    best = std::min(best, elapsed / static_cast<double>(passes * records.size()));
  }
  return best;
}

/**
 * Measures preprocess, per-epoch train and test inference time for the first
 * seed, then probes whether per-record inference time depends on the hop
 * count used to build the records.
 */
inline TimingReport timing_probe(const ExperimentConfig& config, const TimingProbeOptions& options = {}) {
  const Graph graph = load_dataset(config.dataset);
  const auto seed = config.runs.seeds.front();
  const EdgeSplit split = split_edges(graph, config.split, seed);
  SamplingOperatorSet sampling = config.sampling_for(graph);
  sampling.walk_seed = seed;
  TimingReport report;

  auto start = std::chrono::steady_clock::now();
  const auto records = detail::precompute_split(split, sampling, config.runs, seed);
  report.preprocess_seconds = detail::seconds_since(start);

  TrainConfig tc = config.training;
  tc.seed = seed;
  tc.pooling = sampling.pooling;
  ModelParams<float> params;
  if (options.train) {
    const auto trained = train(records.train, records.valid, tc);
    params = trained.params;
    double total = 0;
    std::size_t counted = 0;
    for (std::size_t i = trained.history.size() > 1 ? 1 : 0; i < trained.history.size(); ++i, ++counted)
      total += trained.history[i].seconds;
    report.train_seconds_per_epoch = counted ? total / static_cast<double>(counted) : 0.0;
  } else {
    params = ModelParams<float>::init(static_cast<std::size_t>(records.train.front().num_operators) *
                                          records.train.front().block_width,
                                      tc.hidden, tc.pooling, tc.agg, seed);
  }
  start = std::chrono::steady_clock::now();
  predict<float>(records.test, params);
  report.inference_seconds = detail::seconds_since(start);

  auto probe_links = labeled_links(split.test_pos, split.test_neg);
  if (probe_links.size() > options.probe_links) probe_links.resize(options.probe_links);
  for (auto h : options.hops) {
    SamplingOperatorSet s = sampling;
    s.h = h;
    start = std::chrono::steady_clock::now();
    const auto probe = build_records(split.observed_graph, probe_links, s, config.runs.workers);
    report.probe_hops.push_back(h);
    report.probe_preprocess_seconds.push_back(detail::seconds_since(start));
    std::size_t bytes = 0;
    for (const auto& r : probe) bytes += r.byte_size();
    report.probe_record_bytes.push_back(bytes);
    report.probe_seconds_per_record.push_back(
        time_inference_per_record(probe, params, options.repeats, options.min_seconds_per_trial));
  }
  report.inference_ratio = report.probe_seconds_per_record.back() / report.probe_seconds_per_record.front();
  report.preprocess_grows_with_h = report.probe_preprocess_seconds.back() > report.probe_preprocess_seconds.front();
  return report;
}

}  // namespace s3grl
