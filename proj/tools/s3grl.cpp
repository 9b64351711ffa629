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


// Command-line driver: split, precompute, train, eval, bench, heuristics and
// storage, all driven by one JSON experiment config.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "s3grl/s3grl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts, const std::string& out_help) {
  cmd->add_option("-c,--config", opts.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("-s,--seed", opts.seed, "seed to use instead of the config's seed list");
  cmd->add_option("-w,--workers", opts.workers, "precompute worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("-o,--out", opts.out, out_help);
}

s3grl::ExperimentConfig load_config(const CommonOptions& opts) {
  auto config = s3grl::ExperimentConfig::load(opts.config);
  if (opts.seed) config.runs.seeds = {*opts.seed};
  if (opts.workers) config.runs.workers = *opts.workers;
  return config;
}

/// Refuses to write over any input dataset file.
void guard_output(const s3grl::ExperimentConfig& config, const fs::path& out) {
  auto same = [&](const fs::path& input) {
    std::error_code ec;
    return fs::exists(out) && fs::equivalent(out, input, ec);
  };
  if (same(config.dataset.edges) || (config.dataset.features && same(*config.dataset.features)))
    throw s3grl::Error("refusing to overwrite input dataset file " + out.string());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw s3grl::Error("cannot write " + path.string());
  out << text;
}

/// Writes <out> as JSON plus .txt and .csv siblings when out is set.
void emit_report(const s3grl::ExperimentConfig& config, const fs::path& out, const json& report,
                 const std::string& table, const std::string& csv) {
  std::cout << table;
  if (out.empty()) return;
  guard_output(config, out);
  write_text(out, report.dump(2) + "\n");
  auto sibling = out;
  write_text(sibling.replace_extension(".txt"), table);
  if (!csv.empty()) write_text(sibling.replace_extension(".csv"), csv);
  std::cerr << "wrote " << out.string() << "\n";
}

struct SplitData {
  s3grl::Graph graph;
  s3grl::EdgeSplit split;
  s3grl::SamplingOperatorSet sampling;
};

SplitData prepare(const s3grl::ExperimentConfig& config, std::uint64_t seed) {
  SplitData d{s3grl::load_dataset(config.dataset), {}, {}};
  d.split = s3grl::split_edges(d.graph, config.split, seed);
  d.sampling = config.sampling_for(d.graph);
  d.sampling.walk_seed = seed;
  return d;
}

/// Records for one split: read from a precompute directory or built in memory.
std::vector<s3grl::LinkRecord> split_records(const SplitData& d, const std::string& records_dir,
                                             const std::string& which, std::size_t workers) {
  if (!records_dir.empty()) {
    s3grl::RecordReader reader(fs::path(records_dir) / (which + ".s3gr"));
    reader.verify_manifest();
    return reader.read_all();
  }
  const auto& s = d.split;
  const auto links = which == "train"   ? s3grl::labeled_links(s.train_pos, s.train_neg)
                     : which == "valid" ? s3grl::labeled_links(s.valid_pos, s.valid_neg)
                                        : s3grl::labeled_links(s.test_pos, s.test_neg);
  return s3grl::build_records(s.observed_graph, links, d.sampling, workers);
}

int cmd_split(const CommonOptions& opts) {
  const auto config = load_config(opts);
  const auto seed = config.runs.seeds.front();
  const auto d = prepare(config, seed);
  const fs::path dir = opts.out.empty() ? fs::path("split_seed" + std::to_string(seed)) : fs::path(opts.out);
  guard_output(config, dir);
  s3grl::save_split(d.split, dir);
  s3grl::write_edge_list(d.split.observed_graph, dir / "observed.txt");
  std::cout << s3grl::split_manifest(d.split).dump(2) << "\n";
  return 0;
}

int cmd_precompute(const CommonOptions& opts) {
  const auto config = load_config(opts);
  const auto seed = config.runs.seeds.front();
  const auto d = prepare(config, seed);
  const fs::path dir = opts.out.empty() ? fs::path("records_seed" + std::to_string(seed)) : fs::path(opts.out);
  guard_output(config, dir);
  const json extra = {{"seed", seed}, {"experiment", config.echo(&d.graph)}};
  json summary = json::object();
  const auto& s = d.split;
  const std::pair<std::string, std::vector<s3grl::LabeledLink>> parts[] = {
      {"train", s3grl::labeled_links(s.train_pos, s.train_neg)},
      {"valid", s3grl::labeled_links(s.valid_pos, s.valid_neg)},
      {"test", s3grl::labeled_links(s.test_pos, s.test_neg)}};
  for (const auto& [name, links] : parts) {
    const auto stats =
        s3grl::precompute_dataset(s.observed_graph, links, d.sampling, dir / (name + ".s3gr"), config.runs.workers, extra);
    summary[name] = {{"records", stats.records},
                     {"bytes", stats.total_bytes},
                     {"p_max", stats.p_max},
                     {"block_width", stats.block_width},
                     {"records_per_second", stats.records_per_second},
                     {"checksum", "fnv1a64:" + s3grl::to_hex(stats.checksum)}};
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_train(const CommonOptions& opts, const std::string& records_dir) {
  const auto config = load_config(opts);
  const auto seed = config.runs.seeds.front();
  const auto d = prepare(config, seed);
  const auto train_set = split_records(d, records_dir, "train", config.runs.workers);
  const auto valid_set = split_records(d, records_dir, "valid", config.runs.workers);
  auto tc = config.training;
  tc.seed = seed;
  tc.pooling = d.sampling.pooling;
  const auto result = s3grl::train(train_set, valid_set, tc);
  std::cout << "epoch  train_loss  valid_auc  seconds\n";
  for (const auto& e : result.history)
    std::printf("%5zu  %10.5f  %9.2f  %7.3f\n", e.epoch, e.train_loss, e.valid_auc * 100.0, e.seconds);
  std::cout << "best epoch " << result.best_epoch << " valid AUC " << result.best_valid_auc * 100.0 << "\n";
  const fs::path out = opts.out.empty() ? fs::path("model_seed" + std::to_string(seed) + ".ckpt") : fs::path(opts.out);
  guard_output(config, out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  s3grl::save_checkpoint(out, result.params,
                         {{"seed", seed}, {"best_epoch", result.best_epoch}, {"experiment", config.echo(&d.graph)}});
  std::cerr << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_eval(const CommonOptions& opts, const std::string& records_dir, const std::string& checkpoint) {
  const auto config = load_config(opts);
  const auto seed = config.runs.seeds.front();
  const auto d = prepare(config, seed);
  const auto params = s3grl::load_checkpoint(checkpoint);
  const auto test_set = split_records(d, records_dir, "test", config.runs.workers);
  const auto scores = s3grl::predict<float>(test_set, params);
  const auto metrics = s3grl::score_metrics(s3grl::split_by_label(test_set, scores), config.eval.hits_k);
  const json report = {{"config", config.echo(&d.graph)},
                       {"seed", seed},
                       {"checkpoint", checkpoint},
                       {"test", s3grl::to_json(metrics, config.eval.hits_k)}};
  std::ostringstream table;
  table << std::fixed << std::setprecision(2) << "AUC " << metrics.auc * 100.0 << "  HR@" << config.eval.hits_k << ' '
        << (metrics.hits ? std::to_string(*metrics.hits * 100.0) : std::string("n/a")) << "  MRR "
        << metrics.mrr * 100.0 << "\n";
  emit_report(config, opts.out, report, table.str(), "");
  return 0;
}

int cmd_bench(const CommonOptions& opts, bool timing) {
  const auto config = load_config(opts);
  if (timing) {
    const auto t = s3grl::timing_probe(config);
    const json report = {{"config", config.echo()}, {"timing", t.to_json()}};
    std::ostringstream table;
    table << std::setprecision(4) << "preprocess_s " << t.preprocess_seconds << "\ntrain_s_per_epoch "
          << t.train_seconds_per_epoch << "\ninference_s " << t.inference_seconds << "\n";
    for (std::size_t i = 0; i < t.probe_hops.size(); ++i)
      table << "h=" << t.probe_hops[i] << " record_bytes " << t.probe_record_bytes[i] << " inference_s_per_record "
            << t.probe_seconds_per_record[i] << "\n";
    table << "inference_ratio " << t.inference_ratio << "\n";
    emit_report(config, opts.out, report, table.str(), "");
    return 0;
  }
  const auto report = s3grl::run_experiment(config);
  emit_report(config, opts.out, report.to_json(), report.text_table(), report.csv());
  return 0;
}

int cmd_heuristics(const CommonOptions& opts) {
  auto config = load_config(opts);
  config.eval.heuristics_only = true;
  const auto report = s3grl::run_experiment(config);
  emit_report(config, opts.out, report.to_json(), report.text_table(), report.csv());
  return 0;
}

int cmd_storage(const CommonOptions& opts, const std::vector<std::uint32_t>& hops) {
  const auto config = load_config(opts);
  const auto seed = config.runs.seeds.front();
  const auto d = prepare(config, seed);
  const auto links = s3grl::labeled_links(d.split.train_pos, d.split.train_neg);
  json rows = json::array();
  std::ostringstream table;
  table << std::left << std::setw(4) << "h" << std::right << std::setw(16) << "record_bytes" << std::setw(16)
        << "seal_bytes" << std::setw(12) << "reduction" << "\n";
  std::ostringstream csv;
  csv << "h,record_bytes,seal_estimate_bytes,reduction_percent\n";
  const std::vector<std::uint32_t> hs = hops.empty() ? std::vector<std::uint32_t>{d.sampling.h} : hops;
  for (auto h : hs) {
    auto sampling = d.sampling;
    sampling.h = h;
    const auto s = s3grl::storage_comparison(d.split.observed_graph, links, sampling);
    json row = s3grl::to_json(s);
    row["h"] = h;
    rows.push_back(row);
    table << std::left << std::setw(4) << h << std::right << std::setw(16) << s.record_bytes << std::setw(16)
          << s.seal_bytes << std::setw(11) << std::fixed << std::setprecision(2) << s.reduction_percent << "%\n";
    csv << h << ',' << s.record_bytes << ',' << s.seal_bytes << ',' << s.reduction_percent << "\n";
  }
  emit_report(config, opts.out, {{"config", config.echo(&d.graph)}, {"seed", seed}, {"storage", rows}}, table.str(),
              csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"s3grl: scalable subgraph link prediction"};
  app.require_subcommand(1);

  CommonOptions split_opts, pre_opts, train_opts, eval_opts, bench_opts, heur_opts, storage_opts;
  std::string train_records, eval_records, checkpoint;
  bool timing = false;
  std::vector<std::uint32_t> storage_hops;

  auto* split = app.add_subcommand("split", "write train/valid/test edge splits");
  add_common(split, split_opts, "output directory");
  auto* pre = app.add_subcommand("precompute", "write record files for one seed's splits");
  add_common(pre, pre_opts, "output directory");
  auto* tr = app.add_subcommand("train", "train the head and write a checkpoint");
  add_common(tr, train_opts, "checkpoint path");
  tr->add_option("--records", train_records, "precompute directory to read instead of building in memory")
      ->check(CLI::ExistingDirectory);
  auto* ev = app.add_subcommand("eval", "score the test split with a checkpoint");
  add_common(ev, eval_opts, "report path (JSON)");
  ev->add_option("--checkpoint", checkpoint, "checkpoint from train")->required()->check(CLI::ExistingFile);
  ev->add_option("--records", eval_records, "precompute directory to read instead of building in memory")
      ->check(CLI::ExistingDirectory);
  auto* bench = app.add_subcommand("bench", "run every seed and report aggregate metrics");
  add_common(bench, bench_opts, "report path (JSON; .txt and .csv written alongside)");
  bench->add_flag("--timing", timing, "run the timing probe instead of the full experiment");
  auto* heur = app.add_subcommand("heuristics", "CN, AA and PPR baselines only");
  add_common(heur, heur_opts, "report path (JSON; .txt and .csv written alongside)");
  auto* storage = app.add_subcommand("storage", "record size against an explicit subgraph store");
  add_common(storage, storage_opts, "report path (JSON; .txt and .csv written alongside)");
  storage->add_option("--hops", storage_hops, "hop counts to compare (default: the config's h)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*split) return cmd_split(split_opts);
    if (*pre) return cmd_precompute(pre_opts);
    if (*tr) return cmd_train(train_opts, train_records);
    if (*ev) return cmd_eval(eval_opts, eval_records, checkpoint);
    if (*bench) return cmd_bench(bench_opts, timing);
    if (*heur) return cmd_heuristics(heur_opts);
    if (*storage) return cmd_storage(storage_opts, storage_hops);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
