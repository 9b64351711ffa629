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

#include <fstream>
#include <thread>

#include "oracles.hpp"
#include "temp_dir.hpp"

namespace s3grl {
namespace {

using testutil::TempDir;

std::vector<LabeledLink> some_links(const Graph& g, std::size_t count, Rng& rng) {
  std::vector<LabeledLink> out;
  while (out.size() < count) {
    const auto u = static_cast<NodeId>(rng.below(g.num_nodes()));
    const auto v = static_cast<NodeId>(rng.below(g.num_nodes()));
    if (u != v) out.push_back({u, v, static_cast<std::uint8_t>(g.has_edge(u, v) ? 1 : 0)});
  }
  return out;
}

TEST(RecordFile, EmptyDatasetHasHeaderOnly) {
  TempDir dir;
  Rng rng(51);
  const auto g = oracle::random_graph(10, 0.3, rng);
  const auto stats = precompute_dataset(g, {}, SamplingOperatorSet{}, dir / "empty.s3gr");
  EXPECT_EQ(stats.records, 0U);
  EXPECT_EQ(stats.total_bytes, kFileHeaderBytes);
  EXPECT_EQ(std::filesystem::file_size(dir / "empty.s3gr"), kFileHeaderBytes);
  const RecordReader reader(dir / "empty.s3gr");
  EXPECT_EQ(reader.size(), 0U);
  EXPECT_NO_THROW(reader.verify_manifest());
}

TEST(RecordFile, TotalBytesFollowFormatArithmetic) {
  TempDir dir;
  Rng rng(52);
  const auto g = oracle::random_graph(40, 0.1, rng, 6);
  const auto links = some_links(g, 37, rng);
  SamplingOperatorSet cfg;
  const auto stats = precompute_dataset(g, links, cfg, dir / "d.s3gr");
  const std::size_t w = 2 + 6;
  const std::size_t per_record = kRecordHeaderBytes + 2 * 4 + (cfg.r + 1) * 2 * w * 4;
  EXPECT_EQ(stats.total_bytes, kFileHeaderBytes + links.size() * per_record);
  EXPECT_EQ(std::filesystem::file_size(dir / "d.s3gr"), stats.total_bytes);
  EXPECT_EQ(stats.block_width, w);
}

TEST(RecordFile, RoundTripIsBitIdentical) {
  TempDir dir;
  Rng rng(53);
  const auto g = oracle::random_graph(40, 0.12, rng, 3);
  const auto links = some_links(g, 50, rng);
  for (auto variant : {Variant::PoS, Variant::PoSPlus, Variant::SoP}) {
    SamplingOperatorSet cfg;
    cfg.variant = variant;
    cfg.pooling = default_pooling(variant);
    cfg.labeling = LabelScheme::DRNL;
    const auto records = build_records(g, links, cfg, 1);
    precompute_dataset(g, links, cfg, dir / "rt.s3gr");
    const RecordReader reader(dir / "rt.s3gr");
    ASSERT_EQ(reader.size(), records.size());
    const auto back = reader.read_all();
    for (std::size_t i = 0; i < records.size(); ++i) {
      EXPECT_EQ(back[i], records[i]);
      EXPECT_EQ(encode_record(back[i]), encode_record(records[i]));
    }
    EXPECT_EQ(reader.read(7), records[7]);
  }
}

TEST(RecordFile, WorkerCountDoesNotChangeBytes) {
  TempDir dir;
  Rng rng(54);
  const auto g = oracle::random_graph(80, 0.06, rng, 4);
  const auto links = some_links(g, 600, rng);
  for (auto variant : {Variant::PoS, Variant::SoP, Variant::PoSPlusScaLed}) {
    SamplingOperatorSet cfg;
    cfg.variant = variant;
    cfg.pooling = default_pooling(variant);
    const auto one = precompute_dataset(g, links, cfg, dir / "w1.s3gr", 1);
    const auto four = precompute_dataset(g, links, cfg, dir / "w4.s3gr", 4);
    EXPECT_EQ(one.checksum, four.checksum) << to_string(variant);
    EXPECT_EQ(testutil::slurp(dir / "w1.s3gr"), testutil::slurp(dir / "w4.s3gr"));
    EXPECT_EQ(RecordReader(dir / "w4.s3gr").checksum(), one.checksum);
  }
}

TEST(RecordFile, ManifestDescribesFile) {
  TempDir dir;
  Rng rng(55);
  const auto g = oracle::random_graph(30, 0.15, rng);
  const auto links = some_links(g, 20, rng);
  SamplingOperatorSet cfg;
  cfg.variant = Variant::PoSPlus;
  cfg.pooling = Pooling::CCN;
  const auto stats = precompute_dataset(g, links, cfg, dir / "m.s3gr", 1, {{"seed", 4}});
  const auto m = nlohmann::json::parse(testutil::slurp(manifest_path(dir / "m.s3gr")));
  EXPECT_EQ(m["counts"]["records"], 20);
  EXPECT_EQ(m["w"], 3);
  EXPECT_EQ(m["r_plus_1"], 4);
  EXPECT_EQ(m["p_max"], stats.p_max);
  EXPECT_EQ(m["config"]["variant"], "PoSPlus");
  EXPECT_EQ(m["config"]["ccn_cap"], 128);
  EXPECT_EQ(m["extra"]["seed"], 4);
  EXPECT_EQ(m["checksum"], "fnv1a64:" + to_hex(stats.checksum));
}

TEST(RecordFile, TamperedFileFailsManifestCheck) {
  TempDir dir;
  Rng rng(56);
  const auto g = oracle::random_graph(30, 0.15, rng);
  const auto links = some_links(g, 10, rng);
  precompute_dataset(g, links, SamplingOperatorSet{}, dir / "t.s3gr");
  {
    std::fstream f(dir / "t.s3gr", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(static_cast<std::streamoff>(kFileHeaderBytes + kRecordHeaderBytes + 8 + 3));
    f.put('\x7f');
  }
  try {
    RecordReader(dir / "t.s3gr").verify_manifest();
    FAIL() << "expected a manifest mismatch";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("manifest mismatch"), std::string::npos);
  }
  std::filesystem::remove(manifest_path(dir / "t.s3gr"));
  EXPECT_THROW(RecordReader(dir / "t.s3gr").verify_manifest(), Error);
}

TEST(RecordFile, RejectsBadMagicVersionAndTruncation) {
  TempDir dir;
  EXPECT_THROW(RecordReader(dir.write("bad.s3gr", "NOPE\x01\x00")), Error);
  EXPECT_THROW(RecordReader(dir.write("ver.s3gr", std::string("S3GR\x09\x00", 6))), Error);
  Rng rng(57);
  const auto g = oracle::random_graph(20, 0.2, rng);
  precompute_dataset(g, some_links(g, 3, rng), SamplingOperatorSet{}, dir / "ok.s3gr");
  const auto bytes = testutil::slurp(dir / "ok.s3gr");
  dir.write("cut.s3gr", bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(RecordReader(dir / "cut.s3gr"), Error);
  EXPECT_THROW(RecordReader(dir / "absent.s3gr"), Error);
}

TEST(RecordFile, WriterRejectsMixedLayouts) {
  TempDir dir;
  RecordWriter writer(dir / "x.s3gr");
  Rng rng(58);
  writer.write(oracle::random_record(2, 4, 3, rng, 1));
  EXPECT_THROW(writer.write(oracle::random_record(2, 4, 5, rng, 1)), Error);
}

TEST(RecordFile, ConcurrentRandomReads) {
  TempDir dir;
  Rng rng(59);
  const auto g = oracle::random_graph(50, 0.1, rng, 2);
  const auto links = some_links(g, 200, rng);
  const auto records = build_records(g, links, SamplingOperatorSet{}, 1);
  precompute_dataset(g, links, SamplingOperatorSet{}, dir / "c.s3gr");
  const RecordReader reader(dir / "c.s3gr");
  std::atomic<int> mismatches{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (std::size_t i = static_cast<std::size_t>(t); i < records.size(); i += 4)
        if (!(reader.read(i) == records[i])) ++mismatches;
    });
  for (auto& th : threads) th.join();
  EXPECT_EQ(mismatches.load(), 0);
}

TEST(StorageComparison, IsolatedPairsGiveNegativeReduction) {
  // Perfect matching: every 2-hop subgraph of a matched pair is just {u, v}.
  std::vector<Edge> e;
  for (NodeId i = 0; i < 20; i += 2) e.push_back({i, i + 1});
  const auto g = Graph::from_edges(20, e);
  std::vector<LabeledLink> links;
  for (NodeId i = 0; i < 20; i += 2) links.push_back({i, i + 1, 1});
  const auto report = storage_comparison(g, links, SamplingOperatorSet{});
  EXPECT_LT(report.reduction_percent, 0.0);
  EXPECT_EQ(report.seal_bytes, links.size() * (2 * 3 * 4));
  EXPECT_EQ(report.record_bytes, kFileHeaderBytes + links.size() * record_byte_size(2, 4, 3));
}

TEST(StorageComparison, DenseGraphReducesStrongly) {
  Rng rng(60);
  const auto g = oracle::random_graph(300, 0.1, rng);
  const auto links = some_links(g, 40, rng);
  SamplingOperatorSet cfg;
  cfg.h = 2;
  const auto report = storage_comparison(g, links, cfg);
  EXPECT_GE(report.reduction_percent, 99.0);
}

TEST(StorageComparison, MatchesActualFileSize) {
  TempDir dir;
  Rng rng(61);
  const auto g = oracle::random_graph(60, 0.1, rng, 5);
  const auto links = some_links(g, 30, rng);
  SamplingOperatorSet cfg;
  cfg.variant = Variant::PoSPlus;
  cfg.pooling = Pooling::CCN;
  const auto stats = precompute_dataset(g, links, cfg, dir / "s.s3gr");
  EXPECT_EQ(storage_comparison(g, links, cfg).record_bytes, stats.total_bytes);
}

}  // namespace
}  // namespace s3grl
