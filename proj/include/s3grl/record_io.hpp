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

// Record file layout (all integers and floats little-endian):
//
//   "S3GR" | version u16
//   per record: u u32 | v u32 | label u8 | p u16 | r_plus_1 u16 | w u32 |
//               p x u32 pooled global ids | r_plus_1 * p * w float32
//
// A JSON manifest with the config echo, counts and checksum sits next to the
// record file as "<file>.json".

#pragma once

#include <atomic>
#include <bit>
#include <chrono>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "s3grl/common.hpp"
#include "s3grl/diffusion.hpp"
#include "s3grl/graph.hpp"
#include "s3grl/sampling.hpp"

namespace s3grl {

inline constexpr char kRecordMagic[4] = {'S', '3', 'G', 'R'};
inline constexpr std::uint16_t kRecordVersion = 1;
inline constexpr std::size_t kFileHeaderBytes = 6;

namespace detail {

inline void put_u8(std::vector<std::uint8_t>& out, std::uint8_t x) { out.push_back(x); }
inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t x) {
  out.push_back(static_cast<std::uint8_t>(x));
  out.push_back(static_cast<std::uint8_t>(x >> 8));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}
inline void put_f32(std::vector<std::uint8_t>& out, float x) { put_u32(out, std::bit_cast<std::uint32_t>(x)); }

inline std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_record(const LinkRecord& r) {
  std::vector<std::uint8_t> out;
  out.reserve(r.byte_size());
  detail::put_u32(out, r.u);
  detail::put_u32(out, r.v);
  detail::put_u8(out, r.label);
  detail::put_u16(out, static_cast<std::uint16_t>(r.pooled_count()));
  detail::put_u16(out, r.num_operators);
  detail::put_u32(out, r.block_width);
  for (NodeId id : r.pooled_ids) detail::put_u32(out, id);
  for (float x : r.values) detail::put_f32(out, x);
  return out;
}

struct RecordFileSummary {
  std::size_t records = 0;
  std::size_t positives = 0;
  std::size_t total_bytes = 0;
  std::size_t p_max = 0;
  std::size_t block_width = 0;
  std::size_t num_operators = 0;
  std::uint64_t checksum = 0;
};

/// Streams records to a file in call order.
class RecordWriter {
 public:
  explicit RecordWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write record file " + path.string());
    std::vector<std::uint8_t> header(kRecordMagic, kRecordMagic + 4);
    detail::put_u16(header, kRecordVersion);
    emit(header);
  }

  void write(const LinkRecord& record) {
    if (summary_.records > 0 && (record.block_width != summary_.block_width ||
                                 record.num_operators != summary_.num_operators))
      throw Error("record layout differs from earlier records in " + path_.string());
    summary_.block_width = record.block_width;
    summary_.num_operators = record.num_operators;
    summary_.p_max = std::max(summary_.p_max, record.pooled_count());
    summary_.positives += record.label ? 1 : 0;
    ++summary_.records;
    emit(encode_record(record));
  }

  RecordFileSummary finish() {
    out_.flush();
    if (!out_) throw Error("I/O error while writing " + path_.string());
    out_.close();
    summary_.checksum = hash_.digest();
    return summary_;
  }

 private:
  void emit(const std::vector<std::uint8_t>& bytes) {
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    hash_.update(bytes);
    summary_.total_bytes += bytes.size();
  }

  std::filesystem::path path_;
  std::ofstream out_;
  Fnv1a64 hash_;
  RecordFileSummary summary_;
};

inline std::filesystem::path manifest_path(const std::filesystem::path& record_file) {
  return record_file.string() + ".json";
}

/**
 * Sequential and random-access reader. The constructor scans record headers
 * once to build an offset index; read() is safe to call from several threads.
 */
class RecordReader {
 public:
  explicit RecordReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error("cannot open record file " + path.string());
    std::uint8_t header[kFileHeaderBytes];
    if (!read_exact(0, header, sizeof header) || std::memcmp(header, kRecordMagic, 4) != 0)
      throw Error(path.string() + " is not a record file (bad magic)");
    if (detail::get_u16(header + 4) != kRecordVersion)
      throw Error(path.string() + ": unsupported record version " + std::to_string(detail::get_u16(header + 4)));
    in_.seekg(0, std::ios::end);
    const auto file_size = static_cast<std::size_t>(in_.tellg());
    std::size_t offset = kFileHeaderBytes;
    std::uint8_t rec[kRecordHeaderBytes];
    while (offset < file_size) {
      if (!read_exact(offset, rec, sizeof rec)) throw Error(path.string() + ": truncated record header");
      const std::size_t size = record_byte_size(detail::get_u16(rec + 9), detail::get_u16(rec + 11),
                                                detail::get_u32(rec + 13));
      if (offset + size > file_size) throw Error(path.string() + ": truncated record payload");
      offsets_.push_back(offset);
      offset += size;
    }
    offsets_.push_back(offset);
  }

  std::size_t size() const noexcept { return offsets_.size() - 1; }

  LinkRecord read(std::size_t index) const {
    if (index >= size()) throw Error("record index " + std::to_string(index) + " out of range");
    std::vector<std::uint8_t> buf(offsets_[index + 1] - offsets_[index]);
    if (!read_exact(offsets_[index], buf.data(), buf.size())) throw Error(path_.string() + ": read failed");
    return decode(buf.data());
  }

  std::vector<LinkRecord> read_all() const {
    std::vector<LinkRecord> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(read(i));
    return out;
  }

  /// Checksum over the whole file, as stored in the manifest.
  std::uint64_t checksum() const {
    Fnv1a64 hash;
    std::vector<std::uint8_t> buf(1 << 20);
    std::size_t offset = 0;
    const std::size_t total = offsets_.back();
    while (offset < total) {
      const std::size_t n = std::min(buf.size(), total - offset);
      if (!read_exact(offset, buf.data(), n)) throw Error(path_.string() + ": read failed");
      hash.update({buf.data(), n});
      offset += n;
    }
    return hash.digest();
  }

  /// Throws if the sidecar manifest disagrees with the file contents.
  void verify_manifest() const {
    std::ifstream in(manifest_path(path_));
    if (!in) throw Error("missing manifest for " + path_.string());
    const auto manifest = nlohmann::json::parse(in);
    if (manifest.at("counts").at("records").get<std::size_t>() != size())
      throw Error("manifest mismatch for " + path_.string() + ": record count differs");
    if (manifest.at("checksum").get<std::string>() != "fnv1a64:" + to_hex(checksum()))
      throw Error("manifest mismatch for " + path_.string() + ": checksum differs");
  }

 private:
  static LinkRecord decode(const std::uint8_t* p) {
    LinkRecord r;
    r.u = detail::get_u32(p);
    r.v = detail::get_u32(p + 4);
    r.label = p[8];
    const std::size_t pooled = detail::get_u16(p + 9);
    r.num_operators = detail::get_u16(p + 11);
    r.block_width = detail::get_u32(p + 13);
    p += kRecordHeaderBytes;
    r.pooled_ids.resize(pooled);
    for (auto& id : r.pooled_ids) {
      id = detail::get_u32(p);
      p += 4;
    }
    r.values.resize(r.num_operators * pooled * r.block_width);
    for (auto& x : r.values) {
      x = std::bit_cast<float>(detail::get_u32(p));
      p += 4;
    }
    return r;
  }

  bool read_exact(std::size_t offset, std::uint8_t* dst, std::size_t n) const {
    std::lock_guard lock(mutex_);
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount()) == n;
  }

  std::filesystem::path path_;
  mutable std::ifstream in_;
  mutable std::mutex mutex_;
  std::vector<std::size_t> offsets_;
};

// ---------------------------------------------------------------------------
// Dataset precompute
// ---------------------------------------------------------------------------

struct DatasetStats {
  std::size_t records = 0;
  std::size_t total_bytes = 0;
  double wall_seconds = 0;
  double records_per_second = 0;
  std::uint64_t checksum = 0;
  std::size_t p_max = 0;
  std::size_t block_width = 0;
};

/// Builds records for links[begin, end) on `workers` threads; output order
/// matches input order.
inline std::vector<LinkRecord> build_records(const Graph& graph, std::span<const LabeledLink> links,
                                             const SamplingOperatorSet& config, std::size_t workers,
                                             GraphPowerCache* powers = nullptr) {
  config.validate();
  std::vector<LinkRecord> out(links.size());
  GraphPowerCache local_cache(graph);
  GraphPowerCache& cache = powers ? *powers : local_cache;
  if (config.variant == Variant::SoP)
    for (std::uint32_t i = 2; i <= config.r; ++i) cache.get(i);

  workers = std::max<std::size_t>(1, std::min(workers, links.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < links.size(); ++i) out[i] = build_link_record(graph, links[i], config, &cache);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < links.size(); i = next++)
          out[i] = build_link_record(graph, links[i], config, &cache);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

/**
 * Precomputes every link into `out_path` and writes the JSON manifest next to
 * it. The file is byte-identical for any worker count.
 */
inline DatasetStats precompute_dataset(const Graph& graph, std::span<const LabeledLink> links,
                                       const SamplingOperatorSet& config, const std::filesystem::path& out_path,
                                       std::size_t workers = 1, const nlohmann::json& extra = {}) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  RecordWriter writer(out_path);
  GraphPowerCache cache(graph);
  const std::size_t chunk = 256 * std::max<std::size_t>(1, workers);
  for (std::size_t begin = 0; begin < links.size(); begin += chunk) {
    const std::size_t end = std::min(links.size(), begin + chunk);
    for (const auto& record : build_records(graph, links.subspan(begin, end - begin), config, workers, &cache))
      writer.write(record);
  }
  const auto summary = writer.finish();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json manifest = {
      {"format", "S3GR"},
      {"version", kRecordVersion},
      {"config", config},
      {"counts",
       {{"records", summary.records},
        {"positives", summary.positives},
        {"negatives", summary.records - summary.positives}}},
      {"w", config.block_width(graph)},
      {"p_max", summary.p_max},
      {"r_plus_1", config.r + 1},
      {"total_bytes", summary.total_bytes},
      {"checksum", "fnv1a64:" + to_hex(summary.checksum)},
  };
  if (!extra.is_null()) manifest["extra"] = extra;
  std::ofstream mf(manifest_path(out_path));
  if (!mf) throw Error("cannot write manifest for " + out_path.string());
  mf << manifest.dump(2) << '\n';

  DatasetStats stats;
  stats.records = summary.records;
  stats.total_bytes = summary.total_bytes;
  stats.wall_seconds = seconds;
  stats.records_per_second = seconds > 0 ? static_cast<double>(summary.records) / seconds : 0.0;
  stats.checksum = summary.checksum;
  stats.p_max = summary.p_max;
  stats.block_width = config.block_width(graph);
  return stats;
}

// ---------------------------------------------------------------------------
// Storage accounting
// ---------------------------------------------------------------------------

struct StorageReport {
  std::size_t links = 0;
  std::size_t record_bytes = 0;  ///< record file size, header included
  std::size_t seal_bytes = 0;    ///< SEAL-style subgraph store estimate
  double reduction_percent = 0;  ///< (seal - record) / seal * 100, unclamped
};

/**
 * Compares the record file size against storing every link's h-hop subgraph
 * explicitly: two 4-byte ids per subgraph edge plus w 4-byte reals per node.
 */
inline StorageReport storage_comparison(const Graph& graph, std::span<const LabeledLink> links,
                                        const SamplingOperatorSet& config) {
  config.validate();
  StorageReport report;
  report.links = links.size();
  report.record_bytes = kFileHeaderBytes;
  const std::size_t w = config.block_width(graph);
  for (const auto& link : links) {
    const auto pooled = pooled_nodes(graph, link.u, link.v, config).size();
    report.record_bytes += record_byte_size(pooled, config.r + 1, w);
    const auto sub = extract_h_hop(graph, link.u, link.v, config.h);
    report.seal_bytes += sub.local.num_edges() * 2 * 4 + sub.size() * w * 4;
  }
  report.reduction_percent =
      report.seal_bytes == 0
          ? 0.0
          : (static_cast<double>(report.seal_bytes) - static_cast<double>(report.record_bytes)) /
                static_cast<double>(report.seal_bytes) * 100.0;
  return report;
}

inline nlohmann::json to_json(const StorageReport& s) {
  return {{"links", s.links},
          {"record_bytes", s.record_bytes},
          {"seal_estimate_bytes", s.seal_bytes},
          {"reduction_percent", s.reduction_percent}};
}

}  // namespace s3grl
