// Copyright 2026 The FuzzSplore Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzsplore/testcase.hpp"

namespace fuzzsplore {

inline constexpr std::size_t kDefaultMapSize = 65536;

using EdgeIndex = std::uint32_t;
using HitCount = std::uint8_t;

struct EdgeHit {
  EdgeIndex index;
  HitCount count;

  friend bool operator==(const EdgeHit&, const EdgeHit&) = default;
};

/// Sparse edge -> hitcount map of fixed width. Absent indices have count 0;
/// stored entries are kept sorted by index and never hold a zero count.
class HitcountVector {
 public:
  explicit HitcountVector(std::size_t map_size = kDefaultMapSize);

  /// Builds a vector from (index, count) pairs in any order. Zero counts are
  /// dropped. Throws IndexOutOfRange for index >= map_size and
  /// CoverageMalformed for a repeated index.
  static HitcountVector from_entries(std::size_t map_size,
                                     std::vector<EdgeHit> entries);

  std::size_t map_size() const noexcept { return map_size_; }
  std::span<const EdgeHit> entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  HitCount get(EdgeIndex index) const;
  void set(EdgeIndex index, HitCount count);

  friend bool operator==(const HitcountVector&, const HitcountVector&) = default;

 private:
  std::size_t map_size_;
  std::vector<EdgeHit> entries_;
};

// Coverage wire format: one `edge_index:count` per line, decimal, blank lines
// ignored, `#` starts a comment line.
HitcountVector parse_coverage(std::string_view text, std::size_t map_size);
std::string format_coverage(const HitcountVector& v);
HitcountVector read_coverage_file(const std::filesystem::path& path,
                                  std::size_t map_size);

enum class Bucketing { AflBuckets, Raw };

/// AFL hitcount class of a single count: 1, 2, 3 -> 4, 4..7 -> 8, 8..15 -> 16,
/// 16..31 -> 32, 32..127 -> 64, 128..255 -> 128.
HitCount bucket_count(HitCount count) noexcept;

HitcountVector classify_counts(const HitcountVector& v, Bucketing mode);

struct MergeResult {
  HitcountVector merged;
  bool is_interesting = false;
};

/// Elementwise maximum, interesting iff some v[i] > acc[i].
MergeResult merge_coverage(const HitcountVector& acc, const HitcountVector& v);

/// In-place form of merge_coverage; returns is_interesting.
bool merge_into(HitcountVector& acc, const HitcountVector& v);

std::size_t count_not_zeros(const HitcountVector& v) noexcept;

enum class ExecutorKind { Command, Replay };

struct ExecutorSpec {
  ExecutorKind kind = ExecutorKind::Replay;
  // command: `@@` is replaced by the input path, COV_OUT names the file the
  // command must write its coverage to.
  std::vector<std::string> argv_template;
  std::chrono::milliseconds timeout{5000};
  // replay: <coverage_dir>/<fuzzer_id>/<tc_id>.cov
  std::filesystem::path coverage_dir;
  // Optional declared map size; must agree with the campaign when present.
  std::optional<std::size_t> map_size;

  /// Throws ValidationError when `@@` does not appear exactly once in a
  /// command template, the timeout is not positive, or a replay directory
  /// is missing.
  void validate() const;
};

struct ExecutionOutcome {
  HitcountVector vector;
  bool crashed = false;
  bool timed_out = false;
};

std::filesystem::path replay_coverage_path(const ExecutorSpec& exec,
                                           const TestcaseRecord& tc);

ExecutionOutcome execute(const ExecutorSpec& exec, const TestcaseRecord& tc,
                         std::size_t map_size);

}  // namespace fuzzsplore
