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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzsplore/coverage.hpp"
#include "fuzzsplore/testcase.hpp"

namespace fuzzsplore {

enum class TimeUnit { Seconds, Milliseconds };

struct FuzzerConfig {
  std::string fuzzer_id;  // [A-Za-z0-9_-]+, unique in the campaign
  std::string display_name;
  std::filesystem::path queue_dir;
  ExecutorSpec executor;
  std::optional<std::string> color_hint;
};

struct CampaignConfig {
  std::vector<FuzzerConfig> fuzzers;
  ExecutorSpec edge_executor;
  std::size_t map_size = kDefaultMapSize;
  TimeUnit time_unit = TimeUnit::Milliseconds;
  Bucketing bucketing = Bucketing::AflBuckets;

  const FuzzerConfig* find(std::string_view fuzzer_id) const;

  /// Throws ValidationError on any invariant breach: fewer than two fuzzers,
  /// bad or duplicate ids, map_size == 0, an executor declaring a different
  /// map size, or an invalid executor.
  void validate() const;
};

/// Fields encoded in an AFL++-style queue filename such as
/// `id:000200,src:000003+000017,time:900000,op:splice`.
struct QueueFilename {
  TestcaseId tc_id = 0;
  std::vector<TestcaseId> parent_ids;
  std::optional<double> raw_time;  // in CampaignConfig::time_unit
  std::optional<std::string> mutation_op;

  friend bool operator==(const QueueFilename&, const QueueFilename&) = default;
};

QueueFilename parse_queue_filename(std::string_view name);
std::string format_queue_filename(const QueueFilename& fields);

double to_seconds(double raw_time, TimeUnit unit) noexcept;

/// Reads one fuzzer's queue directory (non-recursive). A `manifest.json` in
/// the directory overrides filename metadata for the files it lists. The
/// result is sorted in replay order; dangling parents are dropped with a
/// warning.
std::vector<TestcaseRecord> ingest_queue(const FuzzerConfig& cfg,
                                         const CampaignConfig& campaign);

/// Parses and validates a campaign document. Relative paths are resolved
/// against base_dir.
CampaignConfig parse_campaign(std::string_view json_text,
                              const std::filesystem::path& base_dir);
CampaignConfig load_campaign(const std::filesystem::path& path);

/// Stable JSON rendering of the config, used for fingerprinting.
std::string canonical_json(const CampaignConfig& campaign);

}  // namespace fuzzsplore
