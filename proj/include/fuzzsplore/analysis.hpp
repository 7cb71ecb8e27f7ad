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
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fuzzsplore/campaign.hpp"
#include "fuzzsplore/coverage.hpp"
#include "fuzzsplore/testcase.hpp"

namespace fuzzsplore {

inline constexpr const char* kArtifactSchema = "fuzzsplore-analysis/1";

struct CurvePoint {
  double time_s;
  std::size_t edges;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Step function of discovered edges over time. Times and edge counts are
/// both strictly increasing across points.
struct CoverageCurve {
  std::vector<CurvePoint> points;

  friend bool operator==(const CoverageCurve&, const CoverageCurve&) = default;
};

/// For each owning fuzzer, the other fuzzers that find each of its testcases
/// interesting. Every testcase of the owner has an entry (possibly empty) and
/// the owner never appears in its own sets.
struct InterestingnessMap {
  std::map<std::string, std::map<TestcaseId, std::set<std::string>>> by_owner;

  friend bool operator==(const InterestingnessMap&, const InterestingnessMap&) = default;
};

struct CoverageRow {
  TestcaseId tc_id;
  HitcountVector vector;  // classified

  friend bool operator==(const CoverageRow&, const CoverageRow&) = default;
};

/// Rows in queue replay order.
using CoverageMatrix = std::vector<CoverageRow>;

struct TestcaseInfo {
  TestcaseId tc_id = 0;
  double discovery_time_s = 0.0;
  std::vector<TestcaseId> parent_ids;
  std::optional<std::string> mutation_op;
  bool crashed = false;
  bool timed_out = false;
  // Not interesting when replayed through its own fuzzer's executor.
  bool replay_flaky = false;
  std::vector<std::string> errors;

  friend bool operator==(const TestcaseInfo&, const TestcaseInfo&) = default;
};

struct FuzzerInfo {
  std::string id;
  std::string name;
  std::optional<std::string> color;

  friend bool operator==(const FuzzerInfo&, const FuzzerInfo&) = default;
};

struct Fingerprint {
  std::string config_sha256;
  std::map<std::string, std::size_t> queue_sizes;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

using SecondHistogram = std::map<std::int64_t, std::size_t>;

struct AnalysisArtifact {
  Fingerprint fingerprint;
  double horizon_s = 0.0;
  std::size_t map_size = kDefaultMapSize;
  Bucketing bucketing = Bucketing::AflBuckets;
  std::vector<FuzzerInfo> fuzzers;  // campaign order
  std::map<std::string, std::vector<TestcaseInfo>> testcases;  // replay order
  std::map<std::string, CoverageCurve> curves;
  InterestingnessMap interestingness;
  std::map<std::string, CoverageMatrix> matrices;
  std::map<std::string, SecondHistogram> new_interesting_histogram;

  bool has_fuzzer(const std::string& id) const;
  const TestcaseInfo* find_testcase(const std::string& fuzzer, TestcaseId id) const;

  friend bool operator==(const AnalysisArtifact&, const AnalysisArtifact&) = default;
};

using QueueSet = std::map<std::string, std::vector<TestcaseRecord>>;

struct AnalysisOptions {
  unsigned jobs = 1;
  // A pass aborts when more than this fraction of a queue fails to execute.
  double failure_threshold = 0.5;
};

/// Replays every queue under the edge executor and every other fuzzer's
/// executor. Queues must be in replay order.
AnalysisArtifact compute_analysis(const CampaignConfig& campaign, const QueueSet& queues,
                                  const AnalysisOptions& options = {});

/// The artifact restricted to testcases discovered at or before t_prime.
/// Throws OutOfRange unless 0 <= t_prime <= horizon.
AnalysisArtifact filter_artifact(const AnalysisArtifact& artifact, double t_prime);

/// Appends a point for an interesting testcase following the curve rules:
/// same-time points keep the latest value, non-increasing counts are dropped.
void record_curve_point(CoverageCurve& curve, double time_s, std::size_t edges);

std::int64_t second_bucket(double time_s) noexcept;

}  // namespace fuzzsplore
