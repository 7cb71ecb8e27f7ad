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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fuzzsplore {

using TestcaseId = std::uint64_t;

/// One saved queue entry of one fuzzer.
struct TestcaseRecord {
  TestcaseId tc_id = 0;
  std::string fuzzer_id;
  double discovery_time_s = 0.0;
  std::vector<TestcaseId> parent_ids;  // 0, 1 or 2 entries
  std::optional<std::string> mutation_op;
  std::filesystem::path input_path;

  friend bool operator==(const TestcaseRecord&, const TestcaseRecord&) = default;
};

/// Queue replay order: ascending (discovery_time_s, tc_id).
inline bool replay_order_less(const TestcaseRecord& a, const TestcaseRecord& b) {
  if (a.discovery_time_s != b.discovery_time_s)
    return a.discovery_time_s < b.discovery_time_s;
  return a.tc_id < b.tc_id;
}

}  // namespace fuzzsplore
