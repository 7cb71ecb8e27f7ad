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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fuzzsplore/analysis.hpp"
#include "fuzzsplore/testcase.hpp"

namespace fuzzsplore {

struct GraphNode {
  double discovery_time_s = 0.0;
  std::optional<std::string> mutation_op;
  std::size_t level = 0;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

using GraphEdge = std::pair<TestcaseId, TestcaseId>;  // parent -> child

/// Derivation DAG of one fuzzer's queue. Every edge goes from a smaller to a
/// larger tc_id; roots have level 0 and children sit one level below their
/// deepest parent.
struct GenerationsGraph {
  std::string fuzzer_id;
  std::map<TestcaseId, GraphNode> nodes;
  std::set<GraphEdge> edges;

  std::vector<TestcaseId> parents_of(TestcaseId child) const;

  friend bool operator==(const GenerationsGraph&, const GenerationsGraph&) = default;
};

/// Parents absent from the queue are ignored, so their children become roots.
/// Throws CycleDetected for a parent id not smaller than its child.
GenerationsGraph build_graph(const std::string& fuzzer_id,
                             const std::vector<TestcaseRecord>& queue);

/// Same as above from artifact testcase metadata.
GenerationsGraph build_graph(const std::string& fuzzer_id,
                             const std::vector<TestcaseInfo>& testcases);

/// { tc | other in I_owner(tc) }. Throws UnknownFuzzer if `other` is the owner
/// or not part of the map.
std::set<TestcaseId> overlay_interestingness(const GenerationsGraph& g,
                                             const InterestingnessMap& i_map,
                                             const std::string& other);

/// Induced subgraph on nodes discovered at or before t_prime, with levels
/// recomputed inside the view.
GenerationsGraph filter_graph(const GenerationsGraph& g, double t_prime);

}  // namespace fuzzsplore
