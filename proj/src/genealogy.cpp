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

#include "fuzzsplore/genealogy.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "fuzzsplore/error.hpp"

namespace fuzzsplore {

std::vector<TestcaseId> GenerationsGraph::parents_of(TestcaseId child) const {
  std::vector<TestcaseId> out;
  for (const auto& [p, c] : edges)
    if (c == child) out.push_back(p);
  return out;
}

namespace {

// Levels by a forward pass in tc_id order; valid because parent < child.
void assign_levels(GenerationsGraph& g) {
  std::map<TestcaseId, std::vector<TestcaseId>> parents;
  for (const auto& [p, c] : g.edges) parents[c].push_back(p);
  for (auto& [id, node] : g.nodes) {
    node.level = 0;
    if (auto it = parents.find(id); it != parents.end())
      for (TestcaseId p : it->second)
        node.level = std::max(node.level, g.nodes.at(p).level + 1);
  }
}

template <typename Entry>
GenerationsGraph build(const std::string& fuzzer_id, const std::vector<Entry>& queue) {
  GenerationsGraph g;
  g.fuzzer_id = fuzzer_id;
  for (const auto& tc : queue) g.nodes[tc.tc_id] = {tc.discovery_time_s, tc.mutation_op, 0};
  for (const auto& tc : queue)
    for (TestcaseId p : tc.parent_ids) {
      if (!g.nodes.contains(p)) continue;
      if (p >= tc.tc_id)
        throw Error(ErrorKind::CycleDetected,
                    fmt::format("fuzzer {}: edge {} -> {} does not point to a larger id",
                                fuzzer_id, p, tc.tc_id));
      g.edges.insert({p, tc.tc_id});
    }
  assign_levels(g);
  return g;
}

}  // namespace

GenerationsGraph build_graph(const std::string& fuzzer_id,
                             const std::vector<TestcaseRecord>& queue) {
  return build(fuzzer_id, queue);
}

GenerationsGraph build_graph(const std::string& fuzzer_id,
                             const std::vector<TestcaseInfo>& testcases) {
  return build(fuzzer_id, testcases);
}

std::set<TestcaseId> overlay_interestingness(const GenerationsGraph& g,
                                             const InterestingnessMap& i_map,
                                             const std::string& other) {
  if (other == g.fuzzer_id)
    throw Error(ErrorKind::UnknownFuzzer,
                fmt::format("'{}' owns the graph and never appears in its interestingness "
                            "map",
                            other));
  if (!i_map.by_owner.contains(other))
    throw Error(ErrorKind::UnknownFuzzer, fmt::format("unknown fuzzer '{}'", other));
  std::set<TestcaseId> out;
  auto it = i_map.by_owner.find(g.fuzzer_id);
  if (it == i_map.by_owner.end()) return out;
  for (const auto& [tc, fuzzers] : it->second)
    if (g.nodes.contains(tc) && fuzzers.contains(other)) out.insert(tc);
  return out;
}

GenerationsGraph filter_graph(const GenerationsGraph& g, double t_prime) {
  GenerationsGraph v;
  v.fuzzer_id = g.fuzzer_id;
  for (const auto& [id, node] : g.nodes)
    if (node.discovery_time_s <= t_prime) v.nodes.emplace(id, node);
  for (const auto& e : g.edges)
    if (v.nodes.contains(e.first) && v.nodes.contains(e.second)) v.edges.insert(e);
  assign_levels(v);
  return v;
}

}  // namespace fuzzsplore
