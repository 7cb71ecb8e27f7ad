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

#include "fuzzsplore/analysis.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fuzzsplore/error.hpp"
#include "fuzzsplore/parallel.hpp"

namespace fuzzsplore {

bool AnalysisArtifact::has_fuzzer(const std::string& id) const {
  return std::any_of(fuzzers.begin(), fuzzers.end(),
                     [&](const FuzzerInfo& f) { return f.id == id; });
}

const TestcaseInfo* AnalysisArtifact::find_testcase(const std::string& fuzzer,
                                                    TestcaseId id) const {
  auto it = testcases.find(fuzzer);
  if (it == testcases.end()) return nullptr;
  for (const auto& tc : it->second)
    if (tc.tc_id == id) return &tc;
  return nullptr;
}

void record_curve_point(CoverageCurve& curve, double time_s, std::size_t edges) {
  auto& pts = curve.points;
  if (!pts.empty() && pts.back().time_s == time_s) {
    pts.back().edges = std::max(pts.back().edges, edges);
    return;
  }
  if (!pts.empty() && edges <= pts.back().edges) return;
  pts.push_back({time_s, edges});
}

std::int64_t second_bucket(double time_s) noexcept {
  return static_cast<std::int64_t>(std::floor(time_s));
}

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  for (unsigned k = 0; k < len; ++k) out += fmt::format("{:02x}", digest[k]);
  return out;
}

struct PassResult {
  std::vector<ExecutionOutcome> outcomes;  // classified vectors
  std::vector<std::optional<std::string>> errors;
};

// Executes a whole queue under one executor. Failed executions yield an empty
// vector and an error message.
PassResult run_pass(const ExecutorSpec& exec, const std::string& evaluator,
                    const std::string& owner, const std::vector<TestcaseRecord>& queue,
                    const CampaignConfig& campaign, const AnalysisOptions& options) {
  PassResult r;
  r.outcomes.assign(queue.size(), ExecutionOutcome{HitcountVector(campaign.map_size)});
  r.errors.resize(queue.size());
  parallel_for(queue.size(), options.jobs, [&](std::size_t k) {
    try {
      auto out = execute(exec, queue[k], campaign.map_size);
      out.vector = classify_counts(out.vector, campaign.bucketing);
      r.outcomes[k] = std::move(out);
    } catch (const Error& e) {
      r.errors[k] = fmt::format("{}: {}", evaluator, e.what());
    }
  });

  const auto failures = static_cast<std::size_t>(
      std::count_if(r.errors.begin(), r.errors.end(), [](const auto& e) { return e.has_value(); }));
  if (failures > 0) {
    spdlog::warn("fuzzer {} under {}: {}/{} executions failed", owner, evaluator, failures,
                 queue.size());
    if (static_cast<double>(failures) > options.failure_threshold * static_cast<double>(queue.size())) {
      const auto first = std::find_if(r.errors.begin(), r.errors.end(),
                                      [](const auto& e) { return e.has_value(); });
      throw Error(ErrorKind::ExecutorThresholdExceeded,
                  fmt::format("fuzzer {} under {}: {}/{} executions failed (first: tc {}: {})",
                              owner, evaluator, failures, queue.size(),
                              queue[first - r.errors.begin()].tc_id, **first));
    }
  }
  return r;
}

}  // namespace

AnalysisArtifact compute_analysis(const CampaignConfig& campaign, const QueueSet& queues,
                                  const AnalysisOptions& options) {
  AnalysisArtifact a;
  a.map_size = campaign.map_size;
  a.bucketing = campaign.bucketing;

  static const std::vector<TestcaseRecord> kNoTestcases;
  auto queue_of = [&](const std::string& id) -> const std::vector<TestcaseRecord>& {
    auto it = queues.find(id);
    return it == queues.end() ? kNoTestcases : it->second;
  };

  std::string fingerprint_input = canonical_json(campaign);
  for (const auto& f : campaign.fuzzers) {
    a.fuzzers.push_back({f.fuzzer_id, f.display_name, f.color_hint});
    const auto n = queue_of(f.fuzzer_id).size();
    a.fingerprint.queue_sizes[f.fuzzer_id] = n;
    fingerprint_input += fmt::format("\n{}={}", f.fuzzer_id, n);
  }
  a.fingerprint.config_sha256 = sha256_hex(fingerprint_input);

  for (const auto& owner : campaign.fuzzers) {
    const auto& id = owner.fuzzer_id;
    const auto& queue = queue_of(id);
    auto& infos = a.testcases[id];
    auto& matrix = a.matrices[id];
    auto& curve = a.curves[id];
    auto& histogram = a.new_interesting_histogram[id];
    auto& interesting = a.interestingness.by_owner[id];

    for (const auto& tc : queue) {
      infos.push_back({tc.tc_id, tc.discovery_time_s, tc.parent_ids, tc.mutation_op, false,
                       false, false, {}});
      ++histogram[second_bucket(tc.discovery_time_s)];
      interesting[tc.tc_id];
      a.horizon_s = std::max(a.horizon_s, tc.discovery_time_s);
    }

    // Edge coverage: X_i and C_i.
    {
      auto pass = run_pass(campaign.edge_executor, "edge", id, queue, campaign, options);
      HitcountVector acc(campaign.map_size);
      for (std::size_t k = 0; k < queue.size(); ++k) {
        auto& out = pass.outcomes[k];
        infos[k].crashed = out.crashed;
        infos[k].timed_out = out.timed_out;
        if (pass.errors[k]) infos[k].errors.push_back(*pass.errors[k]);
        if (merge_into(acc, out.vector))
          record_curve_point(curve, queue[k].discovery_time_s, count_not_zeros(acc));
        matrix.push_back({queue[k].tc_id, std::move(out.vector)});
      }
    }

    // Each fuzzer's own feedback: I_i for the others, replay flakiness for
    // the owner.
    for (const auto& evaluator : campaign.fuzzers) {
      auto pass = run_pass(evaluator.executor, evaluator.fuzzer_id, id, queue, campaign, options);
      const bool self = evaluator.fuzzer_id == id;
      HitcountVector acc(campaign.map_size);
      for (std::size_t k = 0; k < queue.size(); ++k) {
        if (pass.errors[k]) infos[k].errors.push_back(*pass.errors[k]);
        const bool is_interesting = merge_into(acc, pass.outcomes[k].vector);
        if (self)
          infos[k].replay_flaky = !is_interesting;
        else if (is_interesting)
          interesting[queue[k].tc_id].insert(evaluator.fuzzer_id);
      }
    }
  }
  return a;
}

AnalysisArtifact filter_artifact(const AnalysisArtifact& artifact, double t_prime) {
  if (!(t_prime >= 0.0 && t_prime <= artifact.horizon_s))
    throw Error(ErrorKind::OutOfRange,
                fmt::format("t' = {} outside [0, {}]", t_prime, artifact.horizon_s));

  AnalysisArtifact v;
  v.fingerprint = artifact.fingerprint;
  v.horizon_s = t_prime;
  v.map_size = artifact.map_size;
  v.bucketing = artifact.bucketing;
  v.fuzzers = artifact.fuzzers;

  for (const auto& [id, infos] : artifact.testcases) {
    auto& out = v.testcases[id];
    std::set<TestcaseId> kept;
    for (const auto& tc : infos)
      if (tc.discovery_time_s <= t_prime) {
        out.push_back(tc);
        kept.insert(tc.tc_id);
      }

    auto& rows = v.matrices[id];
    if (auto it = artifact.matrices.find(id); it != artifact.matrices.end())
      for (const auto& row : it->second)
        if (kept.contains(row.tc_id)) rows.push_back(row);

    auto& curve = v.curves[id];
    if (auto it = artifact.curves.find(id); it != artifact.curves.end())
      for (const auto& p : it->second.points)
        if (p.time_s <= t_prime) curve.points.push_back(p);

    auto& hist = v.new_interesting_histogram[id];
    for (const auto& tc : out) ++hist[second_bucket(tc.discovery_time_s)];

    auto& imap = v.interestingness.by_owner[id];
    if (auto it = artifact.interestingness.by_owner.find(id);
        it != artifact.interestingness.by_owner.end())
      for (const auto& [tc, set] : it->second)
        if (kept.contains(tc)) imap[tc] = set;
  }
  return v;
}

}  // namespace fuzzsplore
