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

#include <fmt/format.h>

#include "fuzzsplore/error.hpp"
#include "gtest/gtest.h"
#include "test_support.hpp"

namespace fuzzsplore {
namespace {

using testing::ScratchDir;
using testing::write_file;

// Two fuzzers A and B over replay coverage. Coverage text per testcase is
// written for the edge executor and for each fuzzer's executor.
class TwoFuzzerCampaign : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const char* d : {"edge", "exec_a", "exec_b"}) std::filesystem::create_directories(dir_ / d);
    campaign_.edge_executor.coverage_dir = dir_ / "edge";
    FuzzerConfig a, b;
    a.fuzzer_id = "A";
    a.display_name = "fuzzer A";
    a.executor.coverage_dir = dir_ / "exec_a";
    b.fuzzer_id = "B";
    b.display_name = "fuzzer B";
    b.executor.coverage_dir = dir_ / "exec_b";
    campaign_.fuzzers = {a, b};
  }

  void add(const std::string& fuzzer, TestcaseId id, double time_s, const std::string& edge_cov,
           const std::string& a_cov, const std::string& b_cov,
           std::vector<TestcaseId> parents = {}) {
    TestcaseRecord r;
    r.tc_id = id;
    r.fuzzer_id = fuzzer;
    r.discovery_time_s = time_s;
    r.parent_ids = std::move(parents);
    r.input_path = dir_ / "in";
    queues_[fuzzer].push_back(r);
    write_file(dir_ / "edge" / fuzzer / fmt::format("{}.cov", id), edge_cov);
    write_file(dir_ / "exec_a" / fuzzer / fmt::format("{}.cov", id), a_cov);
    write_file(dir_ / "exec_b" / fuzzer / fmt::format("{}.cov", id), b_cov);
  }

  // Fuzzer A's three-testcase queue; B's feedback is supplied by the caller.
  void add_reference_queue(const std::string& b0, const std::string& b1, const std::string& b2) {
    add("A", 0, 1.0, "1:1\n", "1:1\n", b0);
    add("A", 1, 2.0, "1:1\n", "1:1\n", b1);
    add("A", 2, 3.0, "1:1\n2:1\n", "1:1\n2:1\n", b2);
    add("B", 0, 0.5, "7:1\n", "", "7:1\n");
  }

  ScratchDir dir_;
  CampaignConfig campaign_;
  QueueSet queues_;
};

TEST_F(TwoFuzzerCampaign, CoverageCurveSkipsUninterestingTestcases) {
  add_reference_queue("", "", "");
  const auto a = compute_analysis(campaign_, queues_);
  EXPECT_EQ(a.curves.at("A").points, (std::vector<CurvePoint>{{1.0, 1}, {3.0, 2}}));
  EXPECT_EQ(a.curves.at("B").points, (std::vector<CurvePoint>{{0.5, 1}}));
  EXPECT_DOUBLE_EQ(a.horizon_s, 3.0);
}

TEST_F(TwoFuzzerCampaign, EmptyCrossCoverageIsNeverInteresting) {
  add_reference_queue("", "", "");
  const auto a = compute_analysis(campaign_, queues_);
  for (const auto& [tc, set] : a.interestingness.by_owner.at("A")) EXPECT_TRUE(set.empty()) << tc;
  EXPECT_EQ(a.interestingness.by_owner.at("A").size(), 3u);
}

TEST_F(TwoFuzzerCampaign, CrossInterestingnessFollowsSelfFold) {
  add_reference_queue("1:1\n", "1:1\n", "1:1\n2:1\n");
  const auto a = compute_analysis(campaign_, queues_);
  const auto& ia = a.interestingness.by_owner.at("A");
  EXPECT_EQ(ia.at(0), (std::set<std::string>{"B"}));
  EXPECT_TRUE(ia.at(1).empty());
  EXPECT_EQ(ia.at(2), (std::set<std::string>{"B"}));
  // The owner never appears in its own map.
  EXPECT_TRUE(a.interestingness.by_owner.at("B").at(0).empty());
}

TEST_F(TwoFuzzerCampaign, MatricesAndHistogram) {
  add_reference_queue("", "", "");
  const auto a = compute_analysis(campaign_, queues_);
  const auto& rows = a.matrices.at("A");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2].tc_id, 2u);
  EXPECT_EQ(count_not_zeros(rows[2].vector), 2u);
  EXPECT_EQ(a.new_interesting_histogram.at("A"), (SecondHistogram{{1, 1}, {2, 1}, {3, 1}}));
  EXPECT_EQ(a.new_interesting_histogram.at("B"), (SecondHistogram{{0, 1}}));
  EXPECT_EQ(a.fingerprint.queue_sizes.at("A"), 3u);
  EXPECT_EQ(a.fingerprint.config_sha256.size(), 64u);
}

TEST_F(TwoFuzzerCampaign, ReplayFlakyWhenOwnFeedbackSeesNothingNew) {
  add_reference_queue("", "", "");
  const auto a = compute_analysis(campaign_, queues_);
  const auto& tcs = a.testcases.at("A");
  EXPECT_FALSE(tcs[0].replay_flaky);
  EXPECT_TRUE(tcs[1].replay_flaky);
  EXPECT_FALSE(tcs[2].replay_flaky);
  EXPECT_FALSE(a.testcases.at("B")[0].replay_flaky);
}

TEST_F(TwoFuzzerCampaign, BucketedCountIncreaseIsInterestingButAddsNoCurvePoint) {
  add("A", 0, 1.0, "3:1\n", "", "");
  add("A", 1, 2.0, "3:2\n", "", "");
  add("A", 2, 3.0, "3:2\n4:1\n", "", "");
  add("B", 0, 0.0, "", "", "");
  const auto a = compute_analysis(campaign_, queues_);
  EXPECT_EQ(a.curves.at("A").points, (std::vector<CurvePoint>{{1.0, 1}, {3.0, 2}}));
}

TEST_F(TwoFuzzerCampaign, SameTimestampKeepsLatestValue) {
  add("A", 0, 1.25, "1:1\n", "", "");
  add("A", 1, 1.25, "1:1\n2:1\n", "", "");
  add("B", 0, 0.0, "", "", "");
  const auto a = compute_analysis(campaign_, queues_);
  EXPECT_EQ(a.curves.at("A").points, (std::vector<CurvePoint>{{1.25, 2}}));
  EXPECT_EQ(a.new_interesting_histogram.at("A"), (SecondHistogram{{1, 2}}));
}

TEST_F(TwoFuzzerCampaign, FailuresBelowThresholdAreRecorded) {
  add_reference_queue("", "", "");
  std::filesystem::remove(dir_ / "edge" / "A" / "1.cov");
  const auto a = compute_analysis(campaign_, queues_);
  const auto& tc1 = a.testcases.at("A")[1];
  ASSERT_EQ(tc1.errors.size(), 1u);
  EXPECT_NE(tc1.errors[0].find("CoverageMissing"), std::string::npos);
  EXPECT_TRUE(a.matrices.at("A")[1].vector.empty());
}

TEST_F(TwoFuzzerCampaign, FailuresAboveThresholdAbort) {
  add_reference_queue("", "", "");
  std::filesystem::remove(dir_ / "exec_b" / "A" / "0.cov");
  std::filesystem::remove(dir_ / "exec_b" / "A" / "1.cov");
  try {
    compute_analysis(campaign_, queues_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ExecutorThresholdExceeded);
    EXPECT_NE(std::string(e.what()).find("fuzzer A under B"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(compute_analysis(campaign_, queues_, {1, 0.7}));
}

TEST_F(TwoFuzzerCampaign, FilterExamples) {
  add_reference_queue("1:1\n", "1:1\n", "1:1\n2:1\n");
  const auto a = compute_analysis(campaign_, queues_);

  EXPECT_EQ(filter_artifact(a, a.horizon_s), a);

  const auto empty = filter_artifact(a, 0.0);
  EXPECT_TRUE(empty.curves.at("A").points.empty());
  EXPECT_TRUE(empty.matrices.at("A").empty());
  EXPECT_TRUE(empty.new_interesting_histogram.at("A").empty());
  EXPECT_TRUE(empty.interestingness.by_owner.at("A").empty());

  const auto two = filter_artifact(a, 2.0);
  EXPECT_EQ(two.curves.at("A").points, (std::vector<CurvePoint>{{1.0, 1}}));
  ASSERT_EQ(two.matrices.at("A").size(), 2u);
  EXPECT_EQ(two.matrices.at("A")[0].tc_id, 0u);
  EXPECT_EQ(two.matrices.at("A")[1].tc_id, 1u);
  EXPECT_EQ(two.interestingness.by_owner.at("A").size(), 2u);
  EXPECT_EQ(two.matrices.at("B").size(), 1u);
}

TEST_F(TwoFuzzerCampaign, FilterOutOfRange) {
  add_reference_queue("", "", "");
  const auto a = compute_analysis(campaign_, queues_);
  for (double t : {-1.0, 3.5, std::nan("")}) {
    try {
      filter_artifact(a, t);
      ADD_FAILURE() << t;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
    }
  }
}

TEST_F(TwoFuzzerCampaign, RemovingUninterestingTestcaseKeepsCurve) {
  add_reference_queue("", "", "");
  const auto full = compute_analysis(campaign_, queues_);
  queues_["A"].erase(queues_["A"].begin() + 1);
  const auto reduced = compute_analysis(campaign_, queues_);
  EXPECT_EQ(full.curves.at("A"), reduced.curves.at("A"));
}

TEST(ComputeAnalysis, ParallelJobsMatchSequential) {
  ScratchDir dir;
  const auto path = testing::write_synthetic_campaign(dir.path(), {.seed = 11, .testcases_per_fuzzer = 25});
  const auto campaign = load_campaign(path);
  QueueSet queues;
  for (const auto& f : campaign.fuzzers) queues[f.fuzzer_id] = ingest_queue(f, campaign);
  EXPECT_EQ(compute_analysis(campaign, queues, {1}), compute_analysis(campaign, queues, {8}));
}

TEST(RecordCurvePoint, Rules) {
  CoverageCurve c;
  record_curve_point(c, 1.0, 3);
  record_curve_point(c, 1.0, 5);
  record_curve_point(c, 2.0, 5);
  record_curve_point(c, 3.0, 6);
  EXPECT_EQ(c.points, (std::vector<CurvePoint>{{1.0, 5}, {3.0, 6}}));
}

TEST(SecondBucket, Floors) {
  EXPECT_EQ(second_bucket(0.0), 0);
  EXPECT_EQ(second_bucket(0.999), 0);
  EXPECT_EQ(second_bucket(12.345), 12);
}

}  // namespace
}  // namespace fuzzsplore
