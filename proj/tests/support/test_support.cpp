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

#include "test_support.hpp"

#include <stdlib.h>

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"

namespace fuzzsplore::testing {
namespace fs = std::filesystem;

ScratchDir::ScratchDir() {
  std::string tmpl = (fs::temp_directory_path() / "fuzzsplore-test-XXXXXX").string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

HitcountVector random_vector(std::mt19937_64& rng, std::size_t map_size, std::size_t max_entries,
                             EdgeIndex max_index) {
  std::uniform_int_distribution<std::size_t> n_dist(0, max_entries);
  std::uniform_int_distribution<EdgeIndex> idx(0, std::min<EdgeIndex>(max_index, map_size - 1));
  std::uniform_int_distribution<int> cnt(1, 255);
  HitcountVector v(map_size);
  for (std::size_t k = 0, n = n_dist(rng); k < n; ++k) {
    // Skew toward small counts, as real hitcounts are.
    const int c = rng() % 2 ? cnt(rng) % 8 + 1 : cnt(rng);
    v.set(idx(rng), static_cast<HitCount>(c));
  }
  return v;
}

namespace {

// A fuzzer's own feedback only sees a subset of the edges and saturates
// counts differently from plain edge coverage.
HitcountVector fuzzer_view(const HitcountVector& edge_cov, int fuzzer) {
  HitcountVector out(edge_cov.map_size());
  for (const auto& e : edge_cov.entries()) {
    if ((e.index * 2654435761u + static_cast<unsigned>(fuzzer) * 97u) % 5 == 0) continue;
    const int c = std::min(255, e.count * (fuzzer + 1));
    out.set(e.index, static_cast<HitCount>(c));
  }
  return out;
}

}  // namespace

fs::path write_synthetic_campaign(const fs::path& root, const SyntheticCampaign& options) {
  std::mt19937_64 rng(options.seed);
  const std::size_t map_size = options.map_size;
  const EdgeIndex region = static_cast<EdgeIndex>(std::min<std::size_t>(map_size, 900));

  nlohmann::json campaign;
  campaign["map_size"] = map_size;
  campaign["bucketing"] = options.bucketing == Bucketing::Raw ? "raw" : "afl_buckets";
  campaign["time_unit"] = "milliseconds";
  campaign["edge_executor"] = {{"kind", "replay"}, {"coverage_dir", "cov_edge"}};
  campaign["fuzzers"] = nlohmann::json::array();
  fs::create_directories(root / "cov_edge");

  for (int i = 0; i < options.fuzzers; ++i) {
    const std::string fid = fmt::format("f{}", i);
    const fs::path queue = root / "queues" / fid;
    fs::create_directories(queue);
    fs::create_directories(root / fmt::format("cov_{}", fid));
    campaign["fuzzers"].push_back({{"id", fid},
                                   {"name", fmt::format("Fuzzer {}", i)},
                                   {"queue_dir", fmt::format("queues/{}", fid)},
                                   {"executor",
                                    {{"kind", "replay"},
                                     {"coverage_dir", fmt::format("cov_{}", fid)}}}});

    std::vector<std::uint64_t> times(static_cast<std::size_t>(options.testcases_per_fuzzer));
    std::uniform_int_distribution<std::uint64_t> tdist(0, options.max_time_ms);
    for (auto& t : times) t = tdist(rng);
    // Some ties, to exercise the tc_id tie-break.
    for (std::size_t k = 1; k < times.size(); k += 7) times[k] = times[k - 1];
    std::sort(times.begin(), times.end());

    std::vector<HitcountVector> edge_cov;
    const EdgeIndex base = static_cast<EdgeIndex>((static_cast<std::size_t>(i) * 150) % map_size);
    for (int id = 0; id < options.testcases_per_fuzzer; ++id) {
      std::vector<TestcaseId> parents;
      const int roll = static_cast<int>(rng() % 10);
      if (id >= 3 && roll < 8) parents.push_back(rng() % static_cast<std::uint64_t>(id));
      if (id >= 3 && roll == 8) {
        const TestcaseId a = rng() % static_cast<std::uint64_t>(id);
        TestcaseId b = rng() % static_cast<std::uint64_t>(id);
        if (b == a) b = (a + 1) % static_cast<std::uint64_t>(id);
        parents = {a, b};
      }

      HitcountVector cov(map_size);
      if (!parents.empty()) cov = edge_cov[parents.front()];
      if (rng() % 9 != 0) {
        const auto extra = random_vector(rng, map_size, 12, region);
        for (const auto& e : extra.entries())
          cov.set((e.index + base) % static_cast<EdgeIndex>(map_size), e.count);
      } else if (rng() % 2) {
        cov = HitcountVector(map_size);
      }
      edge_cov.push_back(cov);

      QueueFilename name{static_cast<TestcaseId>(id), parents,
                         static_cast<double>(times[static_cast<std::size_t>(id)]),
                         std::string(parents.size() == 2 ? "splice" : "havoc")};
      if (parents.empty()) name.mutation_op.reset();
      write_file(queue / format_queue_filename(name), fmt::format("input {} {}", fid, rng()));
      write_file(root / "cov_edge" / fid / fmt::format("{}.cov", id), format_coverage(cov));
      for (int j = 0; j < options.fuzzers; ++j)
        write_file(root / fmt::format("cov_f{}", j) / fid / fmt::format("{}.cov", id),
                   "# synthetic\n" + format_coverage(fuzzer_view(cov, j)));
    }
  }

  const fs::path path = root / "campaign.json";
  write_file(path, campaign.dump(2));
  return path;
}

ArtifactDocument synthetic_document(const fs::path& root, const SyntheticCampaign& options,
                                    const std::optional<TsneParams>& tsne) {
  const auto campaign = load_campaign(write_synthetic_campaign(root, options));
  QueueSet queues;
  for (const auto& f : campaign.fuzzers) queues[f.fuzzer_id] = ingest_queue(f, campaign);
  ArtifactDocument doc;
  doc.analysis = compute_analysis(campaign, queues);
  for (const auto& [id, q] : queues) doc.graphs[id] = build_graph(id, q);
  if (tsne) doc.embedding = embed_artifact(doc.analysis, *tsne);
  return doc;
}

}  // namespace fuzzsplore::testing
