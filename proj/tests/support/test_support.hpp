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
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fuzzsplore/artifact.hpp"
#include "fuzzsplore/campaign.hpp"
#include "fuzzsplore/coverage.hpp"

namespace fuzzsplore::testing {

class ScratchDir {
 public:
  ScratchDir();
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& content);

HitcountVector random_vector(std::mt19937_64& rng, std::size_t map_size, std::size_t max_entries,
                             EdgeIndex max_index);

struct SyntheticCampaign {
  std::uint64_t seed = 1;
  int fuzzers = 3;
  int testcases_per_fuzzer = 40;
  std::size_t map_size = kDefaultMapSize;
  Bucketing bucketing = Bucketing::AflBuckets;
  // Distinct discovery times in milliseconds are drawn from [0, max_time_ms].
  std::uint64_t max_time_ms = 60000;
};

/// Writes a replay campaign: queue dirs with AFL-style filenames, plus replay
/// coverage for the edge executor and for each fuzzer's executor. Returns the
/// path of the campaign JSON.
std::filesystem::path write_synthetic_campaign(const std::filesystem::path& root,
                                               const SyntheticCampaign& options);

/// Runs the whole analysis over a synthetic campaign written under `root`.
/// No embedding when `tsne` is empty.
ArtifactDocument synthetic_document(const std::filesystem::path& root,
                                    const SyntheticCampaign& options,
                                    const std::optional<TsneParams>& tsne);

}  // namespace fuzzsplore::testing
