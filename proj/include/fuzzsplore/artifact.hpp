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

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "fuzzsplore/analysis.hpp"
#include "fuzzsplore/embedding.hpp"
#include "fuzzsplore/genealogy.hpp"
#include "json.hpp"

namespace fuzzsplore {

/// Everything `analyze` writes and `serve` reads.
struct ArtifactDocument {
  AnalysisArtifact analysis;
  std::map<std::string, GenerationsGraph> graphs;
  std::optional<Embedding> embedding;

  friend bool operator==(const ArtifactDocument&, const ArtifactDocument&) = default;
};

nlohmann::json to_json(const ArtifactDocument& doc);

/// Throws ArtifactMalformed with the offending location.
ArtifactDocument artifact_from_json(const nlohmann::json& j);

std::string dump_artifact(const ArtifactDocument& doc);
void save_artifact(const std::filesystem::path& path, const ArtifactDocument& doc);
ArtifactDocument load_artifact(const std::filesystem::path& path);

// Building blocks shared with the HTTP API.
nlohmann::json fuzzers_json(const AnalysisArtifact& a);
nlohmann::json curves_json(const AnalysisArtifact& a);
nlohmann::json histogram_json(const AnalysisArtifact& a);
nlohmann::json interestingness_json(const InterestingnessMap& m);
nlohmann::json testcase_json(const TestcaseInfo& tc);
nlohmann::json tsne_params_json(const TsneParams& p);
nlohmann::json embedding_point_json(const EmbeddingPoint& p);
nlohmann::json graph_json(const GenerationsGraph& g);

}  // namespace fuzzsplore
