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
#include <string_view>

#include "fuzzsplore/artifact.hpp"

namespace fuzzsplore {

using Query = std::map<std::string, std::string>;

struct ApiResponse {
  int status = 200;
  std::string body;  // application/json
};

/// Read-only JSON API over one loaded artifact. Every response is a pure
/// function of (artifact, path, query); unknown query keys are ignored.
///
///   /api/meta
///   /api/analysis?until=T
///   /api/coverage?until=T
///   /api/embedding?until=T
///   /api/graph/{fuzzer}?until=T&compare=F
///   /api/testcase/{fuzzer}/{id}
class ApiService {
 public:
  explicit ApiService(ArtifactDocument doc);

  ApiResponse handle(std::string_view path, const Query& query) const;

  const ArtifactDocument& document() const noexcept { return doc_; }

 private:
  ArtifactDocument doc_;
};

struct ServeConfig {
  std::filesystem::path artifact_path;
  std::string bind_address = "127.0.0.1:8080";
  std::optional<std::filesystem::path> static_dir;
};

/// Blocks serving HTTP until the process is stopped. Returns false when the
/// socket cannot be bound.
bool serve(const ApiService& api, const ServeConfig& config);

}  // namespace fuzzsplore
