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

#include "fuzzsplore/api.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "fuzzsplore/error.hpp"
#include "fuzzsplore/genealogy.hpp"

namespace fuzzsplore {
using nlohmann::json;

namespace {

struct HttpError {
  int status;
  std::string message;
};

ApiResponse ok(const json& j) { return {200, j.dump()}; }

ApiResponse error_response(const HttpError& e) {
  return {e.status, json{{"error", {{"status", e.status}, {"message", e.message}}}}.dump()};
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    const auto slash = path.find('/');
    const auto part = path.substr(0, slash);
    if (!part.empty()) parts.push_back(part);
    if (slash == std::string_view::npos) break;
    path = path.substr(slash + 1);
  }
  return parts;
}

double parse_until(const Query& query, double horizon) {
  auto it = query.find("until");
  if (it == query.end()) return horizon;
  const std::string& s = it->second;
  double t = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), t);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(t))
    throw HttpError{400, fmt::format("malformed until '{}'", s)};
  if (t < 0 || t > horizon)
    throw HttpError{422, fmt::format("until {} outside [0, {}]", s, horizon)};
  return t;
}

}  // namespace

ApiService::ApiService(ArtifactDocument doc) : doc_(std::move(doc)) {}

ApiResponse ApiService::handle(std::string_view path, const Query& query) const {
  const auto& a = doc_.analysis;
  try {
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "api")
      throw HttpError{404, fmt::format("no route for {}", path)};
    const auto route = parts[1];

    if (route == "meta" && parts.size() == 2) {
      json counts = json::object();
      for (const auto& [id, infos] : a.testcases) counts[id] = infos.size();
      return ok({{"schema", kArtifactSchema},
                 {"fingerprint", a.fingerprint.config_sha256},
                 {"horizon_s", a.horizon_s},
                 {"map_size", a.map_size},
                 {"bucketing", a.bucketing == Bucketing::Raw ? "raw" : "afl_buckets"},
                 {"fuzzers", fuzzers_json(a)},
                 {"testcase_counts", std::move(counts)},
                 {"has_embedding", doc_.embedding.has_value()}});
    }

    if ((route == "analysis" || route == "coverage") && parts.size() == 2) {
      const double until = parse_until(query, a.horizon_s);
      const auto view = filter_artifact(a, until);
      if (route == "coverage") return ok({{"until_s", until}, {"curves", curves_json(view)}});
      json flags = json::object();
      for (const auto& [id, infos] : view.testcases) {
        json arr = json::array();
        for (const auto& tc : infos)
          arr.push_back({{"id", tc.tc_id},
                         {"crashed", tc.crashed},
                         {"timed_out", tc.timed_out},
                         {"replay_flaky", tc.replay_flaky}});
        flags[id] = std::move(arr);
      }
      return ok({{"until_s", until},
                 {"curves", curves_json(view)},
                 {"histogram", histogram_json(view)},
                 {"interestingness", interestingness_json(view.interestingness)},
                 {"flags", std::move(flags)}});
    }

    if (route == "embedding" && parts.size() == 2) {
      const double until = parse_until(query, a.horizon_s);
      json points = json::array();
      json params = nullptr;
      if (doc_.embedding) {
        params = tsne_params_json(doc_.embedding->params);
        for (const auto& p : doc_.embedding->points) {
          const auto* tc = a.find_testcase(p.fuzzer_id, p.tc_id);
          if (tc && tc->discovery_time_s <= until) points.push_back(embedding_point_json(p));
        }
      }
      return ok({{"until_s", until}, {"params", std::move(params)}, {"points", std::move(points)}});
    }

    if (route == "graph" && parts.size() == 3) {
      const std::string fuzzer(parts[2]);
      auto git = doc_.graphs.find(fuzzer);
      if (!a.has_fuzzer(fuzzer) || git == doc_.graphs.end())
        throw HttpError{404, fmt::format("unknown fuzzer '{}'", fuzzer)};
      const double until = parse_until(query, a.horizon_s);
      const auto view = filter_graph(git->second, until);

      json compare = nullptr;
      json highlighted = json::array();
      if (auto cit = query.find("compare"); cit != query.end() && !cit->second.empty()) {
        if (!a.has_fuzzer(cit->second))
          throw HttpError{404, fmt::format("unknown compare fuzzer '{}'", cit->second)};
        try {
          highlighted = overlay_interestingness(view, a.interestingness, cit->second);
        } catch (const Error& e) {
          throw HttpError{404, e.what()};
        }
        compare = cit->second;
      }

      json nodes = json::array();
      for (const auto& [id, n] : view.nodes) {
        json parents = json::array();
        if (const auto* tc = a.find_testcase(fuzzer, id))
          for (TestcaseId p : tc->parent_ids)
            if (view.edges.contains({p, id})) parents.push_back(p);
        nodes.push_back({{"id", id},
                         {"time_s", n.discovery_time_s},
                         {"op", n.mutation_op ? json(*n.mutation_op) : json(nullptr)},
                         {"level", n.level},
                         {"parents", std::move(parents)}});
      }
      json edges = json::array();
      for (const auto& [p, c] : view.edges) edges.push_back({p, c});
      return ok({{"fuzzer", fuzzer},
                 {"until_s", until},
                 {"nodes", std::move(nodes)},
                 {"edges", std::move(edges)},
                 {"compare", std::move(compare)},
                 {"highlighted", std::move(highlighted)}});
    }

    if (route == "testcase" && parts.size() == 4) {
      const std::string fuzzer(parts[2]);
      if (!a.has_fuzzer(fuzzer)) throw HttpError{404, fmt::format("unknown fuzzer '{}'", fuzzer)};
      TestcaseId id = 0;
      const auto s = parts[3];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
      const auto* tc = (ec == std::errc() && ptr == s.data() + s.size())
                           ? a.find_testcase(fuzzer, id)
                           : nullptr;
      if (!tc) throw HttpError{404, fmt::format("unknown testcase {}/{}", fuzzer, s)};

      json j = testcase_json(*tc);
      j["fuzzer"] = fuzzer;
      json interesting = json::array();
      if (auto oit = a.interestingness.by_owner.find(fuzzer);
          oit != a.interestingness.by_owner.end())
        if (auto rit = oit->second.find(id); rit != oit->second.end()) interesting = rit->second;
      j["interesting_for"] = std::move(interesting);
      return ok(j);
    }

    throw HttpError{404, fmt::format("no route for {}", path)};
  } catch (const HttpError& e) {
    return error_response(e);
  } catch (const Error& e) {
    const int status = e.kind() == ErrorKind::OutOfRange ? 422 : 500;
    return error_response({status, e.what()});
  }
}

}  // namespace fuzzsplore
