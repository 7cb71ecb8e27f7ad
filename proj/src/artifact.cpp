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

#include "fuzzsplore/artifact.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fuzzsplore/error.hpp"

namespace fuzzsplore {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json optional_string(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

std::optional<std::string> read_optional_string(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

const char* metric_name(Metric m) {
  return m == Metric::HammingBinary ? "hamming_binary" : "euclidean_bucketed";
}

}  // namespace

json fuzzers_json(const AnalysisArtifact& a) {
  json out = json::array();
  for (const auto& f : a.fuzzers)
    out.push_back({{"id", f.id}, {"name", f.name}, {"color", optional_string(f.color)}});
  return out;
}

json curves_json(const AnalysisArtifact& a) {
  json out = json::object();
  for (const auto& [id, curve] : a.curves) {
    json pts = json::array();
    for (const auto& p : curve.points) pts.push_back({p.time_s, p.edges});
    out[id] = std::move(pts);
  }
  return out;
}

json histogram_json(const AnalysisArtifact& a) {
  json out = json::object();
  for (const auto& [id, hist] : a.new_interesting_histogram) {
    json buckets = json::array();
    for (const auto& [second, count] : hist) buckets.push_back({second, count});
    out[id] = std::move(buckets);
  }
  return out;
}

json interestingness_json(const InterestingnessMap& m) {
  json out = json::object();
  for (const auto& [owner, rows] : m.by_owner) {
    json o = json::object();
    for (const auto& [tc, set] : rows) o[std::to_string(tc)] = set;
    out[owner] = std::move(o);
  }
  return out;
}

json testcase_json(const TestcaseInfo& tc) {
  return {{"id", tc.tc_id},
          {"time_s", tc.discovery_time_s},
          {"parents", tc.parent_ids},
          {"op", optional_string(tc.mutation_op)},
          {"crashed", tc.crashed},
          {"timed_out", tc.timed_out},
          {"replay_flaky", tc.replay_flaky},
          {"errors", tc.errors}};
}

json tsne_params_json(const TsneParams& p) {
  return {{"perplexity", p.perplexity},
          {"iterations", p.iterations},
          {"early_exaggeration_factor", p.early_exaggeration_factor},
          {"early_exaggeration_iters", p.early_exaggeration_iters},
          {"learning_rate", p.learning_rate},
          {"momentum_initial", p.momentum_initial},
          {"momentum_final", p.momentum_final},
          {"momentum_switch_iter", p.momentum_switch_iter},
          {"rng_seed", p.rng_seed},
          {"metric", metric_name(p.metric)}};
}

json embedding_point_json(const EmbeddingPoint& p) {
  return {{"fuzzer", p.fuzzer_id}, {"id", p.tc_id}, {"x", p.x}, {"y", p.y}};
}

json graph_json(const GenerationsGraph& g) {
  json nodes = json::array();
  for (const auto& [id, n] : g.nodes)
    nodes.push_back({{"id", id},
                     {"time_s", n.discovery_time_s},
                     {"op", optional_string(n.mutation_op)},
                     {"level", n.level}});
  json edges = json::array();
  for (const auto& [p, c] : g.edges) edges.push_back({p, c});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json to_json(const ArtifactDocument& doc) {
  const auto& a = doc.analysis;
  json j;
  j["schema"] = kArtifactSchema;
  j["fingerprint"] = {{"config_sha256", a.fingerprint.config_sha256},
                      {"queue_sizes", a.fingerprint.queue_sizes}};
  j["horizon_s"] = a.horizon_s;
  j["map_size"] = a.map_size;
  j["bucketing"] = a.bucketing == Bucketing::Raw ? "raw" : "afl_buckets";
  j["fuzzers"] = fuzzers_json(a);

  json testcases = json::object();
  for (const auto& [id, infos] : a.testcases) {
    json arr = json::array();
    for (const auto& tc : infos) arr.push_back(testcase_json(tc));
    testcases[id] = std::move(arr);
  }
  j["testcases"] = std::move(testcases);
  j["curves"] = curves_json(a);
  j["interestingness"] = interestingness_json(a.interestingness);

  json matrices = json::object();
  for (const auto& [id, rows] : a.matrices) {
    json arr = json::array();
    for (const auto& row : rows) {
      json cov = json::array();
      for (const auto& e : row.vector.entries()) cov.push_back({e.index, e.count});
      arr.push_back({{"id", row.tc_id}, {"cov", std::move(cov)}});
    }
    matrices[id] = std::move(arr);
  }
  j["matrices"] = std::move(matrices);
  j["histogram"] = histogram_json(a);

  json graphs = json::object();
  for (const auto& [id, g] : doc.graphs) graphs[id] = graph_json(g);
  j["graphs"] = std::move(graphs);

  if (doc.embedding) {
    json pts = json::array();
    for (const auto& p : doc.embedding->points) pts.push_back(embedding_point_json(p));
    j["embedding"] = {{"params", tsne_params_json(doc.embedding->params)},
                      {"points", std::move(pts)}};
  } else {
    j["embedding"] = nullptr;
  }
  return j;
}

namespace {

TsneParams params_from_json(const json& j) {
  TsneParams p;
  p.perplexity = j.at("perplexity").get<double>();
  p.iterations = j.at("iterations").get<int>();
  p.early_exaggeration_factor = j.at("early_exaggeration_factor").get<double>();
  p.early_exaggeration_iters = j.at("early_exaggeration_iters").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.momentum_initial = j.at("momentum_initial").get<double>();
  p.momentum_final = j.at("momentum_final").get<double>();
  p.momentum_switch_iter = j.at("momentum_switch_iter").get<int>();
  p.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  const auto metric = j.at("metric").get<std::string>();
  if (metric == "euclidean_bucketed") p.metric = Metric::EuclideanBucketed;
  else if (metric == "hamming_binary") p.metric = Metric::HammingBinary;
  else throw Error(ErrorKind::ArtifactMalformed, "unknown metric " + metric);
  return p;
}

template <typename Fn>
auto section(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ArtifactMalformed, fmt::format("/{}: {}", name, e.what()));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ArtifactMalformed) throw;
    throw Error(ErrorKind::ArtifactMalformed, fmt::format("/{}: {}", name, e.what()));
  }
}

}  // namespace

ArtifactDocument artifact_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kArtifactSchema)
    throw Error(ErrorKind::ArtifactMalformed,
                fmt::format("/schema: expected \"{}\"", kArtifactSchema));
  ArtifactDocument doc;
  auto& a = doc.analysis;

  section("fingerprint", [&] {
    a.fingerprint.config_sha256 = j.at("fingerprint").at("config_sha256").get<std::string>();
    a.fingerprint.queue_sizes =
        j.at("fingerprint").at("queue_sizes").get<std::map<std::string, std::size_t>>();
  });
  section("horizon_s", [&] { a.horizon_s = j.at("horizon_s").get<double>(); });
  section("map_size", [&] { a.map_size = j.at("map_size").get<std::size_t>(); });
  section("bucketing", [&] {
    const auto b = j.at("bucketing").get<std::string>();
    if (b != "raw" && b != "afl_buckets")
      throw Error(ErrorKind::ArtifactMalformed, "unknown bucketing " + b);
    a.bucketing = b == "raw" ? Bucketing::Raw : Bucketing::AflBuckets;
  });
  section("fuzzers", [&] {
    for (const auto& f : j.at("fuzzers"))
      a.fuzzers.push_back({f.at("id").get<std::string>(), f.at("name").get<std::string>(),
                           read_optional_string(f.at("color"))});
  });
  section("testcases", [&] {
    for (const auto& [id, arr] : j.at("testcases").items()) {
      auto& infos = a.testcases[id];
      for (const auto& t : arr) {
        TestcaseInfo tc;
        tc.tc_id = t.at("id").get<TestcaseId>();
        tc.discovery_time_s = t.at("time_s").get<double>();
        tc.parent_ids = t.at("parents").get<std::vector<TestcaseId>>();
        tc.mutation_op = read_optional_string(t.at("op"));
        tc.crashed = t.at("crashed").get<bool>();
        tc.timed_out = t.at("timed_out").get<bool>();
        tc.replay_flaky = t.at("replay_flaky").get<bool>();
        tc.errors = t.at("errors").get<std::vector<std::string>>();
        infos.push_back(std::move(tc));
      }
    }
  });
  section("curves", [&] {
    for (const auto& [id, pts] : j.at("curves").items()) {
      auto& curve = a.curves[id];
      for (const auto& p : pts)
        curve.points.push_back({p.at(0).get<double>(), p.at(1).get<std::size_t>()});
    }
  });
  section("interestingness", [&] {
    for (const auto& [owner, rows] : j.at("interestingness").items()) {
      auto& m = a.interestingness.by_owner[owner];
      for (const auto& [tc, set] : rows.items())
        m[std::stoull(tc)] = set.get<std::set<std::string>>();
    }
  });
  section("matrices", [&] {
    for (const auto& [id, rows] : j.at("matrices").items()) {
      auto& matrix = a.matrices[id];
      for (const auto& row : rows) {
        std::vector<EdgeHit> entries;
        for (const auto& e : row.at("cov")) {
          const auto count = e.at(1).get<unsigned>();
          if (count < 1 || count > 255)
            throw Error(ErrorKind::ArtifactMalformed, fmt::format("count {} out of range", count));
          entries.push_back({e.at(0).get<EdgeIndex>(), static_cast<HitCount>(count)});
        }
        matrix.push_back({row.at("id").get<TestcaseId>(),
                          HitcountVector::from_entries(a.map_size, std::move(entries))});
      }
    }
  });
  section("histogram", [&] {
    for (const auto& [id, buckets] : j.at("histogram").items()) {
      auto& hist = a.new_interesting_histogram[id];
      for (const auto& b : buckets) hist[b.at(0).get<std::int64_t>()] = b.at(1).get<std::size_t>();
    }
  });
  section("graphs", [&] {
    for (const auto& [id, gj] : j.at("graphs").items()) {
      GenerationsGraph g;
      g.fuzzer_id = id;
      for (const auto& n : gj.at("nodes"))
        g.nodes[n.at("id").get<TestcaseId>()] = {n.at("time_s").get<double>(),
                                                 read_optional_string(n.at("op")),
                                                 n.at("level").get<std::size_t>()};
      for (const auto& e : gj.at("edges"))
        g.edges.insert({e.at(0).get<TestcaseId>(), e.at(1).get<TestcaseId>()});
      doc.graphs[id] = std::move(g);
    }
  });
  section("embedding", [&] {
    const auto& e = j.at("embedding");
    if (e.is_null()) return;
    Embedding emb;
    emb.params = params_from_json(e.at("params"));
    for (const auto& p : e.at("points"))
      emb.points.push_back({p.at("fuzzer").get<std::string>(), p.at("id").get<TestcaseId>(),
                            p.at("x").get<double>(), p.at("y").get<double>()});
    doc.embedding = std::move(emb);
  });

  for (const auto& f : a.fuzzers)
    if (!a.testcases.contains(f.id) || !a.curves.contains(f.id) || !a.matrices.contains(f.id) ||
        !a.new_interesting_histogram.contains(f.id) ||
        !a.interestingness.by_owner.contains(f.id))
      throw Error(ErrorKind::ArtifactMalformed,
                  fmt::format("fuzzer '{}' is missing from one of the per-fuzzer sections", f.id));
  return doc;
}

std::string dump_artifact(const ArtifactDocument& doc) { return to_json(doc).dump(1) + "\n"; }

void save_artifact(const fs::path& path, const ArtifactDocument& doc) {
  const std::string text = dump_artifact(doc);
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())))
    throw Error(ErrorKind::Io, fmt::format("cannot write artifact {}", path.string()));
}

ArtifactDocument load_artifact(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot read artifact {}", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ArtifactMalformed,
                fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  return artifact_from_json(j);
}

}  // namespace fuzzsplore
