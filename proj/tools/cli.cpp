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

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <fmt/format.h>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fuzzsplore/analysis.hpp"
#include "fuzzsplore/api.hpp"
#include "fuzzsplore/artifact.hpp"
#include "fuzzsplore/campaign.hpp"
#include "fuzzsplore/embedding.hpp"
#include "fuzzsplore/error.hpp"
#include "fuzzsplore/genealogy.hpp"

namespace fuzzsplore::cli {
namespace fs = std::filesystem;

namespace {

void init_logging() {
  auto logger = spdlog::stderr_color_mt("fuzzsplore");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("FUZZSPLORE_LOG")) spdlog::cfg::helpers::load_levels(level);
}

struct AnalyzeOptions {
  fs::path campaign;
  fs::path out;
  TsneParams tsne;
  unsigned jobs = 1;
  double failure_threshold = 0.5;
  bool no_embedding = false;
};

void print_summary(const AnalysisArtifact& a) {
  std::cout << fmt::format("{:<20} {:>8} {:>12} {:>8} {:>8}\n", "fuzzer", "queue", "final_edges",
                           "crashes", "flaky");
  for (const auto& f : a.fuzzers) {
    const auto& tcs = a.testcases.at(f.id);
    const auto& pts = a.curves.at(f.id).points;
    const auto crashes = std::count_if(tcs.begin(), tcs.end(), [](auto& t) { return t.crashed; });
    const auto flaky = std::count_if(tcs.begin(), tcs.end(), [](auto& t) { return t.replay_flaky; });
    std::cout << fmt::format("{:<20} {:>8} {:>12} {:>8} {:>8}\n", f.id, tcs.size(),
                             pts.empty() ? 0 : pts.back().edges, crashes, flaky);
  }
}

int analyze(const AnalyzeOptions& opt) {
  CampaignConfig campaign;
  QueueSet queues;
  try {
    campaign = load_campaign(opt.campaign);
    for (const auto& f : campaign.fuzzers) {
      queues[f.fuzzer_id] = ingest_queue(f, campaign);
      spdlog::info("fuzzer {}: {} testcases", f.fuzzer_id, queues[f.fuzzer_id].size());
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kIoError;
  }

  ArtifactDocument doc;
  try {
    doc.analysis = compute_analysis(campaign, queues, {opt.jobs, opt.failure_threshold});
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return e.kind() == ErrorKind::ExecutorThresholdExceeded ? kExecutorError : kConfigError;
  }

  for (const auto& f : campaign.fuzzers)
    doc.graphs[f.fuzzer_id] = build_graph(f.fuzzer_id, queues[f.fuzzer_id]);

  if (!opt.no_embedding) {
    spdlog::info("embedding {} testcases (perplexity {}, seed {})",
                 [&] {
                   std::size_t n = 0;
                   for (const auto& [_, q] : queues) n += q.size();
                   return n;
                 }(),
                 opt.tsne.perplexity, opt.tsne.rng_seed);
    try {
      doc.embedding = embed_artifact(doc.analysis, opt.tsne);
    } catch (const Error& e) {
      spdlog::error("{}", e.what());
      return kConfigError;
    }
  }

  try {
    save_artifact(opt.out, doc);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kIoError;
  }
  print_summary(doc.analysis);
  return kOk;
}

int serve_command(const ServeConfig& cfg) {
  std::optional<ApiService> api;
  try {
    api.emplace(load_artifact(cfg.artifact_path));
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  }
  try {
    if (!serve(*api, cfg)) {
      spdlog::error("cannot bind {}", cfg.bind_address);
      return kUsage;
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  if (!spdlog::get("fuzzsplore")) init_logging();

  CLI::App app{"Replay fuzzer queues and explore coverage, interestingness and genealogy"};
  app.require_subcommand(1);

  AnalyzeOptions aopt;
  std::string metric = "euclidean_bucketed";
  auto* analyze_cmd = app.add_subcommand("analyze", "Replay queues and write an analysis artifact");
  analyze_cmd->add_option("--campaign", aopt.campaign, "Campaign JSON")->required();
  analyze_cmd->add_option("--out", aopt.out, "Artifact JSON to write")->required();
  analyze_cmd->add_option("--seed", aopt.tsne.rng_seed, "t-SNE RNG seed")->capture_default_str();
  analyze_cmd->add_option("--perplexity", aopt.tsne.perplexity, "t-SNE perplexity")
      ->capture_default_str();
  analyze_cmd->add_option("--iterations", aopt.tsne.iterations, "t-SNE iterations")
      ->capture_default_str();
  analyze_cmd->add_option("--metric", metric, "Distance over coverage vectors")
      ->check(CLI::IsMember({"euclidean_bucketed", "hamming_binary"}))
      ->capture_default_str();
  analyze_cmd->add_option("--jobs", aopt.jobs, "Parallel executions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze_cmd->add_option("--failure-threshold", aopt.failure_threshold,
                          "Abort when more than this fraction of a queue fails to execute")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  analyze_cmd->add_flag("--no-embedding", aopt.no_embedding, "Skip t-SNE");

  ServeConfig sopt;
  std::string static_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve an artifact over HTTP");
  serve_cmd->add_option("--data", sopt.artifact_path, "Artifact JSON")->required();
  serve_cmd->add_option("--bind", sopt.bind_address, "host:port")->capture_default_str();
  serve_cmd->add_option("--static", static_dir, "Directory of built UI assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (*analyze_cmd) {
    aopt.tsne.metric = metric == "hamming_binary" ? Metric::HammingBinary : Metric::EuclideanBucketed;
    try {
      aopt.tsne.early_exaggeration_iters =
          std::min(aopt.tsne.early_exaggeration_iters, aopt.tsne.iterations);
      aopt.tsne.validate();
    } catch (const Error& e) {
      spdlog::error("{}", e.what());
      return kConfigError;
    }
    return analyze(aopt);
  }
  if (!static_dir.empty()) sopt.static_dir = static_dir;
  return serve_command(sopt);
}

}  // namespace fuzzsplore::cli
