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

#include "fuzzsplore/embedding.hpp"

#include <spdlog/spdlog.h>

namespace fuzzsplore {

Eigen::SparseMatrix<double, Eigen::RowMajor> pooled_rows(std::span<const HitcountVector> rows,
                                                         Metric metric) {
  const std::size_t width = rows.empty() ? 0 : rows.front().map_size();
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].map_size() != width)
      throw Error(ErrorKind::MapSizeMismatch, "pooled rows must share one map size");
    for (const auto& e : rows[r].entries())
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(e.index),
                            metric == Metric::HammingBinary ? 1.0 : double(e.count));
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> x(static_cast<Eigen::Index>(rows.size()),
                                                 static_cast<Eigen::Index>(width));
  x.setFromTriplets(triplets.begin(), triplets.end());
  return x;
}

tsne::Matrix<double> metric_sq_distances(std::span<const HitcountVector> rows, Metric metric) {
  tsne::Matrix<double> d = tsne::squared_distances(pooled_rows(rows, metric));
  // On 0/1 rows the squared Euclidean distance is the Hamming distance.
  if (metric == Metric::HammingBinary) d = d.cwiseProduct(d);
  return d;
}

tsne::Affinities<double> pairwise_affinities(std::span<const HitcountVector> rows,
                                             const TsneParams& params) {
  params.validate();
  if (rows.size() < 2)
    throw Error(ErrorKind::DegenerateInput, "pairwise affinities need at least 2 rows");
  return tsne::affinities(metric_sq_distances(rows, params.metric), params.perplexity);
}

tsne::Embedding<double> run_tsne(std::span<const HitcountVector> rows, const TsneParams& params) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n <= 1) return tsne::Embedding<double>::Zero(n, 2);
  const auto aff = pairwise_affinities(rows, params);
  auto y = tsne::gaussian_init<double>(n, params.rng_seed);
  y.rowwise() -= y.colwise().mean();
  const tsne::Observer<double> progress = [&](int iter, const tsne::Embedding<double>& cur) {
    if ((iter + 1) % 100 == 0 && spdlog::should_log(spdlog::level::debug))
      spdlog::debug("t-SNE iteration {}: KL = {:.6f}", iter + 1,
                    tsne::kl_divergence(aff.joint, cur));
  };
  return tsne::optimize(aff.joint, std::move(y), params, progress);
}

Embedding embed_artifact(const AnalysisArtifact& artifact, const TsneParams& params) {
  std::vector<HitcountVector> rows;
  Embedding out{params, {}};
  for (const auto& f : artifact.fuzzers) {
    auto it = artifact.matrices.find(f.id);
    if (it == artifact.matrices.end()) continue;
    for (const auto& row : it->second) {
      rows.push_back(row.vector);
      out.points.push_back({f.id, row.tc_id, 0.0, 0.0});
    }
  }
  const auto y = run_tsne(rows, params);
  for (std::size_t k = 0; k < out.points.size(); ++k) {
    out.points[k].x = y(static_cast<Eigen::Index>(k), 0);
    out.points[k].y = y(static_cast<Eigen::Index>(k), 1);
  }
  return out;
}

}  // namespace fuzzsplore
