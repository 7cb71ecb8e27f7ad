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

#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "fuzzsplore/analysis.hpp"
#include "fuzzsplore/coverage.hpp"
#include "fuzzsplore/tsne.hpp"

namespace fuzzsplore {

using TsneParams = tsne::Params;
using tsne::Metric;

struct EmbeddingPoint {
  std::string fuzzer_id;
  TestcaseId tc_id;
  double x;
  double y;

  friend bool operator==(const EmbeddingPoint&, const EmbeddingPoint&) = default;
};

struct Embedding {
  TsneParams params;
  std::vector<EmbeddingPoint> points;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Stacks coverage rows into a sparse matrix: bucketed counts for
/// EuclideanBucketed, the 0/1 support indicator for HammingBinary.
Eigen::SparseMatrix<double, Eigen::RowMajor> pooled_rows(std::span<const HitcountVector> rows,
                                                         Metric metric);

/// Squared metric distances between rows. For HammingBinary this is the
/// squared Hamming distance.
tsne::Matrix<double> metric_sq_distances(std::span<const HitcountVector> rows, Metric metric);

tsne::Affinities<double> pairwise_affinities(std::span<const HitcountVector> rows,
                                             const TsneParams& params);

/// n x 2 embedding; a single row lands at the origin. Deterministic for a
/// given row order and parameters.
tsne::Embedding<double> run_tsne(std::span<const HitcountVector> rows, const TsneParams& params);

/// Pools all fuzzers' matrices (campaign order, then replay order) and embeds
/// them jointly.
Embedding embed_artifact(const AnalysisArtifact& artifact, const TsneParams& params);

}  // namespace fuzzsplore
