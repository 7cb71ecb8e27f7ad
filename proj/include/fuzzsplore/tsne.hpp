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

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <fmt/format.h>

#include "fuzzsplore/error.hpp"

/**
 * @file tsne.hpp
 *
 * Exact t-SNE over dense Eigen matrices: Gaussian input affinities calibrated
 * to a perplexity, Student-t output similarities, and gradient descent with
 * momentum, per-coordinate gains and early exaggeration. All kernels are
 * templated on the scalar type.
 */

namespace fuzzsplore::tsne {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Embedding = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

enum class Metric { EuclideanBucketed, HammingBinary };

struct Params {
  double perplexity = 30.0;
  int iterations = 1000;
  double early_exaggeration_factor = 12.0;
  int early_exaggeration_iters = 250;
  double learning_rate = 200.0;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_iter = 250;
  std::uint64_t rng_seed = 0;
  Metric metric = Metric::EuclideanBucketed;

  void validate() const {
    if (!(perplexity >= 1.0))
      throw Error(ErrorKind::ValidationError, "perplexity must be >= 1");
    if (early_exaggeration_iters < 0 || iterations < early_exaggeration_iters)
      throw Error(ErrorKind::ValidationError,
                  "iterations must be >= early_exaggeration_iters >= 0");
    if (!(learning_rate > 0.0))
      throw Error(ErrorKind::ValidationError, "learning_rate must be > 0");
  }

  friend bool operator==(const Params&, const Params&) = default;
};

/// Perplexity actually targeted for n points: the requested value clamped to
/// (n - 1) / 3, and never below 1.
inline double effective_perplexity(double perplexity, Eigen::Index n) {
  const double cap = static_cast<double>(n - 1) / 3.0;
  return std::max(1.0, std::min(perplexity, cap));
}

/// Squared Euclidean distances between the rows of a sparse matrix, computed
/// from the Gram matrix. Exact for integer-valued inputs.
template <typename Derived>
Matrix<typename Derived::Scalar> squared_distances(const Eigen::SparseMatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
  const Sparse x = rows.derived();
  const Eigen::Index n = x.rows();
  const Matrix<Scalar> gram = Matrix<Scalar>(x * Sparse(x.transpose()));
  const Vector<Scalar> norms = gram.diagonal();
  Matrix<Scalar> d = (norms.replicate(1, n) + norms.transpose().replicate(n, 1) - 2 * gram)
                         .cwiseMax(Scalar(0));
  d.diagonal().setZero();
  return d;
}

template <typename Scalar>
struct Affinities {
  Matrix<Scalar> conditional;  // row i holds p_{j|i}
  Matrix<Scalar> joint;        // symmetric, sums to 1
  Vector<Scalar> beta;         // precision 1 / (2 sigma_i^2) per row
  Vector<Scalar> perplexity;   // achieved per row
  Scalar target_perplexity;
};

/// Shannon entropy (nats) of one conditional row, skipping the diagonal.
template <typename Derived>
typename Derived::Scalar row_entropy(const Eigen::MatrixBase<Derived>& row, Eigen::Index self) {
  using Scalar = typename Derived::Scalar;
  Scalar h = 0;
  for (Eigen::Index j = 0; j < row.size(); ++j)
    if (j != self && row(j) > 0) h -= row(j) * std::log(row(j));
  return h;
}

/**
 * Calibrates one Gaussian bandwidth per row of `sq_dist` so that the
 * conditional distribution has the requested perplexity (after clamping for
 * small n), then symmetrizes into the joint distribution.
 *
 * The bandwidth search stops at an absolute entropy error of `tolerance` nats
 * or after `max_steps` bisection steps. Rows whose off-diagonal distances are
 * all equal get the uniform distribution, whatever the target.
 */
template <typename Derived>
Affinities<typename Derived::Scalar> affinities(const Eigen::MatrixBase<Derived>& sq_dist,
                                                double perplexity, double tolerance = 1e-5,
                                                int max_steps = 50) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = sq_dist.rows();
  if (n < 2 || sq_dist.cols() != n)
    throw Error(ErrorKind::DegenerateInput,
                fmt::format("affinities need a square distance matrix with n >= 2, got {}x{}",
                            n, sq_dist.cols()));

  Affinities<Scalar> a;
  a.target_perplexity = static_cast<Scalar>(effective_perplexity(perplexity, n));
  a.conditional = Matrix<Scalar>::Zero(n, n);
  a.beta = Vector<Scalar>::Zero(n);
  a.perplexity = Vector<Scalar>::Zero(n);
  const Scalar target = std::log(a.target_perplexity);

  Vector<Scalar> shifted(n);
  Vector<Scalar> p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar d_min = std::numeric_limits<Scalar>::max();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) d_min = std::min(d_min, sq_dist(i, j));
    // Shifting by the row minimum leaves the normalized row unchanged and
    // keeps exp() away from underflow.
    Scalar d_mean = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      shifted(j) = j == i ? Scalar(0) : sq_dist(i, j) - d_min;
      d_mean += shifted(j);
    }
    d_mean /= static_cast<Scalar>(n - 1);

    if (d_mean <= 0) {
      a.conditional.row(i).setConstant(Scalar(1) / static_cast<Scalar>(n - 1));
      a.conditional(i, i) = 0;
      a.perplexity(i) = static_cast<Scalar>(n - 1);
      continue;
    }

    Scalar beta = Scalar(1) / d_mean;
    Scalar lo = 0, hi = std::numeric_limits<Scalar>::infinity();
    auto evaluate = [&](Scalar b) {
      Scalar sum = 0, weighted = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        p(j) = j == i ? Scalar(0) : std::exp(-b * shifted(j));
        sum += p(j);
        weighted += shifted(j) * p(j);
      }
      p /= sum;
      return std::log(sum) + b * weighted / sum;
    };
    Scalar best_beta = beta, best_err = std::numeric_limits<Scalar>::infinity();
    for (int step = 0; step < max_steps; ++step) {
      const Scalar h = evaluate(beta);
      const Scalar err = h - target;
      if (std::abs(err) < best_err) {
        best_err = std::abs(err);
        best_beta = beta;
      }
      if (std::abs(err) < tolerance) break;
      if (err > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2 : (beta + hi) / 2;
      } else {
        hi = beta;
        beta = (beta + lo) / 2;
      }
    }
    evaluate(best_beta);
    a.beta(i) = best_beta;
    a.conditional.row(i) = p.transpose();
    a.perplexity(i) = std::exp(row_entropy(a.conditional.row(i), i));
  }

  a.joint = (a.conditional + a.conditional.transpose()) / static_cast<Scalar>(2 * n);
  return a;
}

/// Student-t similarities w_ij = 1 / (1 + |y_i - y_j|^2) with a zero diagonal.
template <typename Derived>
Matrix<typename Derived::Scalar> student_t_kernel(const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = y.rows();
  const Vector<Scalar> norms = y.rowwise().squaredNorm();
  const Matrix<Scalar> gram = y * y.transpose();
  Matrix<Scalar> sq = (norms.replicate(1, n) + norms.transpose().replicate(n, 1) - 2 * gram)
                          .cwiseMax(Scalar(0));
  Matrix<Scalar> w = (Scalar(1) + sq.array()).inverse().matrix();
  w.diagonal().setZero();
  return w;
}

namespace detail {

template <typename DerivedP, typename Scalar>
Scalar kl_from_kernel(const Eigen::MatrixBase<DerivedP>& p, const Matrix<Scalar>& w, Scalar z) {
  Scalar kl = 0;
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      if (i != j && p(i, j) > 0) kl += p(i, j) * std::log(p(i, j) * z / w(i, j));
  return kl;
}

template <typename DerivedP, typename DerivedY, typename Scalar>
Embedding<Scalar> gradient_from_kernel(const Eigen::MatrixBase<DerivedP>& p,
                                       const Eigen::MatrixBase<DerivedY>& y,
                                       const Matrix<Scalar>& w, Scalar z) {
  const Matrix<Scalar> m = ((p.array() - w.array() / z) * w.array()).matrix();
  const Vector<Scalar> row_sums = m.rowwise().sum();
  return Scalar(4) * (row_sums.asDiagonal() * y - m * y);
}

}  // namespace detail

/// KL(P || Q) where Q is the normalized Student-t similarity of y.
template <typename DerivedP, typename DerivedY>
typename DerivedP::Scalar kl_divergence(const Eigen::MatrixBase<DerivedP>& p,
                                        const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedP::Scalar;
  const Matrix<Scalar> w = student_t_kernel(y);
  return detail::kl_from_kernel(p, w, w.sum());
}

/// dKL/dy_i = 4 sum_j (p_ij - q_ij) w_ij (y_i - y_j).
template <typename DerivedP, typename DerivedY>
Embedding<typename DerivedP::Scalar> kl_gradient(const Eigen::MatrixBase<DerivedP>& p,
                                                 const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedP::Scalar;
  const Matrix<Scalar> w = student_t_kernel(y);
  return detail::gradient_from_kernel(p, y, w, w.sum());
}

/// n x 2 Gaussian draws with standard deviation `sigma`, filled row by row
/// from a 64-bit Mersenne Twister through Box-Muller.
template <typename Scalar>
Embedding<Scalar> gaussian_init(Eigen::Index n, std::uint64_t seed, Scalar sigma = Scalar(1e-4)) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  Embedding<Scalar> y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    y(i, 0) = static_cast<Scalar>(sigma * r * std::cos(theta));
    y(i, 1) = static_cast<Scalar>(sigma * r * std::sin(theta));
  }
  return y;
}

/// Called after each iteration with (iteration, embedding).
template <typename Scalar>
using Observer = std::function<void(int, const Embedding<Scalar>&)>;

/**
 * Gradient descent on KL(P || Q) from the starting embedding `y`.
 *
 * P is multiplied by the early exaggeration factor for the first
 * early_exaggeration_iters iterations; momentum switches from
 * momentum_initial to momentum_final at momentum_switch_iter. Step sizes use
 * per-coordinate gains (+0.2 when the gradient flips sign against the update,
 * x0.8 otherwise, floored at 0.01). The embedding is recentered every
 * iteration.
 *
 * Returns the iterate with the lowest KL(P || Q), the starting point
 * included. On degenerate inputs the descent can overshoot into a far plateau
 * that is worse than where it started.
 */
template <typename DerivedP, typename Scalar = typename DerivedP::Scalar>
Embedding<Scalar> optimize(const Eigen::MatrixBase<DerivedP>& p, Embedding<Scalar> y,
                           const Params& params, const Observer<Scalar>& observer = {}) {
  params.validate();
  const Eigen::Index n = y.rows();
  Embedding<Scalar> update = Embedding<Scalar>::Zero(n, 2);
  Embedding<Scalar> gains = Embedding<Scalar>::Ones(n, 2);
  const Matrix<Scalar> exaggerated = static_cast<Scalar>(params.early_exaggeration_factor) * p;

  Embedding<Scalar> best = y;
  Scalar best_kl = std::numeric_limits<Scalar>::infinity();
  auto consider = [&](const Matrix<Scalar>& w, Scalar z) {
    const Scalar kl = detail::kl_from_kernel(p, w, z);
    if (kl < best_kl) {
      best_kl = kl;
      best = y;
    }
  };

  for (int iter = 0; iter < params.iterations; ++iter) {
    const bool lying = iter < params.early_exaggeration_iters;
    const Matrix<Scalar> w = student_t_kernel(y);
    const Scalar z = w.sum();
    consider(w, z);
    const Embedding<Scalar> grad = lying ? detail::gradient_from_kernel(exaggerated, y, w, z)
                                         : detail::gradient_from_kernel(p, y, w, z);
    if (!grad.allFinite())
      throw Error(ErrorKind::NonFiniteGradient,
                  fmt::format("non-finite gradient at iteration {} (max |y| = {})", iter,
                              static_cast<double>(y.cwiseAbs().maxCoeff())));

    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index d = 0; d < 2; ++d) {
        const bool flipped = (grad(i, d) > 0) != (update(i, d) > 0);
        gains(i, d) = std::max(flipped ? gains(i, d) + Scalar(0.2) : gains(i, d) * Scalar(0.8),
                               Scalar(0.01));
      }
    const auto momentum = static_cast<Scalar>(
        iter < params.momentum_switch_iter ? params.momentum_initial : params.momentum_final);
    update = momentum * update -
             static_cast<Scalar>(params.learning_rate) * gains.cwiseProduct(grad);
    y += update;
    y.rowwise() -= y.colwise().mean();
    if (observer) observer(iter, y);
  }
  const Matrix<Scalar> w = student_t_kernel(y);
  consider(w, w.sum());
  return best;
}

}  // namespace fuzzsplore::tsne
