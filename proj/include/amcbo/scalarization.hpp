#pragma once

// Weighted Chebyshev scalarization and the softmax consensus point.

#include "amcbo/core.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace amcbo {

/// max_k w_k |g_k|
template <typename DerivedG, typename DerivedW>
typename DerivedG::Scalar chebyshev(const Eigen::MatrixBase<DerivedG>& g,
                                    const Eigen::MatrixBase<DerivedW>& w) {
  if (g.size() != w.size()) throw InvalidInput("chebyshev: dimension mismatch");
  return (w.array() * g.array().abs()).maxCoeff();
}

/// Indices 0..n-1.
inline std::vector<Index> full_batch(Index n) {
  std::vector<Index> batch(static_cast<std::size_t>(n));
  std::iota(batch.begin(), batch.end(), Index(0));
  return batch;
}

/// Softmax-weighted mean of the batch rows of `positions` with weights
/// exp(-alpha * (score_j - min score)). Shifting by the batch minimum keeps
/// the exponentials in (0, 1]; terms that underflow to zero are skipped.
template <typename Scalar>
Vector<Scalar> consensus_from_scores(const PointSet<Scalar>& positions,
                                     std::span<const Scalar> scores,
                                     Scalar alpha,
                                     std::span<const Index> batch) {
  if (batch.empty()) throw InvalidInput("consensus_point: empty batch");
  if (!std::isfinite(static_cast<double>(alpha))) throw InvalidInput("consensus_point: alpha must be finite");

  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Index j : batch) best = std::min(best, scores[static_cast<std::size_t>(j)]);

  Vector<Scalar> numerator = Vector<Scalar>::Zero(positions.cols());
  Scalar denominator(0);
  for (Index j : batch) {
    const Scalar weight = std::exp(-alpha * (scores[static_cast<std::size_t>(j)] - best));
    if (weight == Scalar(0)) continue;
    numerator += weight * positions.row(j).transpose();
    denominator += weight;
  }
  return numerator / denominator;
}

/// Consensus point for the sub-problem with weight vector w, computed over `batch`.
template <typename Scalar, typename DerivedW>
Vector<Scalar> consensus_point(const PointSet<Scalar>& positions,
                               const PointSet<Scalar>& images,
                               const Eigen::MatrixBase<DerivedW>& w,
                               Scalar alpha,
                               std::span<const Index> batch) {
  if (batch.empty()) throw InvalidInput("consensus_point: empty batch");
  std::vector<Scalar> scores(static_cast<std::size_t>(images.rows()), Scalar(0));
  for (Index j : batch) scores[static_cast<std::size_t>(j)] = chebyshev(images.row(j), w.transpose());
  return consensus_from_scores<Scalar>(positions, scores, alpha, batch);
}

}  // namespace amcbo
