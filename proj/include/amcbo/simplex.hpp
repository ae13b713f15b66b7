#pragma once

// Geometry of the probability simplex {w >= 0, sum w = 1}.

#include "amcbo/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace amcbo {

/// Tolerance on |sum(w) - 1| for a weight vector to count as lying on the simplex.
inline constexpr double kSimplexTolerance = 1e-12;

template <typename Derived>
bool on_simplex(const Eigen::MatrixBase<Derived>& w,
                double tol = kSimplexTolerance) {
  using Scalar = typename Derived::Scalar;
  if (!all_finite(w)) return false;
  if ((w.array() < Scalar(0)).any()) return false;
  return std::abs(static_cast<double>(w.sum()) - 1.0) <= tol;
}

/// Euclidean projection onto the probability simplex (sort-then-threshold).
///
/// Inputs that already satisfy the simplex invariant are returned unchanged,
/// so the projection is exactly idempotent on its own output. Otherwise the
/// thresholded vector is renormalized to remove rounding drift in the sum.
template <typename Derived>
Vector<typename Derived::Scalar> project_simplex(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Index m = v.size();
  if (m < 2) throw InvalidInput("project_simplex: dimension must be at least 2");
  if (!all_finite(v)) throw InvalidInput("project_simplex: non-finite component");

  Vector<Scalar> out = v;
  if (on_simplex(out)) return out;

  std::vector<Scalar> sorted(out.data(), out.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());

  Scalar cumulative(0);
  Scalar theta(0);
  for (Index j = 0; j < m; ++j) {
    cumulative += sorted[j];
    const Scalar candidate = (cumulative - Scalar(1)) / Scalar(j + 1);
    if (sorted[j] - candidate > Scalar(0)) theta = candidate;
  }

  out = (out.array() - theta).max(Scalar(0));
  const Scalar total = out.sum();
  if (!(total > Scalar(0))) {
    // Only reachable through catastrophic rounding; fall back to the barycenter.
    out.setConstant(Scalar(1) / Scalar(m));
    return out;
  }
  out /= total;
  return out;
}

/// Initial weights: a deterministic endpoint grid for m = 2, flat Dirichlet
/// samples for m > 2. One weight vector per row.
template <typename Scalar = double, typename Rng>
PointSet<Scalar> uniform_weights(Index n, Index m, Rng& rng) {
  if (n < 1) throw InvalidInput("uniform_weights: need at least one weight vector");
  if (m < 2) throw InvalidInput("uniform_weights: dimension must be at least 2");

  PointSet<Scalar> weights(n, m);
  if (m == 2) {
    for (Index i = 0; i < n; ++i) {
      const Scalar first = n == 1 ? Scalar(0.5) : Scalar(i) / Scalar(n - 1);
      weights(i, 0) = first;
      weights(i, 1) = Scalar(1) - first;
    }
    return weights;
  }

  std::exponential_distribution<double> gamma_one(1.0);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < m; ++k) weights(i, k) = static_cast<Scalar>(gamma_one(rng));
    weights.row(i) /= weights.row(i).sum();
  }
  return weights;
}

}  // namespace amcbo
