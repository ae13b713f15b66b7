#pragma once

// Low-energy reference fronts: M points evolved along a known front chart
// under the tangential part of a pairwise repulsion.

#include "amcbo/core.hpp"
#include "amcbo/metrics.hpp"
#include "amcbo/objectives.hpp"
#include "amcbo/potentials.hpp"
#include "amcbo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace amcbo {

template <typename Scalar>
struct FrontFlowConfig {
  Index n_points = 100;
  PotentialSpec<Scalar> potential = PotentialSpec<Scalar>::riesz(2);
  Scalar dt = Scalar(1e-8);
  Scalar horizon = Scalar(0.01);
  Index record_every = 0;  // 0: keep only the endpoints of the trajectory

  Index steps() const { return static_cast<Index>(std::llround(static_cast<double>(horizon / dt))); }

  void validate() const {
    if (n_points < 1) throw InvalidConfig("front flow: need at least one point");
    if (!(dt > Scalar(0))) throw InvalidConfig("front flow: time step must be positive");
    if (!(horizon > Scalar(0))) throw InvalidConfig("front flow: horizon must be positive");
    if (record_every < 0) throw InvalidConfig("front flow: record stride must be non-negative");
  }
};

/// Step used for the chart derivative.
inline constexpr double kChartStep = 1e-7;

/// Finite-difference tangent h'(r); central in the interior, one-sided at the ends.
template <typename Scalar>
Vector<Scalar> chart_jacobian(const FrontChart<Scalar>& chart, Scalar r) {
  if (!(r >= Scalar(0) && r <= Scalar(1))) throw InvalidInput("chart_jacobian: r must lie in [0,1]");
  const Scalar step = Scalar(kChartStep);
  const Scalar lo = std::max(Scalar(0), r - step);
  const Scalar hi = std::min(Scalar(1), r + step);
  Vector<Scalar> tangent = (chart.h(hi) - chart.h(lo)) / (hi - lo);
  if (tangent.norm() < Scalar(1e-12)) throw DegenerateChart("chart derivative vanishes");
  return tangent;
}

template <typename Scalar>
struct FlowTrajectory {
  Vector<Scalar> final_coords;
  std::vector<Vector<Scalar>> snapshots;  // coordinates every `record_every` steps
};

template <typename Scalar>
struct SimplexFlowTrajectory {
  PointSet<Scalar> final_weights;
  std::vector<PointSet<Scalar>> snapshots;
};

namespace detail {

// -(1/M) sum_j grad U(G_i - G_j) for every i.
template <typename Scalar>
PointSet<Scalar> interaction_forces(const PotentialSpec<Scalar>& potential, const PointSet<Scalar>& images) {
  const Index n = images.rows();
  PointSet<Scalar> forces = PointSet<Scalar>::Zero(n, images.cols());
  Vector<Scalar> diff(images.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      diff.noalias() = (images.row(i) - images.row(j)).transpose();
      const Scalar distance = diff.norm();
      if (distance < Scalar(kSingularGuard)) continue;
      diff *= radial_derivative(potential, distance) / distance;  // grad U(G_i - G_j)
      forces.row(i) -= diff.transpose();
      forces.row(j) += diff.transpose();
    }
  }
  return forces / Scalar(n);
}

template <typename Scalar>
PointSet<Scalar> chart_images(const FrontChart<Scalar>& chart, const Vector<Scalar>& coords) {
  PointSet<Scalar> images(coords.size(), chart.image_dim);
  for (Index i = 0; i < coords.size(); ++i) images.row(i) = chart.h(coords(i)).transpose();
  return images;
}

}  // namespace detail

/// Explicit Euler on the chart coordinates. A point at an end of the chart
/// whose tangential force points outward (or whose chart derivative
/// vanishes there) does not move; overshooting steps are clamped to [0,1].
template <typename Scalar>
FlowTrajectory<Scalar> flow_on_front(const FrontFlowConfig<Scalar>& config, const FrontChart<Scalar>& chart,
                                     const Vector<Scalar>& initial) {
  config.validate();
  if (!((initial.array() >= Scalar(0)).all() && (initial.array() <= Scalar(1)).all()))
    throw InvalidInput("flow_on_front: initial coordinates must lie in [0,1]");

  FlowTrajectory<Scalar> trajectory;
  Vector<Scalar> coords = initial;
  const Index steps = config.steps();
  if (config.record_every > 0) trajectory.snapshots.push_back(coords);

  Vector<Scalar> velocity(coords.size());
  for (Index step = 0; step < steps; ++step) {
    const PointSet<Scalar> images = detail::chart_images(chart, coords);
    const PointSet<Scalar> forces = detail::interaction_forces(config.potential, images);
    for (Index i = 0; i < coords.size(); ++i) {
      const Scalar r = coords(i);
      const bool at_end = r <= Scalar(0) || r >= Scalar(1);
      Vector<Scalar> tangent;
      try {
        tangent = chart_jacobian(chart, r);
      } catch (const DegenerateChart&) {
        if (!at_end) throw;
        velocity(i) = Scalar(0);
        continue;
      }
      Scalar rate = tangent.dot(forces.row(i).transpose()) / tangent.squaredNorm();
      if ((r <= Scalar(0) && rate < Scalar(0)) || (r >= Scalar(1) && rate > Scalar(0))) rate = Scalar(0);
      velocity(i) = rate;
    }
    coords = (coords + config.dt * velocity).cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
    if (!all_finite(coords)) throw NumericalBlowup("non-finite front coordinate", step);
    if (config.record_every > 0 && (step + 1) % config.record_every == 0) trajectory.snapshots.push_back(coords);
  }
  trajectory.final_coords = coords;
  return trajectory;
}

/// Euler proposals W + dt * (1/M) sum_j grad U(G_i - G_j), projected back onto
/// the simplex, with G_i = h(first weight component). Bi-objective only.
template <typename Scalar>
SimplexFlowTrajectory<Scalar> flow_in_simplex(const FrontFlowConfig<Scalar>& config, const FrontChart<Scalar>& chart,
                                              const PointSet<Scalar>& initial) {
  config.validate();
  if (initial.cols() != 2) throw InvalidInput("flow_in_simplex: requires m = 2");

  SimplexFlowTrajectory<Scalar> trajectory;
  PointSet<Scalar> weights = initial;
  const Index steps = config.steps();
  if (config.record_every > 0) trajectory.snapshots.push_back(weights);

  for (Index step = 0; step < steps; ++step) {
    const Vector<Scalar> coords = weights.col(0).cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
    const PointSet<Scalar> images = detail::chart_images(chart, coords);
    const PointSet<Scalar> forces = detail::interaction_forces(config.potential, images);
    const PointSet<Scalar> proposals = weights - config.dt * forces;
    if (!all_finite(proposals)) throw NumericalBlowup("non-finite simplex flow state", step);
    for (Index i = 0; i < weights.rows(); ++i) weights.row(i) = project_simplex(proposals.row(i).transpose()).transpose();
    if (config.record_every > 0 && (step + 1) % config.record_every == 0) trajectory.snapshots.push_back(weights);
  }
  trajectory.final_weights = weights;
  return trajectory;
}

/// Equispaced chart coordinates (i-1)/(M-1); the midpoint when M = 1.
template <typename Scalar>
Vector<Scalar> equispaced_coords(Index n) {
  if (n == 1) return Vector<Scalar>::Constant(1, Scalar(0.5));
  return Vector<Scalar>::LinSpaced(n, Scalar(0), Scalar(1));
}

template <typename Scalar>
ReferenceFront<Scalar> generate_reference(const FrontChart<Scalar>& chart, const FrontFlowConfig<Scalar>& config) {
  const auto flow = flow_on_front(config, chart, equispaced_coords<Scalar>(config.n_points));
  return {detail::chart_images(chart, flow.final_coords)};
}

template <typename Scalar>
ReferenceFront<Scalar> generate_reference(const Problem<Scalar>& problem, const FrontFlowConfig<Scalar>& config) {
  return generate_reference(front_chart(problem), config);
}

}  // namespace amcbo
