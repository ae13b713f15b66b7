#pragma once

// Quality indicators for an approximation of the Pareto front.

#include "amcbo/core.hpp"
#include "amcbo/dynamics.hpp"
#include "amcbo/objectives.hpp"
#include "amcbo/potentials.hpp"
#include "amcbo/scalarization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace amcbo {

/// Reference approximation of the front, one point per row.
template <typename Scalar>
struct ReferenceFront {
  PointSet<Scalar> points;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

struct MetricsRecord {
  Index iteration = 0;
  double gd = 0;
  double igd = 0;
  double hypervolume = 0;
  double u_riesz = 0;
  double u_newton = 0;
  double u_morse = 0;
  std::optional<double> mean_field_error;
  double out_of_box = 0;
};

namespace detail {

template <typename Scalar>
void check_point_sets(const PointSet<Scalar>& a, const PointSet<Scalar>& b, const char* what) {
  if (a.rows() == 0 || b.rows() == 0) throw InvalidInput(std::string(what) + ": empty point set");
  if (a.cols() != b.cols()) throw InvalidInput(std::string(what) + ": dimension mismatch");
}

// sqrt(mean over rows of `from` of the squared distance to the nearest row of `to`)
template <typename Scalar>
Scalar rms_nearest_distance(const PointSet<Scalar>& from, const PointSet<Scalar>& to) {
  Scalar total(0);
  for (Index i = 0; i < from.rows(); ++i) {
    Scalar nearest = std::numeric_limits<Scalar>::infinity();
    for (Index j = 0; j < to.rows(); ++j) nearest = std::min(nearest, Scalar((from.row(i) - to.row(j)).squaredNorm()));
    total += nearest;
  }
  return std::sqrt(total / Scalar(from.rows()));
}

}  // namespace detail

/// Generational distance of the images to the reference front.
template <typename Scalar>
Scalar gd(const PointSet<Scalar>& images, const ReferenceFront<Scalar>& ref) {
  detail::check_point_sets(images, ref.points, "gd");
  return detail::rms_nearest_distance(images, ref.points);
}

/// Inverted generational distance: reference points to their nearest image.
template <typename Scalar>
Scalar igd(const PointSet<Scalar>& images, const ReferenceFront<Scalar>& ref) {
  detail::check_point_sets(images, ref.points, "igd");
  return detail::rms_nearest_distance(ref.points, images);
}

/// Area dominated by the images and bounded by the reference point `gstar`.
/// Points with a coordinate at or beyond gstar contribute nothing.
template <typename Scalar, typename Derived>
Scalar hypervolume_2d(const PointSet<Scalar>& images, const Eigen::MatrixBase<Derived>& gstar) {
  if (images.cols() != 2 || gstar.size() != 2) throw InvalidInput("hypervolume_2d: requires m = 2");
  std::vector<std::pair<Scalar, Scalar>> points;
  points.reserve(static_cast<std::size_t>(images.rows()));
  for (Index i = 0; i < images.rows(); ++i) {
    if (images(i, 0) < gstar(0) && images(i, 1) < gstar(1)) points.emplace_back(images(i, 0), images(i, 1));
  }
  std::sort(points.begin(), points.end());

  // Sweep in increasing first coordinate; only points that lower the running
  // minimum of the second coordinate add a new strip.
  Scalar area(0);
  Scalar ceiling = gstar(1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [y1, y2] = points[i];
    if (y2 >= ceiling) continue;
    std::size_t next = i + 1;
    while (next < points.size() && points[next].second >= y2) ++next;
    const Scalar right = next < points.size() ? points[next].first : gstar(0);
    area += (right - y1) * (gstar(1) - y2);
    ceiling = y2;
    i = next - 1;
  }
  return area;
}

/// Componentwise maximum of the reference front plus `margin` times its range.
template <typename Scalar>
Vector<Scalar> default_reference_point(const ReferenceFront<Scalar>& ref, Scalar margin = Scalar(0.1)) {
  const Vector<Scalar> hi = ref.points.colwise().maxCoeff().transpose();
  const Vector<Scalar> lo = ref.points.colwise().minCoeff().transpose();
  return hi + margin * (hi - lo);
}

/// Average squared distance of each particle to the minimizer of its own sub-problem.
template <typename Scalar>
Scalar mean_field_error(const Swarm<Scalar>& swarm,
                        const std::function<Vector<Scalar>(const Vector<Scalar>&)>& minimizer_map) {
  const Index n = swarm.positions.rows();
  if (n == 0) throw InvalidInput("mean_field_error: empty swarm");
  Scalar total(0);
  for (Index i = 0; i < n; ++i) {
    const Vector<Scalar> target = minimizer_map(swarm.weights.row(i).transpose());
    if (target.size() != swarm.positions.cols())
      throw InvalidInput("mean_field_error: minimizer has the wrong dimension");
    total += (swarm.positions.row(i).transpose() - target).squaredNorm();
  }
  return total / Scalar(n);
}

/// Minimizer of the Chebyshev sub-problem along the known EP edge of a
/// built-in problem: a grid search over r in [0,1] refined by golden-section
/// search in the bracketing cell.
template <typename Scalar>
std::function<Vector<Scalar>(const Vector<Scalar>&)> edge_minimizer_map(const FrontChart<Scalar>& chart,
                                                                        Index grid = 2000) {
  if (!chart.h || !chart.edge) throw UnsupportedProblem("edge_minimizer_map: incomplete chart");
  return [chart, grid](const Vector<Scalar>& w) -> Vector<Scalar> {
    auto objective = [&](Scalar r) { return chebyshev(chart.h(r), w); };
    Index best = 0;
    Scalar best_value = objective(Scalar(0));
    for (Index i = 1; i <= grid; ++i) {
      const Scalar value = objective(Scalar(i) / Scalar(grid));
      if (value < best_value) {
        best_value = value;
        best = i;
      }
    }
    Scalar lo = Scalar(std::max<Index>(best - 1, 0)) / Scalar(grid);
    Scalar hi = Scalar(std::min<Index>(best + 1, grid)) / Scalar(grid);
    const Scalar ratio = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
    for (int it = 0; it < 80 && hi - lo > Scalar(1e-15); ++it) {
      const Scalar a = hi - ratio * (hi - lo);
      const Scalar b = lo + ratio * (hi - lo);
      if (objective(a) <= objective(b)) hi = b;
      else lo = a;
    }
    Scalar r = (lo + hi) / Scalar(2);
    if (objective(r) > best_value) r = Scalar(best) / Scalar(grid);
    return chart.edge(r);
  };
}

template <typename Scalar>
double out_of_box_fraction(const PointSet<Scalar>& positions) {
  Index outside = 0;
  for (Index i = 0; i < positions.rows(); ++i) {
    const auto row = positions.row(i).array();
    if ((row < Scalar(0)).any() || (row > Scalar(1)).any()) ++outside;
  }
  return positions.rows() == 0 ? 0.0 : double(outside) / double(positions.rows());
}

/// Settings for a full metrics evaluation of a bi-objective swarm.
template <typename Scalar>
struct MetricsContext {
  ReferenceFront<Scalar> reference;
  Vector<Scalar> gstar;
  Scalar morse_c = Scalar(20);
  std::function<Vector<Scalar>(const Vector<Scalar>&)> minimizer_map;  // optional
};

template <typename Scalar>
MetricsRecord evaluate_metrics(const SwarmView<Scalar>& view, const MetricsContext<Scalar>& context) {
  const Index m = view.images.cols();
  MetricsRecord record;
  record.iteration = view.swarm.iteration;
  record.gd = double(gd(view.images, context.reference));
  record.igd = double(igd(view.images, context.reference));
  record.hypervolume = m == 2 ? double(hypervolume_2d(view.images, context.gstar)) : 0.0;
  record.u_riesz = double(energy(PotentialSpec<Scalar>::riesz(m), view.images));
  record.u_newton = double(energy(PotentialSpec<Scalar>::newtonian(m), view.images));
  record.u_morse = double(energy(PotentialSpec<Scalar>::morse(m, context.morse_c), view.images));
  if (context.minimizer_map) record.mean_field_error = double(mean_field_error(view.swarm, context.minimizer_map));
  record.out_of_box = out_of_box_fraction(view.swarm.positions);
  return record;
}

}  // namespace amcbo
