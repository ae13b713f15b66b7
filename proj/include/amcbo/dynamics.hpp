#pragma once

// The adaptive multi-objective CBO engine: Euler-Maruyama position updates
// towards per-particle consensus points, and projected weight updates driven
// by a repulsive potential on the images.

#include "amcbo/core.hpp"
#include "amcbo/objectives.hpp"
#include "amcbo/potentials.hpp"
#include "amcbo/random.hpp"
#include "amcbo/scalarization.hpp"
#include "amcbo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace amcbo {

enum class Diffusion { Isotropic, Anisotropic };

/// Parameters of one optimization run.
template <typename Scalar>
struct SolverConfig {
  Scalar lambda = Scalar(1);
  Scalar sigma = Scalar(4);
  Scalar alpha = Scalar(1e6);
  Scalar tau = Scalar(0);
  Scalar dt = Scalar(0.1);
  Index n_particles = 100;
  Index max_iterations = 5000;
  Diffusion diffusion = Diffusion::Anisotropic;
  std::optional<PotentialSpec<Scalar>> potential;
  std::optional<Index> batch_size;  // unset: every particle interacts with every other
  bool box_projection = true;
  std::uint64_t seed = 0;
  Index history_stride = 0;  // 0: no snapshots kept

  Index effective_batch() const { return batch_size.value_or(n_particles); }

  void validate() const {
    auto non_negative = [](Scalar v) { return std::isfinite(static_cast<double>(v)) && v >= Scalar(0); };
    if (!non_negative(lambda)) throw InvalidConfig("lambda must be finite and non-negative");
    if (!non_negative(sigma)) throw InvalidConfig("sigma must be finite and non-negative");
    if (!non_negative(alpha)) throw InvalidConfig("alpha must be finite and non-negative");
    if (!non_negative(tau)) throw InvalidConfig("tau must be finite and non-negative");
    if (!non_negative(dt)) throw InvalidConfig("dt must be finite and non-negative");
    if (n_particles < 1) throw InvalidConfig("need at least one particle");
    if (max_iterations < 0) throw InvalidConfig("iteration budget must be non-negative");
    if (history_stride < 0) throw InvalidConfig("history stride must be non-negative");
    const Index batch = effective_batch();
    if (batch < 1 || batch > n_particles) throw InvalidConfig("batch size must lie in [1, N]");
    if (tau > Scalar(0) && !potential) throw InvalidConfig("tau > 0 requires a potential");
  }
};

template <typename Scalar>
struct Swarm {
  PointSet<Scalar> positions;  // N x d
  PointSet<Scalar> weights;    // N x m, rows on the simplex
  Index iteration = 0;
};

/// Read-only view handed to observers: the swarm and the images of its positions.
template <typename Scalar>
struct SwarmView {
  const Swarm<Scalar>& swarm;
  const PointSet<Scalar>& images;
};

/// Per-coordinate noise scales of the diffusion matrix D, which is diagonal.
template <typename DerivedX, typename DerivedY>
Vector<typename DerivedX::Scalar> diffusion_scale(Diffusion mode,
                                                  const Eigen::MatrixBase<DerivedX>& x,
                                                  const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw InvalidInput("diffusion_scale: dimension mismatch");
  Vector<Scalar> diff = x - y;
  if (mode == Diffusion::Isotropic) return Vector<Scalar>::Constant(diff.size(), diff.norm());
  return diff;
}

/// Uniform random M-subset of {0..N-1} in increasing order; the full index set when M = N.
template <typename UniformRng>
std::vector<Index> sample_batch(Index n, Index m, UniformRng& rng) {
  if (m < 1 || m > n) throw InvalidInput("sample_batch: batch size must lie in [1, N]");
  std::vector<Index> all = full_batch(n);
  if (m == n) return all;
  std::vector<Index> batch;
  batch.reserve(static_cast<std::size_t>(m));
  std::sample(all.begin(), all.end(), std::back_inserter(batch), m, rng);
  return batch;
}

/// The batch particle i interacts with: the shared sorted batch plus i itself.
inline std::vector<Index> particle_batch(std::span<const Index> shared, Index i) {
  std::vector<Index> batch(shared.begin(), shared.end());
  const auto at = std::lower_bound(batch.begin(), batch.end(), i);
  if (at == batch.end() || *at != i) batch.insert(at, i);
  return batch;
}

/// Consensus point of every particle's own sub-problem, all from the same snapshot.
template <typename Scalar>
PointSet<Scalar> consensus_points(const Swarm<Scalar>& swarm, const PointSet<Scalar>& images,
                                  Scalar alpha, std::span<const Index> batch) {
  const Index n = swarm.positions.rows();
  const PointSet<Scalar> magnitudes = images.cwiseAbs();
  PointSet<Scalar> consensus(n, swarm.positions.cols());
  std::vector<Scalar> scores(static_cast<std::size_t>(images.rows()), Scalar(0));
  for (Index i = 0; i < n; ++i) {
    const std::vector<Index> own = particle_batch(batch, i);
    const auto w = swarm.weights.row(i);
    for (Index j : own) scores[static_cast<std::size_t>(j)] = (magnitudes.row(j).array() * w.array()).maxCoeff();
    consensus.row(i) = consensus_from_scores<Scalar>(swarm.positions, scores, alpha, own).transpose();
  }
  return consensus;
}

/// One Euler-Maruyama position step. `normals` holds the standard normal
/// increments, one row per particle.
template <typename Scalar>
PointSet<Scalar> step_positions(const Swarm<Scalar>& swarm, const PointSet<Scalar>& images,
                                const SolverConfig<Scalar>& config, std::span<const Index> batch,
                                const PointSet<Scalar>& normals) {
  const PointSet<Scalar> consensus = consensus_points(swarm, images, config.alpha, batch);
  const Scalar noise_scale = config.sigma * std::sqrt(config.dt);
  PointSet<Scalar> next(swarm.positions.rows(), swarm.positions.cols());
  for (Index i = 0; i < next.rows(); ++i) {
    const auto x = swarm.positions.row(i).transpose();
    const auto y = consensus.row(i).transpose();
    const Vector<Scalar> scale = diffusion_scale(config.diffusion, x, y);
    next.row(i) = (x + config.lambda * (y - x) * config.dt +
                   noise_scale * scale.cwiseProduct(normals.row(i).transpose()))
                      .transpose();
  }
  if (config.box_projection) next = next.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
  if (!all_finite(next)) throw NumericalBlowup("non-finite particle position", swarm.iteration);
  return next;
}

namespace detail {

template <typename Scalar>
PointSet<Scalar> project_rows(const PointSet<Scalar>& proposals, Index iteration) {
  if (!all_finite(proposals)) throw NumericalBlowup("non-finite weight update", iteration);
  PointSet<Scalar> projected(proposals.rows(), proposals.cols());
  for (Index i = 0; i < proposals.rows(); ++i) projected.row(i) = project_simplex(proposals.row(i).transpose()).transpose();
  return projected;
}

template <typename Scalar>
const PotentialSpec<Scalar>& require_potential(const SolverConfig<Scalar>& config) {
  if (!config.potential) throw InvalidConfig("weight update requires a potential");
  return *config.potential;
}

}  // namespace detail

/// Bi-objective weight step: V = W + tau/|B_i| * sum_j grad U(g_i - g_j) dt, then projection.
/// B_i is `batch` together with i.
template <typename Scalar>
PointSet<Scalar> step_weights_2d(const Swarm<Scalar>& swarm, const PointSet<Scalar>& images,
                                 const SolverConfig<Scalar>& config, std::span<const Index> batch) {
  if (config.tau == Scalar(0)) return swarm.weights;
  if (images.cols() != 2 || swarm.weights.cols() != 2) throw InvalidInput("step_weights_2d: requires m = 2");
  const auto& potential = detail::require_potential(config);

  PointSet<Scalar> proposals = swarm.weights;
  Vector<Scalar> diff(2);
  Vector<Scalar> force(2);
  for (Index i = 0; i < proposals.rows(); ++i) {
    const std::vector<Index> own = particle_batch(batch, i);
    force.setZero();
    for (Index j : own) {
      diff.noalias() = (images.row(i) - images.row(j)).transpose();
      const Scalar distance = diff.norm();
      if (distance < Scalar(kSingularGuard)) continue;  // grad U(0) = 0
      force += (radial_derivative(potential, distance) / distance) * diff;
    }
    proposals.row(i) += (config.tau / Scalar(own.size()) * config.dt) * force.transpose();
  }
  return detail::project_rows(proposals, swarm.iteration);
}

/// General weight step: V = W - tau/|B_i| * sum_j (W_i - W_j)/|W_i - W_j| r'(|g_j - g_i|) dt,
/// then projection. Pairs with coincident weights contribute nothing.
template <typename Scalar>
PointSet<Scalar> step_weights_general(const Swarm<Scalar>& swarm, const PointSet<Scalar>& images,
                                      const SolverConfig<Scalar>& config, std::span<const Index> batch) {
  if (config.tau == Scalar(0)) return swarm.weights;
  const auto& potential = detail::require_potential(config);
  const Index m = swarm.weights.cols();

  PointSet<Scalar> proposals = swarm.weights;
  Vector<Scalar> direction(m);
  for (Index i = 0; i < proposals.rows(); ++i) {
    const std::vector<Index> own = particle_batch(batch, i);
    const Scalar rate = config.tau / Scalar(own.size()) * config.dt;
    Vector<Scalar> drift = Vector<Scalar>::Zero(m);
    for (Index j : own) {
      direction = (swarm.weights.row(i) - swarm.weights.row(j)).transpose();
      const Scalar separation = direction.norm();
      if (separation < Scalar(kSingularGuard)) continue;
      const Scalar distance = (images.row(j) - images.row(i)).norm();
      drift += (radial_derivative(potential, distance) / separation) * direction;
    }
    proposals.row(i) -= rate * drift.transpose();
  }
  return detail::project_rows(proposals, swarm.iteration);
}

/// Stateful driver: owns the swarm, the cached images and the random streams.
template <typename Scalar>
class Solver {
 public:
  Solver(const Problem<Scalar>& problem, SolverConfig<Scalar> config)
      : problem_(&problem), config_(std::move(config)) {
    config_.validate();
    if (config_.potential && config_.potential->m != problem.n_objectives())
      throw InvalidConfig("potential image dimension does not match the problem");

    const Index n = config_.n_particles;
    const Index d = problem.dim();
    Rng position_stream = make_stream(config_.seed, StreamTag::InitPositions);
    std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
    swarm_.positions.resize(n, d);
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < d; ++k) swarm_.positions(i, k) = unit(position_stream);

    Rng weight_stream = make_stream(config_.seed, StreamTag::InitWeights);
    swarm_.weights = uniform_weights<Scalar>(n, problem.n_objectives(), weight_stream);

    batch_stream_ = make_stream(config_.seed, StreamTag::Batch);
    noise_streams_.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) noise_streams_.push_back(make_stream(config_.seed, StreamTag::ParticleNoise, i));
    normal_.assign(static_cast<std::size_t>(n), std::normal_distribution<Scalar>());
    normals_.resize(n, d);

    images_ = problem.evaluate_all(swarm_.positions);
  }

  const Swarm<Scalar>& swarm() const { return swarm_; }
  const PointSet<Scalar>& images() const { return images_; }
  const SolverConfig<Scalar>& config() const { return config_; }
  SwarmView<Scalar> view() const { return {swarm_, images_}; }

  void step() {
    const Index n = config_.n_particles;
    const std::vector<Index> batch = sample_batch(n, config_.effective_batch(), batch_stream_);
    for (Index i = 0; i < n; ++i) {
      auto& stream = noise_streams_[static_cast<std::size_t>(i)];
      auto& normal = normal_[static_cast<std::size_t>(i)];
      for (Index k = 0; k < normals_.cols(); ++k) normals_(i, k) = normal(stream);
    }

    PointSet<Scalar> positions = step_positions(swarm_, images_, config_, batch, normals_);
    PointSet<Scalar> weights = swarm_.weights;
    if (config_.tau > Scalar(0)) {
      weights = problem_->n_objectives() == 2 ? step_weights_2d(swarm_, images_, config_, batch)
                                              : step_weights_general(swarm_, images_, config_, batch);
    }

    swarm_.positions = std::move(positions);
    swarm_.weights = std::move(weights);
    images_ = problem_->evaluate_all(swarm_.positions);
    if (!all_finite(images_)) throw NumericalBlowup("non-finite objective value", swarm_.iteration);
    ++swarm_.iteration;
  }

 private:
  const Problem<Scalar>* problem_;
  SolverConfig<Scalar> config_;
  Swarm<Scalar> swarm_;
  PointSet<Scalar> images_;
  Rng batch_stream_;
  std::vector<Rng> noise_streams_;
  std::vector<std::normal_distribution<Scalar>> normal_;
  PointSet<Scalar> normals_;
};

template <typename Scalar>
struct RunResult {
  Swarm<Scalar> final_swarm;
  std::vector<Swarm<Scalar>> history;  // every `history_stride`-th iteration, starting at 0
};

/// Runs the engine for the configured budget. The observer sees the initial
/// state (k = 0) and the state after every step; returning false stops early.
template <typename Scalar, typename Observer>
RunResult<Scalar> iterate(const Problem<Scalar>& problem, const SolverConfig<Scalar>& config,
                          Observer&& observer) {
  Solver<Scalar> solver(problem, config);
  RunResult<Scalar> result;
  const Index stride = config.history_stride;

  auto notify = [&]() -> bool {
    const Index k = solver.swarm().iteration;
    if (stride > 0 && k % stride == 0) result.history.push_back(solver.swarm());
    if constexpr (std::is_void_v<std::invoke_result_t<Observer&, Index, const SwarmView<Scalar>&>>) {
      observer(k, solver.view());
      return true;
    } else {
      return static_cast<bool>(observer(k, solver.view()));
    }
  };

  bool keep_going = notify();
  while (keep_going && solver.swarm().iteration < config.max_iterations) {
    solver.step();
    keep_going = notify();
  }
  result.final_swarm = solver.swarm();
  return result;
}

template <typename Scalar>
RunResult<Scalar> iterate(const Problem<Scalar>& problem, const SolverConfig<Scalar>& config) {
  return iterate(problem, config, [](Index, const SwarmView<Scalar>&) {});
}

}  // namespace amcbo
