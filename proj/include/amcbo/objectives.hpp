#pragma once

// Bi-objective benchmark families (Lame, DO2DK) with exact distance
// penalization towards the feasible box [0,1]^d, and the chart of their
// known front along the edge [0,1] x {0}^(d-1).

#include "amcbo/core.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>

namespace amcbo {

/// Euclidean distance from x to the unit box, i.e. the norm of the clamp residual.
template <typename Derived>
typename Derived::Scalar dist_to_box(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return (x.array() - x.array().max(Scalar(0)).min(Scalar(1))).matrix().norm();
}

/// Bi-objective Lame problem with curvature gamma. Requires x.size() >= 2.
/// Only x_1 enters the angular factors; x_2..x_d enter through r(x), so the
/// EP optimal set is the edge [0,1] x {0}^(d-1).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 2, 1> lame_eval(const Eigen::MatrixBase<Derived>& x,
                                                         typename Derived::Scalar gamma) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::cos;
  using std::pow;
  using std::sin;
  using std::sqrt;
  constexpr Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
  const Index d = x.size();

  const Scalar radius = sqrt(x.tail(d - 1).squaredNorm());
  const Scalar exponent = Scalar(2) / gamma;
  const Scalar scale = Scalar(1) + radius;
  const Scalar penalty = std::numbers::pi_v<Scalar> / gamma * dist_to_box(x);

  Eigen::Matrix<Scalar, 2, 1> g;
  g(0) = pow(abs(cos(half_pi * x(0))), exponent) * scale + penalty;
  g(1) = pow(abs(sin(half_pi * x(0))), exponent) * scale + penalty;
  return g;
}

/// Which DO2DK formula to evaluate.
///  Standard:     g1 = ra rb (sin(pi x1 / 2^(s+1) + (1 + (2^s-1)/2^(s+2)) pi) + 1)
///  PhaseShifted: g1 = ra rb sin(pi x1 / 2 + (1 + (2^s-1)/2^(s+2)) pi + 1), which can be negative
/// Both share g2 = ra rb (cos(pi x1 / 2 + pi) + 1) and the penalty 10 dist(x, H).
enum class Do2dkForm { Standard, PhaseShifted };

/// DO2DK problem with parameters k and s. Requires x.size() >= 2.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 2, 1> do2dk_eval(const Eigen::MatrixBase<Derived>& x,
                                                          int k,
                                                          typename Derived::Scalar s,
                                                          Do2dkForm form = Do2dkForm::Standard) {
  using Scalar = typename Derived::Scalar;
  using std::cos;
  using std::pow;
  using std::sin;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Index d = x.size();

  const Scalar ra = Scalar(1) + Scalar(9) / Scalar(d - 1) * x.tail(d - 1).sum();
  const Scalar centered = x(0) - Scalar(0.5);
  const Scalar rb = Scalar(5) + Scalar(10) * centered * centered +
                    pow(Scalar(2), s / Scalar(2)) * cos(Scalar(2 * k) * pi * x(0)) / Scalar(k);
  const Scalar phase = (Scalar(1) + (pow(Scalar(2), s) - Scalar(1)) / pow(Scalar(2), s + Scalar(2))) * pi;
  const Scalar penalty = Scalar(10) * dist_to_box(x);

  Eigen::Matrix<Scalar, 2, 1> g;
  if (form == Do2dkForm::Standard) {
    g(0) = (sin(pi * x(0) / pow(Scalar(2), s + Scalar(1)) + phase) + Scalar(1)) * ra * rb + penalty;
  } else {
    g(0) = sin(pi / 2 * x(0) + phase + Scalar(1)) * ra * rb + penalty;
  }
  g(1) = (cos(pi / 2 * x(0) + pi) + Scalar(1)) * ra * rb + penalty;
  return g;
}

/// Chart of a one-dimensional front: h(r) = g(edge(r)) for r in [0,1].
template <typename Scalar>
struct FrontChart {
  std::function<Vector<Scalar>(Scalar)> h;
  std::function<Vector<Scalar>(Scalar)> edge;
  Index image_dim = 2;
};

/// Vector objective g: R^d -> R^m. Built-ins and user problems share this interface.
template <typename Scalar>
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual Index dim() const = 0;
  virtual Index n_objectives() const = 0;
  virtual Scalar penalty_coefficient() const { return Scalar(0); }

  virtual Vector<Scalar> evaluate(const Vector<Scalar>& x) const = 0;

  /// Chart of the known front, if the problem has one.
  virtual std::optional<FrontChart<Scalar>> chart() const { return std::nullopt; }

  /// Evaluates every row of `positions`; one image per row.
  PointSet<Scalar> evaluate_all(const PointSet<Scalar>& positions) const {
    PointSet<Scalar> images(positions.rows(), n_objectives());
    Vector<Scalar> x(positions.cols());
    for (Index i = 0; i < positions.rows(); ++i) {
      x = positions.row(i).transpose();
      images.row(i) = evaluate(x).transpose();
    }
    return images;
  }
};

namespace detail {

template <typename Scalar>
Vector<Scalar> edge_point(Index d, Scalar r) {
  Vector<Scalar> x = Vector<Scalar>::Zero(d);
  x(0) = r;
  return x;
}

}  // namespace detail

template <typename Scalar>
class LameProblem final : public Problem<Scalar> {
 public:
  LameProblem(Index d, Scalar gamma) : d_(d), gamma_(gamma) {
    if (d < 2) throw InvalidInput("lame: search dimension must be at least 2");
    if (!(gamma > Scalar(0))) throw InvalidInput("lame: gamma must be positive");
  }

  std::string name() const override { return "lame"; }
  Index dim() const override { return d_; }
  Index n_objectives() const override { return 2; }
  Scalar penalty_coefficient() const override { return std::numbers::pi_v<Scalar> / gamma_; }
  Scalar gamma() const { return gamma_; }

  Vector<Scalar> evaluate(const Vector<Scalar>& x) const override { return lame_eval(x, gamma_); }

  std::optional<FrontChart<Scalar>> chart() const override {
    const Index d = d_;
    const Scalar gamma = gamma_;
    FrontChart<Scalar> chart;
    chart.edge = [d](Scalar r) { return detail::edge_point(d, r); };
    chart.h = [d, gamma](Scalar r) -> Vector<Scalar> {
      return lame_eval(detail::edge_point(d, r), gamma);
    };
    return chart;
  }

 private:
  Index d_;
  Scalar gamma_;
};

template <typename Scalar>
class Do2dkProblem final : public Problem<Scalar> {
 public:
  Do2dkProblem(Index d, int k, Scalar s, Do2dkForm form = Do2dkForm::Standard)
      : d_(d), k_(k), s_(s), form_(form) {
    if (d < 2) throw InvalidInput("do2dk: search dimension must be at least 2");
    if (k < 1) throw InvalidInput("do2dk: k must be a positive integer");
    if (!(s > Scalar(0))) throw InvalidInput("do2dk: s must be positive");
  }

  std::string name() const override { return "do2dk"; }
  Index dim() const override { return d_; }
  Index n_objectives() const override { return 2; }
  Scalar penalty_coefficient() const override { return Scalar(10); }
  int k() const { return k_; }
  Scalar s() const { return s_; }
  Do2dkForm form() const { return form_; }

  Vector<Scalar> evaluate(const Vector<Scalar>& x) const override { return do2dk_eval(x, k_, s_, form_); }

  std::optional<FrontChart<Scalar>> chart() const override {
    const Index d = d_;
    const int k = k_;
    const Scalar s = s_;
    const Do2dkForm form = form_;
    FrontChart<Scalar> chart;
    chart.edge = [d](Scalar r) { return detail::edge_point(d, r); };
    chart.h = [d, k, s, form](Scalar r) -> Vector<Scalar> {
      return do2dk_eval(detail::edge_point(d, r), k, s, form);
    };
    return chart;
  }

 private:
  Index d_;
  int k_;
  Scalar s_;
  Do2dkForm form_;
};

template <typename Scalar>
FrontChart<Scalar> front_chart(const Problem<Scalar>& problem) {
  auto chart = problem.chart();
  if (!chart) throw UnsupportedProblem("problem '" + problem.name() + "' has no known front chart");
  return *std::move(chart);
}

/// Parameters of the built-in families; unused fields are ignored.
struct ProblemParams {
  double gamma = 1.0;
  int k = 2;
  double s = 1.0;
  Do2dkForm do2dk_form = Do2dkForm::Standard;
};

inline std::string to_string(Do2dkForm form) {
  return form == Do2dkForm::Standard ? "standard" : "shifted";
}

inline Do2dkForm do2dk_form_from_string(const std::string& name) {
  if (name == "standard") return Do2dkForm::Standard;
  if (name == "shifted") return Do2dkForm::PhaseShifted;
  throw InvalidInput("unknown DO2DK form '" + name + "'");
}

/// Builds a built-in problem by name ("lame" or "do2dk").
template <typename Scalar = double>
std::unique_ptr<Problem<Scalar>> make_problem(const std::string& name, Index d,
                                              const ProblemParams& params) {
  if (name == "lame") return std::make_unique<LameProblem<Scalar>>(d, Scalar(params.gamma));
  if (name == "do2dk") return std::make_unique<Do2dkProblem<Scalar>>(d, params.k, Scalar(params.s), params.do2dk_form);
  throw UnsupportedProblem("unknown problem '" + name + "'");
}

}  // namespace amcbo
