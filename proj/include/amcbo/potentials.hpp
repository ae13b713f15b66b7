#pragma once

// Radially symmetric two-body potentials U(z) = r(|z|) on the image space and
// the empirical interaction energy they induce.

#include "amcbo/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace amcbo {

/// Distances below this are treated as coincident images.
inline constexpr double kSingularGuard = 1e-14;

/// Reported energies are capped at this value.
inline constexpr double kEnergyCap = 1e10;

enum class PotentialKind { Riesz, Newtonian, Morse };

/// Binary potential. In image dimension 2 the Newtonian kernel is -log|z|, in
/// higher dimensions |z|^(2-m); every kind is repulsive.
template <typename Scalar>
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Morse;
  Scalar s = Scalar(1);    // Riesz exponent
  Scalar c = Scalar(20);   // Morse rate
  Index m = 2;             // image dimension

  static PotentialSpec riesz(Index m, std::optional<Scalar> s = std::nullopt) {
    if (m < 2) throw InvalidInput("riesz: image dimension must be at least 2");
    const Scalar exponent = s.value_or(Scalar(m - 1));
    if (!(exponent > Scalar(0))) throw InvalidInput("riesz: exponent must be positive");
    return {PotentialKind::Riesz, exponent, Scalar(20), m};
  }
  static PotentialSpec newtonian(Index m) {
    if (m < 2) throw InvalidInput("newtonian: image dimension must be at least 2");
    return {PotentialKind::Newtonian, Scalar(m - 1), Scalar(20), m};
  }
  static PotentialSpec morse(Index m, Scalar c = Scalar(20)) {
    if (m < 2) throw InvalidInput("morse: image dimension must be at least 2");
    if (!(c > Scalar(0))) throw InvalidInput("morse: rate C must be positive");
    return {PotentialKind::Morse, Scalar(m - 1), c, m};
  }
};

inline std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Riesz: return "riesz";
    case PotentialKind::Newtonian: return "newtonian";
    case PotentialKind::Morse: return "morse";
  }
  return "unknown";
}

inline PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "riesz") return PotentialKind::Riesz;
  if (name == "newtonian") return PotentialKind::Newtonian;
  if (name == "morse") return PotentialKind::Morse;
  throw InvalidInput("unknown potential '" + name + "'");
}

/// r(rho), the radial profile of U.
template <typename Scalar>
Scalar radial_value(const PotentialSpec<Scalar>& spec, Scalar distance) {
  using std::exp;
  using std::log;
  using std::pow;
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  const bool coincident = distance < Scalar(kSingularGuard);
  switch (spec.kind) {
    case PotentialKind::Riesz:
      if (coincident) return inf;
      if (spec.s == Scalar(1)) return Scalar(1) / distance;
      return pow(distance, -spec.s);
    case PotentialKind::Newtonian:
      if (coincident) return inf;
      if (spec.m == 2) return -log(distance);
      return pow(distance, Scalar(2 - spec.m));
    case PotentialKind::Morse:
      return exp(-spec.c * distance);
  }
  return Scalar(0);
}

/// r'(rho); zero at coincident images, matching the grad U(0) = 0 convention.
template <typename Scalar>
Scalar radial_derivative(const PotentialSpec<Scalar>& spec, Scalar distance) {
  using std::exp;
  using std::pow;
  if (distance < Scalar(kSingularGuard)) return Scalar(0);
  switch (spec.kind) {
    case PotentialKind::Riesz:
      if (spec.s == Scalar(1)) return Scalar(-1) / (distance * distance);
      return -spec.s * pow(distance, -spec.s - Scalar(1));
    case PotentialKind::Newtonian:
      if (spec.m == 2) return Scalar(-1) / distance;
      return Scalar(2 - spec.m) * pow(distance, Scalar(1 - spec.m));
    case PotentialKind::Morse:
      return -spec.c * exp(-spec.c * distance);
  }
  return Scalar(0);
}

template <typename Scalar, typename Derived>
Scalar potential_value(const PotentialSpec<Scalar>& spec, const Eigen::MatrixBase<Derived>& z) {
  return radial_value(spec, Scalar(z.norm()));
}

template <typename Scalar, typename Derived>
Vector<Scalar> potential_gradient(const PotentialSpec<Scalar>& spec,
                                  const Eigen::MatrixBase<Derived>& z) {
  const Scalar distance = z.norm();
  if (distance < Scalar(kSingularGuard)) return Vector<Scalar>::Zero(z.size());
  return (radial_derivative(spec, distance) / distance) * z;
}

/// (1/N^2) * sum over i != j of U(y_i - y_j), without the cap. May be +inf.
template <typename Scalar>
Scalar energy_raw(const PotentialSpec<Scalar>& spec, const PointSet<Scalar>& points) {
  const Index n = points.rows();
  if (n < 1) throw InvalidInput("energy: need at least one point");
  Scalar total(0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      total += radial_value(spec, Scalar((points.row(i) - points.row(j)).norm()));
    }
  }
  return Scalar(2) * total / Scalar(n * n);
}

/// Energy clamped from above at kEnergyCap.
template <typename Scalar>
Scalar energy(const PotentialSpec<Scalar>& spec, const PointSet<Scalar>& points) {
  return std::min(energy_raw(spec, points), Scalar(kEnergyCap));
}

}  // namespace amcbo
