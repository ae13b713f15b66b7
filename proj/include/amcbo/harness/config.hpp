#pragma once

// Experiment configuration: problem, solver, metrics, reference front and
// optional sweep axis. Loaded from an INI file; CLI flags override.

#include "amcbo/dynamics.hpp"
#include "amcbo/objectives.hpp"
#include "amcbo/potentials.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace amcbo::harness {

enum class SweepAxis { Tau, Sigma, Dim, Particles, BatchSize };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct ReferenceSettings {
  Index points = 100;
  std::string potential = "riesz";
  double dt = 1e-7;
  double horizon = 0.01;
  std::filesystem::path cache_dir;  // empty: <out>/reference
};

struct ExperimentConfig {
  std::string problem = "lame";
  Index dim = 10;
  ProblemParams params;

  SolverConfig<double> solver;  // its potential is derived from the fields below
  std::string potential = "none";
  double morse_c = 20.0;
  std::optional<double> riesz_s;

  Index runs = 25;
  std::uint64_t seed_base = 0;
  Index metrics_every = 10;
  bool mf_error = true;
  std::optional<std::array<double, 2>> gstar;
  Index histogram_bins = 20;
  Index jobs = 1;
  std::filesystem::path out = "out";

  ReferenceSettings reference;

  std::optional<SweepAxis> sweep_axis;
  std::vector<double> sweep_values;
  std::string sweep_label;  // "axis=value" on a single sweep point

  /// Problem parameters as "gamma=1" or "k=2 s=1" (plus the DO2DK form when not standard).
  std::string problem_label() const;
  /// Interaction scenario, e.g. "none" or "morse tau=0.1".
  std::string scenario_label() const;

  /// Solver settings with the potential resolved for an m-objective problem.
  SolverConfig<double> resolved_solver(Index m) const;

  /// Copy with one sweep value applied.
  ExperimentConfig with_sweep_value(SweepAxis axis, double value) const;

  void validate() const;
};

/// Reads an INI file over `base`. Unknown sections or keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Resolved configuration; deliberately free of output paths so that
/// identical experiments written to different directories match byte for byte.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

std::vector<double> parse_number_list(const std::string& text);

}  // namespace amcbo::harness
