// amcbo: command line front end for experiments, sweeps, reference fronts
// and summary tables.

#include "amcbo/harness/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace amcbo;
using namespace amcbo::harness;

// Flags left unset keep the value from the config file (or the default).
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> problem;
  std::optional<double> gamma;
  std::optional<int> k;
  std::optional<double> s;
  std::optional<std::string> do2dk_form;
  std::optional<Index> d;
  std::optional<Index> n_particles;
  std::optional<Index> k_max;
  std::optional<double> lambda;
  std::optional<double> sigma;
  std::optional<double> alpha;
  std::optional<double> tau;
  std::optional<double> dt;
  std::optional<std::string> potential;
  std::optional<double> morse_c;
  std::optional<double> riesz_s;
  std::optional<std::string> diffusion;
  std::optional<Index> batch_size;
  bool no_box = false;
  std::optional<Index> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<Index> metrics_every;
  bool no_mf_error = false;
  std::optional<std::string> gstar;
  std::optional<Index> hist_bins;
  std::optional<Index> jobs;
  std::optional<Index> ref_points;
  std::optional<std::string> ref_potential;
  std::optional<double> ref_dt;
  std::optional<double> ref_horizon;
  std::optional<std::string> ref_cache;
  std::optional<std::string> sweep_axis;
  std::optional<std::string> sweep_values;
};

void add_experiment_flags(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--problem", o.problem, "lame or do2dk");
  app.add_option("--gamma", o.gamma, "Lame curvature");
  app.add_option("--k", o.k, "DO2DK k");
  app.add_option("--s", o.s, "DO2DK s");
  app.add_option("--do2dk-form", o.do2dk_form, "DO2DK g1 formula: standard or shifted");
  app.add_option("--d", o.d, "search space dimension");
  app.add_option("--n-particles", o.n_particles, "particle count N");
  app.add_option("--k-max", o.k_max, "iteration budget");
  app.add_option("--lambda", o.lambda, "drift strength");
  app.add_option("--sigma", o.sigma, "diffusion strength");
  app.add_option("--alpha", o.alpha, "softmax sharpness");
  app.add_option("--tau", o.tau, "weight adaptation rate");
  app.add_option("--dt", o.dt, "time step");
  app.add_option("--potential", o.potential, "none, riesz, newtonian or morse")
      ->check(CLI::IsMember({"none", "riesz", "newtonian", "morse"}));
  app.add_option("--morse-c", o.morse_c, "Morse rate C");
  app.add_option("--riesz-s", o.riesz_s, "Riesz exponent (default m-1)");
  app.add_option("--diffusion", o.diffusion, "iso or aniso")->check(CLI::IsMember({"iso", "aniso"}));
  app.add_option("--batch-size", o.batch_size, "interaction batch size M");
  app.add_flag("--no-box-projection", o.no_box, "keep particles unclamped (penalty only)");
  app.add_option("--runs", o.runs, "number of runs R");
  app.add_option("--seed", o.seed, "seed of the first run");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--metrics-every", o.metrics_every, "metrics cadence in iterations");
  app.add_flag("--no-mf-error", o.no_mf_error, "skip the mean-field error");
  app.add_option("--gstar", o.gstar, "hypervolume reference point 'a,b'");
  app.add_option("--hist-bins", o.hist_bins, "weight histogram bins");
  app.add_option("--jobs", o.jobs, "runs executed concurrently");
  app.add_option("--ref-points", o.ref_points, "reference front size M");
  app.add_option("--ref-potential", o.ref_potential, "potential of the reference flow");
  app.add_option("--ref-dt", o.ref_dt, "reference flow time step");
  app.add_option("--ref-horizon", o.ref_horizon, "reference flow horizon");
  app.add_option("--ref-cache", o.ref_cache, "reference front cache directory");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c;
  if (o.config) c = load_config(*o.config, c);
  if (o.problem) c.problem = *o.problem;
  if (o.gamma) c.params.gamma = *o.gamma;
  if (o.k) c.params.k = *o.k;
  if (o.s) c.params.s = *o.s;
  if (o.do2dk_form) c.params.do2dk_form = do2dk_form_from_string(*o.do2dk_form);
  if (o.d) c.dim = *o.d;
  if (o.n_particles) c.solver.n_particles = *o.n_particles;
  if (o.k_max) c.solver.max_iterations = *o.k_max;
  if (o.lambda) c.solver.lambda = *o.lambda;
  if (o.sigma) c.solver.sigma = *o.sigma;
  if (o.alpha) c.solver.alpha = *o.alpha;
  if (o.tau) c.solver.tau = *o.tau;
  if (o.dt) c.solver.dt = *o.dt;
  if (o.potential) c.potential = *o.potential;
  if (o.morse_c) c.morse_c = *o.morse_c;
  if (o.riesz_s) c.riesz_s = *o.riesz_s;
  if (o.diffusion) c.solver.diffusion = *o.diffusion == "iso" ? Diffusion::Isotropic : Diffusion::Anisotropic;
  if (o.batch_size) c.solver.batch_size = *o.batch_size;
  if (o.no_box) c.solver.box_projection = false;
  if (o.runs) c.runs = *o.runs;
  if (o.seed) c.seed_base = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.metrics_every) c.metrics_every = *o.metrics_every;
  if (o.no_mf_error) c.mf_error = false;
  if (o.gstar) {
    const auto values = parse_number_list(*o.gstar);
    if (values.size() != 2) throw InvalidConfig("--gstar needs two comma-separated numbers");
    c.gstar = std::array<double, 2>{values[0], values[1]};
  }
  if (o.hist_bins) c.histogram_bins = *o.hist_bins;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.ref_points) c.reference.points = *o.ref_points;
  if (o.ref_potential) c.reference.potential = *o.ref_potential;
  if (o.ref_dt) c.reference.dt = *o.ref_dt;
  if (o.ref_horizon) c.reference.horizon = *o.ref_horizon;
  if (o.ref_cache) c.reference.cache_dir = *o.ref_cache;
  if (o.sweep_axis) c.sweep_axis = sweep_axis_from_string(*o.sweep_axis);
  if (o.sweep_values) c.sweep_values = parse_number_list(*o.sweep_values);
  return c;
}

void print_summary(const SummaryRow& r) {
  fmt::print("{:<6} {:<14} {:<22} {:<16} runs={:<3} failed={:<3} GD={:.3e} IGD={:.3e} HV={:.3e} U_R={:.3e} "
             "U_N={:.3e} U_M={:.3e}\n",
             r.problem, r.params, r.scenario, r.sweep, r.runs, r.failed, r.gd, r.igd, r.hv, r.u_riesz, r.u_newton,
             r.u_morse);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive multi-objective consensus-based optimization"};
  app.require_subcommand(1);

  Overrides run_flags;
  auto* run = app.add_subcommand("run", "run one experiment (R seeds)");
  add_experiment_flags(*run, run_flags);

  Overrides sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "run one experiment per value of a parameter");
  add_experiment_flags(*sweep, sweep_flags);
  sweep->add_option("--axis", sweep_flags.sweep_axis, "tau, sigma, d, N or batch_size");
  sweep->add_option("--values", sweep_flags.sweep_values, "comma-separated values");

  Overrides ref_flags;
  auto* reference = app.add_subcommand("reference", "generate (or load) the cached reference front");
  add_experiment_flags(*reference, ref_flags);

  std::string table_dir;
  auto* table = app.add_subcommand("table", "recompute summary.csv from persisted runs");
  table->add_option("dir", table_dir, "output directory of a run or sweep")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = resolve(run_flags);
      const auto result = run_experiment(config);
      print_summary(result.summary);
      if (result.summary.failed > 0) fmt::print(stderr, "warning: {} run(s) blew up and were excluded\n", result.summary.failed);
    } else if (*sweep) {
      const auto config = resolve(sweep_flags);
      if (!config.sweep_axis) throw InvalidConfig("sweep needs --axis (or [sweep] axis in the config)");
      Index failed = 0;
      for (const auto& result : run_sweep(config)) {
        print_summary(result.summary);
        failed += result.summary.failed;
      }
      if (failed > 0) fmt::print(stderr, "warning: {} run(s) blew up and were excluded\n", failed);
    } else if (*reference) {
      const auto config = resolve(ref_flags);
      config.validate();
      const auto ref = load_or_generate_reference(config);
      fmt::print("{} ({} points)\n", reference_cache_file(config).string(), ref.size());
    } else if (*table) {
      for (const auto& row : recompute_table(table_dir)) print_summary(row);
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
