#include "amcbo/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cmath>
#include <map>
#include <sstream>

namespace amcbo::harness {

namespace pt = boost::property_tree;

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Tau: return "tau";
    case SweepAxis::Sigma: return "sigma";
    case SweepAxis::Dim: return "d";
    case SweepAxis::Particles: return "N";
    case SweepAxis::BatchSize: return "batch_size";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "tau") return SweepAxis::Tau;
  if (name == "sigma") return SweepAxis::Sigma;
  if (name == "d") return SweepAxis::Dim;
  if (name == "N") return SweepAxis::Particles;
  if (name == "batch_size") return SweepAxis::BatchSize;
  throw InvalidConfig("unknown sweep axis '" + name + "' (expected tau, sigma, d, N or batch_size)");
}

std::string ExperimentConfig::problem_label() const {
  if (problem == "lame") return fmt::format("gamma={}", params.gamma);
  if (problem == "do2dk") {
    std::string label = fmt::format("k={} s={}", params.k, params.s);
    if (params.do2dk_form != Do2dkForm::Standard) label += " form=" + to_string(params.do2dk_form);
    return label;
  }
  return "";
}

std::string ExperimentConfig::scenario_label() const {
  if (potential == "none" || solver.tau == 0.0) return "none";
  std::string label = potential;
  if (potential == "morse") label += fmt::format(" C={}", morse_c);
  if (potential == "riesz" && riesz_s) label += fmt::format(" s={}", *riesz_s);
  return label + fmt::format(" tau={}", solver.tau);
}

SolverConfig<double> ExperimentConfig::resolved_solver(Index m) const {
  SolverConfig<double> resolved = solver;
  if (potential == "none") {
    resolved.potential.reset();
    if (resolved.tau > 0.0) throw InvalidConfig("tau > 0 requires a potential");
    return resolved;
  }
  switch (potential_kind_from_string(potential)) {
    case PotentialKind::Riesz: resolved.potential = PotentialSpec<double>::riesz(m, riesz_s); break;
    case PotentialKind::Newtonian: resolved.potential = PotentialSpec<double>::newtonian(m); break;
    case PotentialKind::Morse: resolved.potential = PotentialSpec<double>::morse(m, morse_c); break;
  }
  return resolved;
}

namespace {

Index as_count(double value, const char* what) {
  if (!std::isfinite(value) || value < 1 || value != std::floor(value))
    throw InvalidConfig(fmt::format("sweep value {} for {} is not a positive integer", value, what));
  return static_cast<Index>(value);
}

}  // namespace

ExperimentConfig ExperimentConfig::with_sweep_value(SweepAxis axis, double value) const {
  if (!std::isfinite(value)) throw InvalidConfig("sweep values must be finite");
  ExperimentConfig copy = *this;
  copy.sweep_axis.reset();
  copy.sweep_values.clear();
  copy.sweep_label = fmt::format("{}={}", to_string(axis), value);
  switch (axis) {
    case SweepAxis::Tau: copy.solver.tau = value; break;
    case SweepAxis::Sigma: copy.solver.sigma = value; break;
    case SweepAxis::Dim: copy.dim = as_count(value, "d"); break;
    case SweepAxis::Particles: copy.solver.n_particles = as_count(value, "N"); break;
    case SweepAxis::BatchSize: copy.solver.batch_size = as_count(value, "batch_size"); break;
  }
  return copy;
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw InvalidConfig("need at least one run");
  if (metrics_every < 1) throw InvalidConfig("metrics cadence must be at least 1");
  if (histogram_bins < 1) throw InvalidConfig("histogram needs at least one bin");
  if (jobs < 1) throw InvalidConfig("jobs must be at least 1");
  if (!(morse_c > 0)) throw InvalidConfig("Morse rate must be positive");
  if (reference.points < 1) throw InvalidConfig("reference front needs at least one point");
  if (!(reference.dt > 0) || !(reference.horizon > 0)) throw InvalidConfig("reference flow needs positive dt and horizon");
  potential_kind_from_string(reference.potential);
  if (potential != "none") potential_kind_from_string(potential);
  if (sweep_axis && sweep_values.empty()) throw InvalidConfig("sweep axis given without values");
  for (double v : sweep_values)
    if (!std::isfinite(v)) throw InvalidConfig("sweep values must be finite");
  auto problem_ptr = make_problem<double>(problem, dim, params);
  resolved_solver(problem_ptr->n_objectives()).validate();
}

namespace {

using Setter = void (*)(ExperimentConfig&, const std::string&);

template <typename T>
T parse_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) throw InvalidConfig("cannot parse '" + text + "' for " + key);
  return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "on" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "off" || text == "0" || text == "no") return false;
  throw InvalidConfig("cannot parse '" + text + "' as a flag for " + key);
}

Diffusion parse_diffusion(const std::string& text) {
  if (text == "iso" || text == "isotropic") return Diffusion::Isotropic;
  if (text == "aniso" || text == "anisotropic") return Diffusion::Anisotropic;
  throw InvalidConfig("unknown diffusion '" + text + "'");
}

std::array<double, 2> parse_pair(const std::string& text, const std::string& key) {
  const auto values = parse_number_list(text);
  if (values.size() != 2) throw InvalidConfig(key + " needs two comma-separated numbers");
  return {values[0], values[1]};
}

#define AMCBO_KEY(section, key, body) \
  {section "." key, [](ExperimentConfig& c, const std::string& v) { body; }}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      AMCBO_KEY("problem", "name", c.problem = v),
      AMCBO_KEY("problem", "d", c.dim = parse_value<Index>(v, "problem.d")),
      AMCBO_KEY("problem", "gamma", c.params.gamma = parse_value<double>(v, "problem.gamma")),
      AMCBO_KEY("problem", "k", c.params.k = parse_value<int>(v, "problem.k")),
      AMCBO_KEY("problem", "s", c.params.s = parse_value<double>(v, "problem.s")),
      AMCBO_KEY("problem", "do2dk_form", c.params.do2dk_form = do2dk_form_from_string(v)),
      AMCBO_KEY("solver", "lambda", c.solver.lambda = parse_value<double>(v, "solver.lambda")),
      AMCBO_KEY("solver", "sigma", c.solver.sigma = parse_value<double>(v, "solver.sigma")),
      AMCBO_KEY("solver", "alpha", c.solver.alpha = parse_value<double>(v, "solver.alpha")),
      AMCBO_KEY("solver", "tau", c.solver.tau = parse_value<double>(v, "solver.tau")),
      AMCBO_KEY("solver", "dt", c.solver.dt = parse_value<double>(v, "solver.dt")),
      AMCBO_KEY("solver", "n_particles", c.solver.n_particles = parse_value<Index>(v, "solver.n_particles")),
      AMCBO_KEY("solver", "k_max", c.solver.max_iterations = parse_value<Index>(v, "solver.k_max")),
      AMCBO_KEY("solver", "diffusion", c.solver.diffusion = parse_diffusion(v)),
      AMCBO_KEY("solver", "potential", c.potential = v),
      AMCBO_KEY("solver", "morse_c", c.morse_c = parse_value<double>(v, "solver.morse_c")),
      AMCBO_KEY("solver", "riesz_s", c.riesz_s = parse_value<double>(v, "solver.riesz_s")),
      AMCBO_KEY("solver", "batch_size", c.solver.batch_size = parse_value<Index>(v, "solver.batch_size")),
      AMCBO_KEY("solver", "box_projection", c.solver.box_projection = parse_bool(v, "solver.box_projection")),
      AMCBO_KEY("experiment", "runs", c.runs = parse_value<Index>(v, "experiment.runs")),
      AMCBO_KEY("experiment", "seed", c.seed_base = parse_value<std::uint64_t>(v, "experiment.seed")),
      AMCBO_KEY("experiment", "metrics_every", c.metrics_every = parse_value<Index>(v, "experiment.metrics_every")),
      AMCBO_KEY("experiment", "mf_error", c.mf_error = parse_bool(v, "experiment.mf_error")),
      AMCBO_KEY("experiment", "gstar", c.gstar = parse_pair(v, "experiment.gstar")),
      AMCBO_KEY("experiment", "hist_bins", c.histogram_bins = parse_value<Index>(v, "experiment.hist_bins")),
      AMCBO_KEY("experiment", "jobs", c.jobs = parse_value<Index>(v, "experiment.jobs")),
      AMCBO_KEY("experiment", "out", c.out = v),
      AMCBO_KEY("reference", "points", c.reference.points = parse_value<Index>(v, "reference.points")),
      AMCBO_KEY("reference", "potential", c.reference.potential = v),
      AMCBO_KEY("reference", "dt", c.reference.dt = parse_value<double>(v, "reference.dt")),
      AMCBO_KEY("reference", "horizon", c.reference.horizon = parse_value<double>(v, "reference.horizon")),
      AMCBO_KEY("reference", "cache", c.reference.cache_dir = v),
      AMCBO_KEY("sweep", "axis", c.sweep_axis = sweep_axis_from_string(v)),
      AMCBO_KEY("sweep", "values", c.sweep_values = parse_number_list(v)),
  };
  return table;
}

#undef AMCBO_KEY

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidConfig(fmt::format("{}: {}", path.string(), e.what()));
  }
  const auto& table = setters();
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty())
      throw InvalidConfig(fmt::format("{}: key '{}' outside of any section", path.string(), section));
    for (const auto& [key, node] : entries) {
      const auto it = table.find(section + "." + key);
      if (it == table.end()) throw InvalidConfig(fmt::format("{}: unknown key [{}] {}", path.string(), section, key));
      it->second(base, node.data());
    }
  }
  return base;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    values.push_back(parse_value<double>(item, "number list"));
  }
  return values;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["problem"] = {{"name", c.problem}, {"d", c.dim}};
  if (c.problem == "lame") j["problem"]["gamma"] = c.params.gamma;
  if (c.problem == "do2dk") {
    j["problem"]["k"] = c.params.k;
    j["problem"]["s"] = c.params.s;
    j["problem"]["do2dk_form"] = to_string(c.params.do2dk_form);
  }
  const auto& s = c.solver;
  j["solver"] = {
      {"lambda", s.lambda},
      {"sigma", s.sigma},
      {"alpha", s.alpha},
      {"tau", s.tau},
      {"dt", s.dt},
      {"n_particles", s.n_particles},
      {"k_max", s.max_iterations},
      {"diffusion", s.diffusion == Diffusion::Isotropic ? "iso" : "aniso"},
      {"potential", c.potential},
      {"morse_c", c.morse_c},
      {"batch_size", s.effective_batch()},
      {"box_projection", s.box_projection},
  };
  if (c.riesz_s) j["solver"]["riesz_s"] = *c.riesz_s;
  j["experiment"] = {
      {"runs", c.runs},
      {"seed", c.seed_base},
      {"metrics_every", c.metrics_every},
      {"mf_error", c.mf_error},
      {"hist_bins", c.histogram_bins},
  };
  if (c.gstar) j["experiment"]["gstar"] = {(*c.gstar)[0], (*c.gstar)[1]};
  j["reference"] = {
      {"points", c.reference.points},
      {"potential", c.reference.potential},
      {"dt", c.reference.dt},
      {"horizon", c.reference.horizon},
  };
  if (c.sweep_axis) j["sweep"] = {{"axis", to_string(*c.sweep_axis)}, {"values", c.sweep_values}};
  return j;
}

}  // namespace amcbo::harness
