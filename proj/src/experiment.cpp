#include "amcbo/harness/experiment.hpp"

#include "amcbo/reference.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace amcbo::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::runtime_error io_error(const fs::path& path, const std::string& what) {
  return std::runtime_error(fmt::format("{}: {}", path.string(), what));
}

std::ofstream open_output(const fs::path& file) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  if (ec) throw io_error(file.parent_path(), ec.message());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(file, "cannot open for writing");
  return out;
}

void write_text(const fs::path& file, const std::string& text) {
  auto out = open_output(file);
  out << text;
  if (!out) throw io_error(file, "write failed");
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw io_error(file, "cannot open for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double parse_double(const std::string& text, const fs::path& file) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) throw io_error(file, "bad number '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

std::string file_safe(std::string text) {
  for (char& ch : text)
    if (ch == ' ' || ch == '/') ch = '_';
  return text;
}

std::string run_dir_name(Index run) { return fmt::format("run_{:03d}", run); }

}  // namespace

std::string format_number(double value) { return fmt::format("{}", value); }

// ---------------------------------------------------------------- reference

fs::path reference_cache_file(const ExperimentConfig& config) {
  const fs::path dir = config.reference.cache_dir.empty() ? config.out / "reference" : config.reference.cache_dir;
  // Built-in fronts h(r) = g((r,0,...,0)) do not depend on d, so d is not part of the key.
  return dir / file_safe(fmt::format("{}_{}_M{}_{}_dt{}_T{}.csv", config.problem, config.problem_label(),
                                     config.reference.points, config.reference.potential, config.reference.dt,
                                     config.reference.horizon));
}

void write_reference_csv(const fs::path& file, const ReferenceFront<double>& ref, const std::string& description) {
  std::string text = "# " + description + "\n";
  for (Index k = 0; k < ref.dim(); ++k) text += fmt::format("{}g{}", k == 0 ? "" : ",", k + 1);
  text += "\n";
  for (Index i = 0; i < ref.size(); ++i) {
    for (Index k = 0; k < ref.dim(); ++k) text += (k == 0 ? "" : ",") + format_number(ref.points(i, k));
    text += "\n";
  }
  write_text(file, text);
}

ReferenceFront<double> read_reference_csv(const fs::path& file) {
  std::istringstream in(read_text(file));
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& field : split(line)) row.push_back(parse_double(field, file));
    if (!rows.empty() && row.size() != rows.front().size()) throw io_error(file, "ragged reference rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(file, "reference front is empty");
  ReferenceFront<double> ref{PointSet<double>(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()))};
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) ref.points(Index(i), Index(k)) = rows[i][k];
  return ref;
}

ReferenceFront<double> load_or_generate_reference(const ExperimentConfig& config) {
  const fs::path file = reference_cache_file(config);
  if (fs::exists(file)) return read_reference_csv(file);

  const auto problem = make_problem<double>(config.problem, config.dim, config.params);
  FrontFlowConfig<double> flow;
  flow.n_points = config.reference.points;
  flow.dt = config.reference.dt;
  flow.horizon = config.reference.horizon;
  const Index m = problem->n_objectives();
  switch (potential_kind_from_string(config.reference.potential)) {
    case PotentialKind::Riesz: flow.potential = PotentialSpec<double>::riesz(m); break;
    case PotentialKind::Newtonian: flow.potential = PotentialSpec<double>::newtonian(m); break;
    case PotentialKind::Morse: flow.potential = PotentialSpec<double>::morse(m, config.morse_c); break;
  }
  const auto ref = generate_reference(*problem, flow);
  const std::string description =
      fmt::format("reference front problem={} {} M={} potential={} dt={} T={}", config.problem, config.problem_label(),
                  config.reference.points, config.reference.potential, config.reference.dt, config.reference.horizon);
  // Write to a temporary name first so a concurrent reader never sees half a file.
  const fs::path partial = fs::path(file).concat(".partial");
  write_reference_csv(partial, ref, description);
  fs::rename(partial, file);
  return read_reference_csv(file);
}

// ---------------------------------------------------------------- metrics I/O

std::string metrics_csv_header() { return "k,gd,igd,hv,u_riesz,u_newton,u_morse,mf_err,oob_frac"; }

std::string metrics_csv_row(const MetricsRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{}", r.iteration, format_number(r.gd), format_number(r.igd),
                     format_number(r.hypervolume), format_number(r.u_riesz), format_number(r.u_newton),
                     format_number(r.u_morse), r.mean_field_error ? format_number(*r.mean_field_error) : "",
                     format_number(r.out_of_box));
}

std::vector<MetricsRecord> read_metrics_csv(const fs::path& file) {
  std::istringstream in(read_text(file));
  std::string line;
  if (!std::getline(in, line) || line != metrics_csv_header()) throw io_error(file, "unexpected metrics header");
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) throw io_error(file, "metrics row needs 9 fields");
    MetricsRecord r;
    r.iteration = static_cast<Index>(parse_double(f[0], file));
    r.gd = parse_double(f[1], file);
    r.igd = parse_double(f[2], file);
    r.hypervolume = parse_double(f[3], file);
    r.u_riesz = parse_double(f[4], file);
    r.u_newton = parse_double(f[5], file);
    r.u_morse = parse_double(f[6], file);
    if (!f[7].empty()) r.mean_field_error = parse_double(f[7], file);
    r.out_of_box = parse_double(f[8], file);
    records.push_back(r);
  }
  return records;
}

// ---------------------------------------------------------------- summary

namespace {

SummaryRow summarize_finals(const ExperimentConfig& config, const std::vector<const MetricsRecord*>& finals,
                            Index failed) {
  SummaryRow row;
  row.problem = config.problem;
  row.params = config.problem_label();
  row.scenario = config.scenario_label();
  row.sweep = config.sweep_label;
  row.runs = static_cast<Index>(finals.size());
  row.failed = failed;
  row.seed_base = config.seed_base;
  if (finals.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.gd = row.u_riesz = row.u_newton = row.u_morse = row.hv = row.igd = nan;
    return row;
  }
  bool all_mf = true;
  double mf = 0;
  for (const MetricsRecord* r : finals) {
    row.gd += r->gd;
    row.u_riesz += r->u_riesz;
    row.u_newton += r->u_newton;
    row.u_morse += r->u_morse;
    row.hv += r->hypervolume;
    row.igd += r->igd;
    if (r->mean_field_error) mf += *r->mean_field_error;
    else all_mf = false;
  }
  const double n = double(finals.size());
  row.gd /= n;
  row.u_riesz /= n;
  row.u_newton /= n;
  row.u_morse /= n;
  row.hv /= n;
  row.igd /= n;
  if (all_mf) row.mf_err = mf / n;
  return row;
}

}  // namespace

SummaryRow summarize(const ExperimentConfig& config, const std::vector<RunOutcome>& runs) {
  std::vector<const MetricsRecord*> finals;
  Index failed = 0;
  for (const auto& run : runs) {
    if (run.failed || run.history.empty()) ++failed;
    else finals.push_back(&run.history.back());
  }
  return summarize_finals(config, finals, failed);
}

void write_summary_csv(const fs::path& file, const std::vector<SummaryRow>& rows) {
  std::string text = "problem,params,scenario,sweep,runs,failed,seed_base,gd,u_riesz,u_newton,u_morse,hv,igd,mf_err\n";
  for (const auto& r : rows) {
    text += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.problem, r.params, r.scenario, r.sweep, r.runs,
                        r.failed, r.seed_base, format_number(r.gd), format_number(r.u_riesz), format_number(r.u_newton),
                        format_number(r.u_morse), format_number(r.hv), format_number(r.igd),
                        r.mf_err ? format_number(*r.mf_err) : "");
  }
  write_text(file, text);
}

// ---------------------------------------------------------------- runs

namespace {

using MinimizerMap = std::function<Vector<double>(const Vector<double>&)>;

// The edge minimizer search is expensive; weights are frozen when tau = 0, so
// remember every weight vector seen.
MinimizerMap memoized(MinimizerMap inner) {
  auto cache = std::make_shared<std::map<std::vector<double>, Vector<double>>>();
  return [inner = std::move(inner), cache](const Vector<double>& w) -> Vector<double> {
    std::vector<double> key(w.data(), w.data() + w.size());
    const auto it = cache->find(key);
    if (it != cache->end()) return it->second;
    if (cache->size() > 50000) cache->clear();
    Vector<double> x = inner(w);
    cache->emplace(std::move(key), x);
    return x;
  };
}

RunOutcome execute_run(const ExperimentConfig& config, const Problem<double>& problem,
                       const SolverConfig<double>& solver_base, const MetricsContext<double>& base_context, Index run) {
  RunOutcome outcome;
  outcome.run = run;
  outcome.seed = config.seed_base + static_cast<std::uint64_t>(run);
  SolverConfig<double> solver = solver_base;
  solver.seed = outcome.seed;

  MetricsContext<double> context = base_context;
  if (context.minimizer_map) context.minimizer_map = memoized(context.minimizer_map);

  const Index every = config.metrics_every;
  const Index last = solver.max_iterations;
  try {
    auto result = iterate(problem, solver, [&](Index k, const SwarmView<double>& view) {
      if (k % every == 0 || k == last) outcome.history.push_back(evaluate_metrics(view, context));
    });
    outcome.final_swarm = std::move(result.final_swarm);
    outcome.final_images = problem.evaluate_all(outcome.final_swarm.positions);
  } catch (const NumericalBlowup& e) {
    outcome.failed = true;
    outcome.error = e.what();
  }
  return outcome;
}

std::string final_state_csv(const RunOutcome& run) {
  const auto& x = run.final_swarm.positions;
  const auto& w = run.final_swarm.weights;
  const auto& g = run.final_images;
  std::string text;
  for (Index k = 0; k < x.cols(); ++k) text += fmt::format("x{},", k + 1);
  for (Index k = 0; k < w.cols(); ++k) text += fmt::format("w{},", k + 1);
  for (Index k = 0; k < g.cols(); ++k) text += fmt::format("g{}{}", k + 1, k + 1 == g.cols() ? "" : ",");
  text += "\n";
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index k = 0; k < x.cols(); ++k) text += format_number(x(i, k)) + ",";
    for (Index k = 0; k < w.cols(); ++k) text += format_number(w(i, k)) + ",";
    for (Index k = 0; k < g.cols(); ++k) text += format_number(g(i, k)) + (k + 1 == g.cols() ? "" : ",");
    text += "\n";
  }
  return text;
}

void write_run(const fs::path& dir, const RunOutcome& run) {
  std::string metrics = metrics_csv_header() + "\n";
  for (const auto& record : run.history) metrics += metrics_csv_row(record) + "\n";
  write_text(dir / "metrics.csv", metrics);
  if (!run.failed) write_text(dir / "final.csv", final_state_csv(run));
}

json labels_json(const ExperimentConfig& config) {
  return {{"problem", config.problem},
          {"params", config.problem_label()},
          {"scenario", config.scenario_label()},
          {"sweep", config.sweep_label},
          {"seed_base", config.seed_base}};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_outputs) {
  config.validate();
  ExperimentResult result;
  result.config = config;

  const auto problem = make_problem<double>(config.problem, config.dim, config.params);
  const SolverConfig<double> solver = config.resolved_solver(problem->n_objectives());
  result.reference = load_or_generate_reference(config);

  MetricsContext<double> context;
  context.reference = result.reference;
  context.gstar = config.gstar ? Vector<double>{{(*config.gstar)[0], (*config.gstar)[1]}}
                               : default_reference_point(result.reference);
  context.morse_c = config.morse_c;
  if (config.mf_error) {
    if (auto chart = problem->chart()) context.minimizer_map = edge_minimizer_map(*chart);
  }

  result.runs.resize(static_cast<std::size_t>(config.runs));
  auto job = [&](Index run) {
    RunOutcome outcome = execute_run(config, *problem, solver, context, run);
    if (write_outputs) write_run(config.out / "runs" / run_dir_name(run), outcome);
    result.runs[static_cast<std::size_t>(run)] = std::move(outcome);
  };

  const Index workers = std::min(config.jobs, config.runs);
  if (workers <= 1) {
    for (Index run = 0; run < config.runs; ++run) job(run);
  } else {
    std::atomic<Index> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    for (Index t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (Index run = next++; run < config.runs; run = next++) {
          try {
            job(run);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (auto& thread : pool) thread.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  result.summary = summarize(config, result.runs);

  if (write_outputs) {
    json manifest;
    manifest["config"] = to_json(config);
    manifest["labels"] = labels_json(config);
    manifest["reference_file"] = reference_cache_file(config).filename().string();
    json runs = json::array();
    for (const auto& run : result.runs) {
      json entry = {{"run", run.run},
                    {"seed", run.seed},
                    {"dir", "runs/" + run_dir_name(run.run)},
                    {"status", run.failed ? "blowup" : "ok"}};
      if (run.failed) entry["error"] = run.error;
      runs.push_back(std::move(entry));
    }
    manifest["runs"] = std::move(runs);
    manifest["failed_runs"] = result.summary.failed;
    write_text(config.out / "manifest.json", manifest.dump(2) + "\n");
    write_summary_csv(config.out / "summary.csv", {result.summary});
    const fs::path plots = config.out / "plots";
    emit_plot_data(result, PlotKind::MetricsVsIteration, plots);
    emit_plot_data(result, PlotKind::FrontScatter, plots);
    emit_plot_data(result, PlotKind::WeightHistogram, plots);
  }
  return result;
}

std::vector<ExperimentResult> run_sweep(const ExperimentConfig& config, bool write_outputs) {
  if (!config.sweep_axis) throw InvalidConfig("sweep needs an axis");
  if (config.sweep_values.empty()) throw InvalidConfig("sweep needs at least one value");
  const SweepAxis axis = *config.sweep_axis;

  // Every point shares one reference cache unless the user chose another.
  ExperimentConfig shared = config;
  if (shared.reference.cache_dir.empty()) shared.reference.cache_dir = config.out / "reference";

  std::vector<ExperimentResult> results;
  json points = json::array();
  for (double value : config.sweep_values) {
    ExperimentConfig point = shared.with_sweep_value(axis, value);
    const std::string dir = file_safe(fmt::format("{}_{}", to_string(axis), value));
    point.out = config.out / dir;
    results.push_back(run_experiment(point, write_outputs));
    points.push_back({{"value", value}, {"dir", dir}});
  }

  if (write_outputs) {
    std::string text = "axis,value,metric,mean\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& s = results[i].summary;
      const std::string prefix = fmt::format("{},{}", to_string(axis), format_number(config.sweep_values[i]));
      const std::pair<const char*, double> metrics[] = {{"gd", s.gd},           {"igd", s.igd},
                                                        {"hv", s.hv},           {"u_riesz", s.u_riesz},
                                                        {"u_newton", s.u_newton}, {"u_morse", s.u_morse}};
      for (const auto& [name, value] : metrics) text += fmt::format("{},{},{}\n", prefix, name, format_number(value));
      if (s.mf_err) text += fmt::format("{},mf_err,{}\n", prefix, format_number(*s.mf_err));
      text += fmt::format("{},failed,{}\n", prefix, s.failed);
    }
    write_text(config.out / "sweep.csv", text);

    std::vector<SummaryRow> rows;
    for (const auto& r : results) rows.push_back(r.summary);
    write_summary_csv(config.out / "summary.csv", rows);

    json manifest;
    manifest["config"] = to_json(config);
    manifest["sweep"] = {{"axis", to_string(axis)}, {"points", std::move(points)}};
    write_text(config.out / "manifest.json", manifest.dump(2) + "\n");
    emit_sweep_plot_data(results, axis, config.out / "plots");
  }
  return results;
}

std::vector<SummaryRow> recompute_table(const fs::path& out) {
  const json manifest = json::parse(read_text(out / "manifest.json"));
  std::vector<SummaryRow> rows;
  if (manifest.contains("sweep")) {
    for (const auto& point : manifest["sweep"]["points"]) {
      const auto sub = recompute_table(out / point["dir"].get<std::string>());
      rows.insert(rows.end(), sub.begin(), sub.end());
    }
    write_summary_csv(out / "summary.csv", rows);
    return rows;
  }

  const auto& labels = manifest.at("labels");
  ExperimentConfig config;
  std::vector<MetricsRecord> finals;
  finals.reserve(manifest.at("runs").size());
  Index failed = 0;
  for (const auto& run : manifest.at("runs")) {
    if (run.at("status") != "ok") {
      ++failed;
      continue;
    }
    const auto history = read_metrics_csv(out / run.at("dir").get<std::string>() / "metrics.csv");
    if (history.empty()) {
      ++failed;
      continue;
    }
    finals.push_back(history.back());
  }
  std::vector<const MetricsRecord*> pointers;
  for (const auto& r : finals) pointers.push_back(&r);
  SummaryRow row = summarize_finals(config, pointers, failed);
  row.problem = labels.at("problem").get<std::string>();
  row.params = labels.at("params").get<std::string>();
  row.scenario = labels.at("scenario").get<std::string>();
  row.sweep = labels.at("sweep").get<std::string>();
  row.seed_base = labels.at("seed_base").get<std::uint64_t>();
  rows.push_back(row);
  write_summary_csv(out / "summary.csv", rows);
  return rows;
}

}  // namespace amcbo::harness
