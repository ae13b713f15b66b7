#pragma once

// Multi-run experiments, sweeps, reference-front caching and persistence.

#include "amcbo/harness/config.hpp"
#include "amcbo/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace amcbo::harness {

/// Reference front for the configured problem, read from the cache or
/// generated and written there.
ReferenceFront<double> load_or_generate_reference(const ExperimentConfig& config);

std::filesystem::path reference_cache_file(const ExperimentConfig& config);

struct RunOutcome {
  Index run = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::vector<MetricsRecord> history;
  Swarm<double> final_swarm;
  PointSet<double> final_images;
};

struct SummaryRow {
  std::string problem;
  std::string params;
  std::string scenario;
  std::string sweep;  // "axis=value" for a sweep point, empty otherwise
  Index runs = 0;
  Index failed = 0;
  std::uint64_t seed_base = 0;
  double gd = 0;
  double u_riesz = 0;
  double u_newton = 0;
  double u_morse = 0;
  double hv = 0;
  double igd = 0;
  std::optional<double> mf_err;
};

struct ExperimentResult {
  ExperimentConfig config;
  ReferenceFront<double> reference;
  std::vector<RunOutcome> runs;
  SummaryRow summary;
};

/// Runs seeds seed_base .. seed_base + runs - 1. Blown-up runs are kept with
/// failed = true and left out of the summary.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_outputs = true);

/// One experiment per sweep value, each under <out>/<axis>_<value>, plus
/// <out>/sweep.csv in long format.
std::vector<ExperimentResult> run_sweep(const ExperimentConfig& config, bool write_outputs = true);

/// Means of the final records of the completed runs.
SummaryRow summarize(const ExperimentConfig& config, const std::vector<RunOutcome>& runs);

/// Recomputes summary.csv of a persisted run (or of every point of a
/// persisted sweep) from the per-run metrics files.
std::vector<SummaryRow> recompute_table(const std::filesystem::path& out);

void write_summary_csv(const std::filesystem::path& file, const std::vector<SummaryRow>& rows);

// Serialization helpers, shared with the table command.
std::string format_number(double value);
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& record);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& file);

void write_reference_csv(const std::filesystem::path& file, const ReferenceFront<double>& ref,
                         const std::string& description);
ReferenceFront<double> read_reference_csv(const std::filesystem::path& file);

enum class PlotKind { MetricsVsIteration, MetricVsSweep, FrontScatter, WeightHistogram };

/// Writes the CSV data behind one figure kind plus a small matplotlib script.
void emit_plot_data(const ExperimentResult& result, PlotKind kind, const std::filesystem::path& dir);
void emit_sweep_plot_data(const std::vector<ExperimentResult>& results, SweepAxis axis,
                          const std::filesystem::path& dir);

}  // namespace amcbo::harness
