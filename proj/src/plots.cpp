#include "amcbo/harness/experiment.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>

namespace amcbo::harness {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& file, const std::string& text) {
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  if (ec) throw std::runtime_error(fmt::format("{}: {}", file.parent_path().string(), ec.message()));
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error(fmt::format("{}: write failed", file.string()));
}

const RunOutcome* first_completed(const ExperimentResult& result) {
  for (const auto& run : result.runs)
    if (!run.failed) return &run;
  return nullptr;
}

constexpr const char* kMetricsScript = R"(import glob
import os

import matplotlib.pyplot as plt
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__))
mean = pd.read_csv(os.path.join(here, "metrics_vs_iteration_mean.csv"))
runs = sorted(glob.glob(os.path.join(here, "..", "runs", "run_*", "metrics.csv")))

fig, axes = plt.subplots(2, 3, figsize=(13, 7))
for ax, column in zip(axes.flat, ["gd", "igd", "hv", "u_riesz", "u_newton", "u_morse"]):
    for path in runs:
        run = pd.read_csv(path)
        ax.plot(run["k"], run[column], color="0.8", lw=0.6)
    ax.plot(mean["k"], mean[column], color="C0", lw=1.5)
    ax.set_title(column)
    ax.set_xlabel("k")
    if column in ("gd", "igd", "u_riesz"):
        ax.set_yscale("log")
fig.tight_layout()
fig.savefig(os.path.join(here, "metrics_vs_iteration.png"), dpi=150)
)";

constexpr const char* kScatterScript = R"(import os

import matplotlib.pyplot as plt
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__))
data = pd.read_csv(os.path.join(here, "front_scatter.csv"))
ref = data[data["source"] == "reference"]
particles = data[data["source"] == "particle"]

fig, ax = plt.subplots(figsize=(5, 5))
ax.plot(ref["g1"], ref["g2"], ".", color="0.6", ms=3, label="reference")
ax.plot(particles["g1"], particles["g2"], "o", color="C3", ms=3, label="particles")
ax.set_xlabel("g1")
ax.set_ylabel("g2")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "front_scatter.png"), dpi=150)
)";

constexpr const char* kHistogramScript = R"(import os

import matplotlib.pyplot as plt
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__))
hist = pd.read_csv(os.path.join(here, "weight_histogram.csv"))

fig, ax = plt.subplots(figsize=(5, 3))
ax.bar(hist["bin_lo"], hist["count"], width=hist["bin_hi"] - hist["bin_lo"], align="edge", edgecolor="k")
ax.set_xlabel("w1")
ax.set_ylabel("particles")
fig.tight_layout()
fig.savefig(os.path.join(here, "weight_histogram.png"), dpi=150)
)";

constexpr const char* kSweepScript = R"(import os

import matplotlib.pyplot as plt
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__))
data = pd.read_csv(os.path.join(here, "metric_vs_sweep.csv"))
axis = data.columns[0]

fig, axes = plt.subplots(1, 4, figsize=(15, 3.5))
for ax, column in zip(axes, ["gd", "igd", "hv", "u_morse"]):
    ax.plot(data[axis], data[column], "o-")
    ax.set_xlabel(axis)
    ax.set_title(column)
    if axis in ("tau", "sigma") and (data[axis] > 0).all():
        ax.set_xscale("log")
fig.tight_layout()
fig.savefig(os.path.join(here, "metric_vs_sweep.png"), dpi=150)
)";

void emit_metrics_vs_iteration(const ExperimentResult& result, const fs::path& dir) {
  std::vector<const RunOutcome*> completed;
  for (const auto& run : result.runs)
    if (!run.failed) completed.push_back(&run);

  std::string text = metrics_csv_header() + "\n";
  if (!completed.empty()) {
    const std::size_t length = completed.front()->history.size();
    for (std::size_t t = 0; t < length; ++t) {
      MetricsRecord mean;
      mean.iteration = completed.front()->history[t].iteration;
      bool has_mf = true;
      double mf = 0;
      for (const RunOutcome* run : completed) {
        const MetricsRecord& r = run->history[t];
        mean.gd += r.gd;
        mean.igd += r.igd;
        mean.hypervolume += r.hypervolume;
        mean.u_riesz += r.u_riesz;
        mean.u_newton += r.u_newton;
        mean.u_morse += r.u_morse;
        mean.out_of_box += r.out_of_box;
        if (r.mean_field_error) mf += *r.mean_field_error;
        else has_mf = false;
      }
      const double n = double(completed.size());
      mean.gd /= n;
      mean.igd /= n;
      mean.hypervolume /= n;
      mean.u_riesz /= n;
      mean.u_newton /= n;
      mean.u_morse /= n;
      mean.out_of_box /= n;
      if (has_mf) mean.mean_field_error = mf / n;
      text += metrics_csv_row(mean) + "\n";
    }
  }
  write_file(dir / "metrics_vs_iteration_mean.csv", text);
  write_file(dir / "plot_metrics_vs_iteration.py", kMetricsScript);
}

void emit_front_scatter(const ExperimentResult& result, const fs::path& dir) {
  const Index m = result.reference.dim();
  std::string text = "source";
  for (Index k = 0; k < m; ++k) text += fmt::format(",g{}", k + 1);
  text += "\n";
  if (const RunOutcome* run = first_completed(result)) {
    for (Index i = 0; i < run->final_images.rows(); ++i) {
      text += "particle";
      for (Index k = 0; k < m; ++k) text += "," + format_number(run->final_images(i, k));
      text += "\n";
    }
  }
  for (Index i = 0; i < result.reference.size(); ++i) {
    text += "reference";
    for (Index k = 0; k < m; ++k) text += "," + format_number(result.reference.points(i, k));
    text += "\n";
  }
  write_file(dir / "front_scatter.csv", text);
  write_file(dir / "plot_front_scatter.py", kScatterScript);
}

void emit_weight_histogram(const ExperimentResult& result, const fs::path& dir) {
  const Index bins = result.config.histogram_bins;
  std::vector<Index> counts(static_cast<std::size_t>(bins), 0);
  if (const RunOutcome* run = first_completed(result)) {
    const auto& w = run->final_swarm.weights;
    for (Index i = 0; i < w.rows(); ++i) {
      const Index bin = std::min<Index>(bins - 1, static_cast<Index>(w(i, 0) * double(bins)));
      ++counts[static_cast<std::size_t>(std::max<Index>(bin, 0))];
    }
  }
  std::string text = "bin_lo,bin_hi,count\n";
  for (Index b = 0; b < bins; ++b)
    text += fmt::format("{},{},{}\n", format_number(double(b) / double(bins)), format_number(double(b + 1) / double(bins)),
                        counts[static_cast<std::size_t>(b)]);
  write_file(dir / "weight_histogram.csv", text);
  write_file(dir / "plot_weight_histogram.py", kHistogramScript);
}

}  // namespace

void emit_plot_data(const ExperimentResult& result, PlotKind kind, const fs::path& dir) {
  switch (kind) {
    case PlotKind::MetricsVsIteration: emit_metrics_vs_iteration(result, dir); return;
    case PlotKind::FrontScatter: emit_front_scatter(result, dir); return;
    case PlotKind::WeightHistogram: emit_weight_histogram(result, dir); return;
    case PlotKind::MetricVsSweep:
      throw InvalidInput("metric_vs_sweep needs a sweep; use emit_sweep_plot_data");
  }
}

void emit_sweep_plot_data(const std::vector<ExperimentResult>& results, SweepAxis axis, const fs::path& dir) {
  if (results.empty()) throw InvalidInput("emit_sweep_plot_data: no results");
  std::string text = to_string(axis) + ",gd,igd,hv,u_riesz,u_newton,u_morse,mf_err,failed\n";
  for (const auto& result : results) {
    const auto& s = result.summary;
    const auto& sweep = s.sweep;
    const std::string value = sweep.substr(sweep.find('=') + 1);
    text += fmt::format("{},{},{},{},{},{},{},{},{}\n", value, format_number(s.gd), format_number(s.igd),
                        format_number(s.hv), format_number(s.u_riesz), format_number(s.u_newton),
                        format_number(s.u_morse), s.mf_err ? format_number(*s.mf_err) : "", s.failed);
  }
  write_file(dir / "metric_vs_sweep.csv", text);
  write_file(dir / "plot_metric_vs_sweep.py", kSweepScript);
}

}  // namespace amcbo::harness
