#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amcbo/harness/experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

using namespace amcbo;
using namespace amcbo::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("amcbo_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& file, const std::string& text) { std::ofstream(file) << text; }

// relative path -> contents for every regular file under `root`
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).string()] = slurp(entry.path());
  return files;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

// small and quick: a short flow for the reference, a handful of particles
ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig config;
  config.problem = "lame";
  config.dim = 4;
  config.params.gamma = 0.5;
  config.solver.n_particles = 12;
  config.solver.max_iterations = 40;
  config.runs = 3;
  config.seed_base = 5;
  config.potential = "morse";
  config.solver.tau = 0.1;
  config.reference.points = 20;
  config.reference.dt = 1e-6;
  config.reference.horizon = 1e-4;
  config.out = out;
  return config;
}

}  // namespace

TEST_CASE("INI configuration") {
  const fs::path dir = scratch("ini");
  write(dir / "a.ini",
        "[problem]\nname = do2dk\nd = 6\nk = 4\ns = 2\n"
        "[solver]\nlambda = 0.5\nsigma = 2\ntau = 0.01\npotential = riesz\nn_particles = 30\nk_max = 7\n"
        "diffusion = anisotropic\nbatch_size = 10\n"
        "[experiment]\nruns = 4\nseed = 11\nmetrics_every = 2\n"
        "[reference]\npoints = 50\ndt = 1e-6\n"
        "[sweep]\naxis = tau\nvalues = 0, 0.1,1\n");
  const auto c = load_config(dir / "a.ini");
  CHECK(c.problem == "do2dk");
  CHECK(c.dim == 6);
  CHECK(c.params.k == 4);
  CHECK(c.params.s == 2.0);
  CHECK(c.solver.lambda == 0.5);
  CHECK(c.solver.sigma == 2.0);
  CHECK(c.solver.tau == 0.01);
  CHECK(c.potential == "riesz");
  CHECK(c.solver.n_particles == 30);
  CHECK(c.solver.max_iterations == 7);
  CHECK(c.solver.diffusion == Diffusion::Anisotropic);
  CHECK(c.solver.batch_size == 10);
  CHECK(c.runs == 4);
  CHECK(c.seed_base == 11);
  CHECK(c.metrics_every == 2);
  CHECK(c.reference.points == 50);
  CHECK(c.reference.dt == 1e-6);
  CHECK(c.sweep_axis == SweepAxis::Tau);
  CHECK(c.sweep_values == std::vector<double>{0.0, 0.1, 1.0});
  CHECK_NOTHROW(c.validate());

  // untouched keys keep their defaults
  CHECK(c.solver.alpha == 1e6);
  CHECK(c.solver.dt == 0.1);
  CHECK(c.solver.box_projection);

  write(dir / "bad.ini", "[solver]\nlamda = 1\n");
  CHECK_THROWS_AS(load_config(dir / "bad.ini"), InvalidConfig);
  write(dir / "bad2.ini", "[solver]\nsigma = lots\n");
  CHECK_THROWS(load_config(dir / "bad2.ini"));
  CHECK_THROWS_AS(sweep_axis_from_string("lambda"), InvalidConfig);
  CHECK_THROWS(parse_number_list("1,,x"));
  for (auto axis : {SweepAxis::Tau, SweepAxis::Sigma, SweepAxis::Dim, SweepAxis::Particles, SweepAxis::BatchSize})
    CHECK(sweep_axis_from_string(to_string(axis)) == axis);

  ExperimentConfig bad;
  bad.potential = "morse";
  bad.solver.tau = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);
}

TEST_CASE("sweep values land in the right field") {
  ExperimentConfig base;
  CHECK(base.with_sweep_value(SweepAxis::Tau, 0.5).solver.tau == 0.5);
  CHECK(base.with_sweep_value(SweepAxis::Sigma, 2.0).solver.sigma == 2.0);
  CHECK(base.with_sweep_value(SweepAxis::Dim, 20).dim == 20);
  CHECK(base.with_sweep_value(SweepAxis::Particles, 50).solver.n_particles == 50);
  CHECK(base.with_sweep_value(SweepAxis::BatchSize, 10).solver.batch_size == 10);
  CHECK(base.with_sweep_value(SweepAxis::Tau, 0.5).sweep_label == "tau=0.5");
  CHECK_THROWS_AS(base.with_sweep_value(SweepAxis::Dim, 2.5), InvalidConfig);
}

TEST_CASE("zero iterations give a one-row history") {
  const fs::path dir = scratch("k0");
  auto config = small_config(dir / "out");
  config.solver.max_iterations = 0;
  config.runs = 1;
  const auto result = run_experiment(config);
  REQUIRE(result.runs.size() == 1);
  CHECK(result.runs[0].history.size() == 1);
  CHECK(result.runs[0].history[0].iteration == 0);
  CHECK(read_metrics_csv(dir / "out/runs/run_000/metrics.csv").size() == 1);
}

TEST_CASE("metrics rows and reference files round-trip") {
  MetricsRecord r;
  r.iteration = 3;
  r.gd = 0.1;
  r.igd = 1.0 / 3.0;
  r.hypervolume = 0.7;
  r.u_riesz = 1e10;
  r.mean_field_error = 2e-17;
  const fs::path dir = scratch("roundtrip");
  write(dir / "m.csv", metrics_csv_header() + "\n" + metrics_csv_row(r) + "\n");
  const auto back = read_metrics_csv(dir / "m.csv");
  REQUIRE(back.size() == 1);
  CHECK(back[0].iteration == 3);
  CHECK(back[0].igd == r.igd);
  CHECK(back[0].u_riesz == 1e10);
  CHECK(back[0].mean_field_error == r.mean_field_error);

  const ReferenceFront<double> ref{PointSetXd{{0.1, 0.9}, {1.0 / 3.0, 2.0 / 3.0}}};
  write_reference_csv(dir / "ref.csv", ref, "test");
  CHECK((read_reference_csv(dir / "ref.csv").points.array() == ref.points.array()).all());
}

TEST_CASE("runs are reproducible byte for byte across output directories") {
  const fs::path dir = scratch("bytes");
  run_experiment(small_config(dir / "a"));
  run_experiment(small_config(dir / "b"));
  const auto a = tree(dir / "a"), b = tree(dir / "b");
  CHECK(a.size() == b.size());
  CHECK(a.count("manifest.json") == 1);
  CHECK(a.count("summary.csv") == 1);
  CHECK(a.count("runs/run_002/final.csv") == 1);
  for (const auto& [name, text] : a) {
    INFO(name);
    REQUIRE(b.count(name) == 1);
    CHECK(text == b.at(name));
  }
}

TEST_CASE("summary is the mean of the final rows and can be rebuilt from disk") {
  const fs::path dir = scratch("table");
  auto config = small_config(dir / "out");
  config.metrics_every = 7;  // the last iteration is not on the stride
  const auto result = run_experiment(config);
  double gd = 0, igd = 0, hv = 0;
  for (const auto& run : result.runs) {
    REQUIRE(!run.failed);
    CHECK(run.history.back().iteration == 40);
    gd += run.history.back().gd;
    igd += run.history.back().igd;
    hv += run.history.back().hypervolume;
  }
  CHECK(result.summary.runs == 3);
  CHECK(result.summary.gd == doctest::Approx(gd / 3).epsilon(1e-14));
  CHECK(result.summary.igd == doctest::Approx(igd / 3).epsilon(1e-14));
  CHECK(result.summary.hv == doctest::Approx(hv / 3).epsilon(1e-14));

  const std::string before = slurp(dir / "out/summary.csv");
  fs::remove(dir / "out/summary.csv");
  const auto rows = recompute_table(dir / "out");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].gd == result.summary.gd);
  CHECK(slurp(dir / "out/summary.csv") == before);
}

TEST_CASE("plot data") {
  const fs::path dir = scratch("plots");
  const auto config = small_config(dir / "out");
  run_experiment(config);
  const auto hist = lines(slurp(dir / "out/plots/weight_histogram.csv"));
  REQUIRE(hist.size() == std::size_t(config.histogram_bins) + 1);
  long total = 0;
  for (std::size_t i = 1; i < hist.size(); ++i) total += std::stol(hist[i].substr(hist[i].rfind(',') + 1));
  CHECK(total == config.solver.n_particles);

  const auto scatter = lines(slurp(dir / "out/plots/front_scatter.csv"));
  CHECK(scatter.size() == std::size_t(config.solver.n_particles + config.reference.points) + 1);
  CHECK(fs::exists(dir / "out/plots/metrics_vs_iteration_mean.csv"));
  CHECK(fs::exists(dir / "out/plots/plot_metrics_vs_iteration.py"));
}

TEST_CASE("a one-point sweep matches a plain run") {
  const fs::path dir = scratch("sweep");
  auto config = small_config(dir / "sweep");
  config.sweep_axis = SweepAxis::Tau;
  config.sweep_values = {0.1};
  const auto sweep = run_sweep(config);
  auto plain = small_config(dir / "plain");
  plain.reference.cache_dir = dir / "sweep/reference";
  const auto single = run_experiment(plain);
  REQUIRE(sweep.size() == 1);
  CHECK(sweep[0].summary.gd == single.summary.gd);
  CHECK(sweep[0].summary.sweep == "tau=0.1");
  CHECK(slurp(dir / "sweep/tau_0.1/runs/run_000/metrics.csv") == slurp(dir / "plain/runs/run_000/metrics.csv"));
  CHECK(fs::exists(dir / "sweep/sweep.csv"));
  CHECK(recompute_table(dir / "sweep").size() == 1);
}

TEST_CASE("reference cache is reused") {
  const fs::path dir = scratch("cache");
  auto config = small_config(dir / "out");
  config.reference.cache_dir = dir / "cache";
  const auto file = reference_cache_file(config);
  CHECK(!fs::exists(file));
  const auto first = load_or_generate_reference(config);
  REQUIRE(fs::exists(file));
  const auto second = load_or_generate_reference(config);
  CHECK((first.points.array() == second.points.array()).all());
  config.reference.points = 21;
  CHECK(reference_cache_file(config) != file);
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli");
  const std::string cli = AMCBO_CLI_PATH;
  const std::string common =
      " --problem do2dk --k 2 --s 1 --d 4 --n-particles 8 --k-max 20 --runs 2 --ref-points 15 --ref-dt 1e-6"
      " --ref-horizon 1e-4 > /dev/null";
  CHECK(std::system((cli + " run --out " + (dir / "run").string() + common).c_str()) == 0);
  CHECK(fs::exists(dir / "run/summary.csv"));
  CHECK(std::system((cli + " sweep --axis sigma --values 1,4 --out " + (dir / "sweep").string() + common).c_str()) == 0);
  CHECK(fs::exists(dir / "sweep/sigma_4/summary.csv"));
  CHECK(std::system((cli + " table " + (dir / "run").string() + " > /dev/null").c_str()) == 0);
  CHECK(std::system((cli + " run --problem zdt1 --out " + (dir / "bad").string() + " 2> /dev/null").c_str()) != 0);
  CHECK(std::system((cli + " run --sigma -1 --out " + (dir / "bad").string() + " 2> /dev/null").c_str()) != 0);
}
