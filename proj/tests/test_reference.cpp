#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amcbo/reference.hpp"
#include "test_helpers.hpp"

using namespace amcbo;

namespace {

FrontChart<double> linear_chart() {
  FrontChart<double> chart;
  chart.h = [](double r) { return VectorXd{{r, 1.0 - r}}; };
  chart.edge = [](double r) { return VectorXd{{r}}; };
  return chart;
}

double chart_energy(const PotentialSpec<double>& spec, const FrontChart<double>& chart, const VectorXd& coords) {
  return energy(spec, detail::chart_images(chart, coords));
}

}  // namespace

TEST_CASE("chart derivative") {
  const auto lame = make_problem("lame", 5, ProblemParams{.gamma = 1.0});
  const auto chart = front_chart(*lame);
  const VectorXd t = chart_jacobian(chart, 0.5);
  // h(r) = (cos^2, sin^2)(pi r / 2), so h'(1/2) = (-pi/2, pi/2)
  CHECK(t(0) == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-6));
  CHECK(t(1) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));

  const VectorXd l = chart_jacobian(linear_chart(), 0.0);
  CHECK(l(0) == doctest::Approx(1.0));
  CHECK(l(1) == doctest::Approx(-1.0));
  CHECK(chart_jacobian(linear_chart(), 1.0)(0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(chart_jacobian(linear_chart(), 1.5), InvalidInput);

  FrontChart<double> flat;
  flat.h = [](double) { return VectorXd{{0.5, 0.5}}; };
  flat.edge = [](double r) { return VectorXd{{r}}; };
  CHECK_THROWS_AS(chart_jacobian(flat, 0.5), DegenerateChart);
}

TEST_CASE("a single point does not move") {
  FrontFlowConfig<double> config;
  config.n_points = 1;
  config.dt = 1e-4;
  const auto flow = flow_on_front(config, linear_chart(), VectorXd{{0.3}});
  CHECK(flow.final_coords(0) == 0.3);
  CHECK(equispaced_coords<double>(1)(0) == 0.5);
}

TEST_CASE("two points repel to the ends of the linear chart") {
  FrontFlowConfig<double> config;
  config.n_points = 2;
  // the gap grows like t^(1/3), reaching the ends near t = 0.94
  config.dt = 1e-3;
  config.horizon = 1.5;
  const auto flow = flow_on_front(config, linear_chart(), VectorXd{{0.4, 0.6}});
  CHECK(flow.final_coords(0) <= 1e-3);
  CHECK(flow.final_coords(1) >= 1.0 - 1e-3);

  // the symmetric pair moves symmetrically
  CHECK(flow.final_coords(0) == doctest::Approx(1.0 - flow.final_coords(1)).epsilon(1e-12));
}

TEST_CASE("points at the ends pushed outward stay put") {
  FrontFlowConfig<double> config;
  config.n_points = 2;
  config.dt = 1e-4;
  config.horizon = 0.01;
  const auto flow = flow_on_front(config, linear_chart(), VectorXd{{0.0, 1.0}});
  CHECK(flow.final_coords(0) == 0.0);
  CHECK(flow.final_coords(1) == 1.0);
}

TEST_CASE("energy decreases along the flow and coordinates stay in [0,1]") {
  for (const auto& spec : {PotentialSpec<double>::riesz(2), PotentialSpec<double>::morse(2)}) {
    FrontFlowConfig<double> config;
    config.n_points = 10;
    config.potential = spec;
    config.dt = 1e-5;
    config.horizon = 0.02;
    config.record_every = 100;
    VectorXd start(10);
    start << 0.0, 0.05, 0.1, 0.3, 0.32, 0.5, 0.7, 0.71, 0.9, 1.0;
    const auto chart = linear_chart();
    const auto flow = flow_on_front(config, chart, start);
    REQUIRE(flow.snapshots.size() == 21);
    double previous = chart_energy(spec, chart, flow.snapshots.front());
    for (const auto& snap : flow.snapshots) {
      CHECK((snap.array() >= 0.0).all());
      CHECK((snap.array() <= 1.0).all());
      const double e = chart_energy(spec, chart, snap);
      CHECK(e <= previous + 1e-12 * std::abs(previous));
      previous = e;
    }
    CHECK(chart_energy(spec, chart, flow.final_coords) < chart_energy(spec, chart, start));
  }
}

TEST_CASE("flow on a curved front lowers the Riesz energy and keeps the order") {
  const auto problem = make_problem("lame", 4, ProblemParams{.gamma = 0.25});
  const auto chart = front_chart(*problem);
  FrontFlowConfig<double> config;
  config.n_points = 20;
  config.dt = 1e-7;
  config.horizon = 2e-3;
  const VectorXd start = equispaced_coords<double>(20);
  const auto flow = flow_on_front(config, chart, start);
  const auto spec = PotentialSpec<double>::riesz(2);
  CHECK(chart_energy(spec, chart, flow.final_coords) < chart_energy(spec, chart, start));
  for (Index i = 1; i < 20; ++i) CHECK(flow.final_coords(i) > flow.final_coords(i - 1));
  // with gamma < 1 the equispaced coordinates bunch up in the image, so the
  // flow must move them off the uniform grid
  CHECK((flow.final_coords - start).cwiseAbs().maxCoeff() > 1e-4);
}

TEST_CASE("flow in the simplex") {
  const auto chart = linear_chart();
  FrontFlowConfig<double> config;
  config.n_points = 1;
  config.dt = 1e-4;
  config.horizon = 0.01;
  const PointSetXd one{{0.3, 0.7}};
  CHECK((flow_in_simplex(config, chart, one).final_weights - one).norm() == 0.0);

  config.n_points = 6;
  config.record_every = 10;
  PointSetXd start(6, 2);
  for (Index i = 0; i < 6; ++i) start.row(i) << 0.3 + 0.05 * i, 0.7 - 0.05 * i;
  const auto flow = flow_in_simplex(config, chart, start);
  const auto spec = PotentialSpec<double>::riesz(2);
  const auto images = [&](const PointSetXd& w) { return detail::chart_images(chart, VectorXd(w.col(0))); };
  CHECK(energy(spec, images(flow.final_weights)) < energy(spec, images(start)));
  for (const auto& w : flow.snapshots)
    for (Index i = 0; i < 6; ++i) CHECK(on_simplex(w.row(i).transpose()));
  CHECK_THROWS_AS(flow_in_simplex(config, chart, PointSetXd(PointSetXd::Constant(2, 3, 1.0 / 3))), InvalidInput);
}

TEST_CASE("generate_reference shape and validation") {
  FrontFlowConfig<double> config;
  config.n_points = 15;
  config.dt = 1e-5;
  config.horizon = 1e-3;
  const auto problem = make_problem("do2dk", 4, ProblemParams{.k = 2, .s = 1.0});
  const auto ref = generate_reference(*problem, config);
  CHECK(ref.size() == 15);
  CHECK(ref.dim() == 2);
  CHECK(all_finite(ref.points));

  config.dt = 0.0;
  CHECK_THROWS_AS(generate_reference(*problem, config), InvalidConfig);
  config.dt = 1e-5;
  CHECK_THROWS_AS(flow_on_front(config, linear_chart(), VectorXd{{-0.1}}), InvalidInput);
}
