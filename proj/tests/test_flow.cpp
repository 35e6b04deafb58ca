#include <cmath>

#include "doctest.h"
#include "psiflow/circle_ode.hpp"
#include "psiflow/errors.hpp"
#include "psiflow/flow.hpp"

using namespace psiflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

DiscreteCurve ellipse(double a, double b, Vec2 center, int n) {
  DiscreteCurve c;
  for (int i = 0; i < n; ++i) {
    double th = 2.0 * kPi * i / n;
    c.vertices.push_back(center + Vec2{a * std::cos(th), b * std::sin(th)});
  }
  return c;
}

double mean_radius(const DiscreteCurve& c) {
  double acc = 0.0;
  for (const auto& v : c.vertices) acc += norm(v);
  return acc / c.size();
}

}  // namespace

TEST_CASE("step: critical circle is stationary") {
  auto crit = RadialDensity::critical_log(1);
  FlowConfig cfg;
  cfg.vertex_budget = 512;
  auto c0 = build_from_polar(1.0, {}, {0.0, 0.0}, 512);
  auto s0 = make_initial_state(c0, crit, cfg);
  auto s1 = step(s0, crit, cfg);
  for (int i = 0; i < 512; ++i)
    CHECK(norm(s1.curve.vertices[i] - s0.curve.vertices[i]) < 1e-9);
}

TEST_CASE("step: flat density reproduces the circle shrinking law") {
  auto flat = RadialDensity::flat();
  FlowConfig cfg;
  auto c0 = build_from_polar(1.0, {}, {0.0, 0.0}, 256);
  auto s0 = make_initial_state(c0, flat, cfg);
  auto s1 = step(s0, flat, cfg);
  double dr = mean_radius(s1.curve) - mean_radius(s0.curve);
  // dr/dt = -1/r at r=1
  CHECK(dr == doctest::Approx(-s1.dt_last).epsilon(1e-4));
}

TEST_CASE("step: gaussian circle inside the repulsor shrinks") {
  auto gauss = RadialDensity::gaussian(1.0, 1);
  FlowConfig cfg;
  auto c0 = build_from_polar(0.5, {}, {0.0, 0.0}, 256);
  auto s0 = make_initial_state(c0, gauss, cfg);
  auto s1 = step(s0, gauss, cfg);
  double dr = mean_radius(s1.curve) - mean_radius(s0.curve);
  CHECK(dr < 0.0);
  // drift -(1/r) + r = -1.5 at r = 0.5
  CHECK(dr == doctest::Approx(-1.5 * s1.dt_last).epsilon(1e-3));
}

TEST_CASE("run rejects non-simple initial curves") {
  DiscreteCurve eight;
  for (int i = 0; i < 64; ++i) {
    double th = 2.0 * kPi * i / 64;
    eight.vertices.push_back({std::sin(2.0 * th), std::sin(th) + 2.0});
  }
  auto flat = RadialDensity::flat();
  FlowConfig cfg;
  CHECK_THROWS_AS(run(eight, flat, cfg), Error);
}

TEST_CASE("extrapolate_collapse_time closed forms") {
  std::vector<TraceRecord> trace(1);
  trace[0] = {};
  trace[0].t = 0.07;
  trace[0].area = 0.01 * kPi;

  auto crit = RadialDensity::critical_log(1);
  CHECK(extrapolate_collapse_time(trace, crit, 0) ==
        doctest::Approx(0.075).epsilon(1e-12));

  auto flat = RadialDensity::flat();
  trace[0].t = 0.3;
  trace[0].area = 0.5;
  CHECK(extrapolate_collapse_time(trace, flat, 0) ==
        doctest::Approx(0.3 + 0.5 / (2.0 * kPi)).epsilon(1e-12));

  auto q = RadialDensity::quadratic_log(1.0, -2.0);
  trace[0].t = 0.1;
  trace[0].area = 0.4;
  CHECK(extrapolate_collapse_time(trace, q, 0) ==
        doctest::Approx(0.1 + std::log(1.0 + 0.4 / (2.0 * kPi))).epsilon(1e-12));

  // critical density with the origin enclosed conserves area: no collapse
  trace[0].area = 1.0;
  CHECK_THROWS_AS(extrapolate_collapse_time(trace, crit, 1), NoCollapseDetected);
}

TEST_CASE("area_law_residual") {
  auto flat = RadialDensity::flat();
  FlowConfig cfg;
  auto blob = build_from_polar(1.0, {{3, 0.15}, {2, 0.1}}, {2.5, 1.0}, 256);
  auto s = make_initial_state(blob, flat, cfg);
  // Gauss-Bonnet: -int k ds = -2pi for any simple curve
  CHECK(area_law_residual(s, flat) < 1e-3);

  auto crit = RadialDensity::critical_log(1);
  auto star = build_from_polar(1.0, {{3, 0.2}}, {0.0, 0.0}, 256);
  auto sc = make_initial_state(star, crit, cfg);
  CHECK(area_law_residual(sc, crit) < 1e-2);

  auto anti = RadialDensity::anti_gaussian(1.0, 1);
  auto circle = build_from_polar(1.0, {}, {0.0, 0.0}, 256);
  auto sa = make_initial_state(circle, anti, cfg);
  CHECK(sa.geom.int_kpsi_ds == doctest::Approx(4.0 * kPi).epsilon(1e-3));
  CHECK(area_law_residual(sa, anti) < 1e-3);

  // cross-check the closed form against the generic domain quadrature:
  // a tabulated copy of the same density takes the fan-integral path
  std::vector<double> rs, ps;
  for (int i = 0; i <= 400; ++i) {
    double r = 0.01 + (4.0 - 0.01) * i / 400.0;
    rs.push_back(r);
    ps.push_back(anti.eval(r).psi);
  }
  auto tab = RadialDensity::tabulated(rs, ps, false);
  auto st = make_initial_state(circle, tab, cfg);
  CHECK(area_law_residual(st, tab) < 1e-3);
}

TEST_CASE("flow on an origin-centered circle tracks the radial ODE") {
  auto gauss = RadialDensity::gaussian(1.0, 1);
  const double t_target = 0.1;
  for (int n : {64, 128, 256}) {
    FlowConfig cfg;
    cfg.vertex_budget = n;
    cfg.t_max = t_target;
    auto outcome = run(build_from_polar(0.5, {}, {0.0, 0.0}, n), gauss, cfg);
    REQUIRE(outcome.verdict == Verdict::ReachedTMax);
    double ode_r = exact_radius(gauss, 1, 0.5, t_target);
    double flow_r = mean_radius(outcome.final_curve);
    CHECK(std::abs(flow_r - ode_r) < 10.0 / (n * n));
  }
}

TEST_CASE("weighted length is monotone along accepted steps") {
  auto gauss = RadialDensity::gaussian(1.0, 1);
  FlowConfig cfg;
  cfg.vertex_budget = 128;
  cfg.t_max = 0.05;
  auto outcome = run(build_from_polar(0.6, {{2, 0.1}}, {0.0, 0.0}, 128), gauss, cfg);
  for (std::size_t i = 1; i < outcome.trace.size(); ++i)
    CHECK(outcome.trace[i].weighted_length <=
          outcome.trace[i - 1].weighted_length * (1.0 + 1e-9));
}

TEST_CASE("maximum principle: r_max stays below its initial value") {
  // gaussian repulsor at r=1; a curve with r_max < 1 cannot cross it
  auto gauss = RadialDensity::gaussian(1.0, 1);
  FlowConfig cfg;
  cfg.vertex_budget = 128;
  cfg.t_max = 0.08;
  auto c0 = build_from_polar(0.6, {{3, 0.12}}, {0.1, 0.0}, 128);
  auto s = make_initial_state(c0, gauss, cfg);
  double r_max0 = s.geom.r_max;
  double h = s.geom.length / s.curve.size();
  auto outcome = run(c0, gauss, cfg);
  for (const auto& rec : outcome.trace) CHECK(rec.r_max <= r_max0 + 10.0 * h);
}

TEST_CASE("run: quick critical collapse sanity (coarse)") {
  auto crit = RadialDensity::critical_log(1);
  FlowConfig cfg;
  cfg.vertex_budget = 96;
  cfg.t_max = 1.0;
  auto outcome = run(ellipse(0.5, 0.3, {3.0, 0.0}, 96), crit, cfg);
  REQUIRE(outcome.verdict == Verdict::CollapsedToPoint);
  CHECK(std::abs(outcome.t_est - 0.075) / 0.075 < 0.05);
  // the ellipse collapses in place; its centroid stays near (3, 0)
  CHECK(norm(outcome.limit_point - Vec2{3.0, 0.0}) < 0.2);
}

TEST_CASE("run: attractor convergence with monotone tail of the flow energy") {
  auto q = RadialDensity::quadratic_log(2.0, -2.0);
  FlowConfig cfg;
  cfg.vertex_budget = 64;
  cfg.t_max = 20.0;
  auto outcome = run(build_from_polar(1.15, {{2, 0.1}}, {0.0, 0.0}, 64), q, cfg);
  REQUIRE(outcome.verdict == Verdict::ConvergedToMinimal);
  CHECK(outcome.sup_kpsi < cfg.epsilon_kpsi);
  CHECK(hausdorff_distance(outcome.final_curve,
                           build_from_polar(1.0, {}, {0.0, 0.0}, 512)) < 0.02);
  // integral of kpsi^2 ds_psi decays monotonically over the trace tail
  const auto& tr = outcome.trace;
  std::size_t start = tr.size() / 2;
  double final_energy = tr.back().int_kpsi2_dspsi;
  CHECK(final_energy < 1e-5);
  for (std::size_t i = start + 1; i < tr.size(); ++i)
    CHECK(tr[i].int_kpsi2_dspsi <= tr[i - 1].int_kpsi2_dspsi * (1.0 + 1e-9) + 1e-15);
}

TEST_CASE("run: t_max zero returns immediately") {
  auto flat = RadialDensity::flat();
  FlowConfig cfg;
  cfg.t_max = 0.0;
  auto outcome = run(build_from_polar(1.0, {}, {0.0, 0.0}, 64), flat, cfg);
  CHECK(outcome.verdict == Verdict::ReachedTMax);
  CHECK(outcome.trace.size() == 1);
  CHECK(outcome.trace[0].t == 0.0);
}
