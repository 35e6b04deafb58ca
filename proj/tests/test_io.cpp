#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "psiflow/errors.hpp"
#include "psiflow/io.hpp"
#include "psiflow/svg.hpp"

using namespace psiflow;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("parse_config: minimal config gets defaults") {
  auto cfg = parse_config(R"({
    "density": {"family": "flat"},
    "curve": {"shape": "polar", "rho0": 1.0}
  })");
  CHECK(cfg.curve.n_vertices == 256);
  CHECK(cfg.flow.cfl_factor == doctest::Approx(0.25));
  CHECK(cfg.flow.vertex_budget == 256);
  CHECK(cfg.flow.epsilon_len == doctest::Approx(1e-2));
  CHECK(cfg.flow.dwell == 50);
  CHECK(cfg.id == "experiment");
}

TEST_CASE("parse_config: negative lambda is a legal density") {
  auto cfg = parse_config(R"({
    "density": {"family": "quadratic_log", "lambda": -1.0, "a": 0.5},
    "curve": {"shape": "polar", "rho0": 2.0}
  })");
  CHECK(cfg.density.lambda() == doctest::Approx(-1.0));
}

TEST_CASE("parse_config: unknown keys are named") {
  try {
    parse_config(R"({
      "density": {"family": "flat"},
      "curve": {"rho0": 1.0},
      "vicosity": 3
    })");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("vicosity") != std::string::npos);
  }

  try {
    parse_config(R"({
      "density": {"family": "gaussian", "mu": 1.0, "sgima": 2},
      "curve": {"rho0": 1.0}
    })");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("density.sgima") != std::string::npos);
  }
}

TEST_CASE("parse_config: all violations reported together") {
  try {
    parse_config(R"({
      "density": {"family": "flat"},
      "curve": {"rho0": 1.0, "n_vertices": 4},
      "cfl_factor": -1.0,
      "epsilon_len": 2.0
    })");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("n_vertices") != std::string::npos);
    CHECK(msg.find("cfl_factor") != std::string::npos);
    CHECK(msg.find("epsilon_len") != std::string::npos);
  }
}

TEST_CASE("config round trip") {
  std::string text = R"({
    "id": "roundtrip",
    "density": {"family": "quadratic_log", "lambda": 2.0, "a": -2.0, "b": 0.0},
    "curve": {"shape": "polar", "rho0": 1.3, "modes": [[2, 0.15]],
              "center": [0.5, -0.25], "n_vertices": 64},
    "t_max": 2.5,
    "outputs": {"trace": "x.csv"}
  })";
  auto cfg = parse_config(text);
  auto again = parse_config(serialize_config(cfg));
  CHECK(serialize_config(again) == serialize_config(cfg));
}

TEST_CASE("trace CSV is deterministic and ordered") {
  auto cfg = parse_config(R"({
    "density": {"family": "gaussian", "mu": 1.0},
    "curve": {"shape": "polar", "rho0": 0.6, "n_vertices": 64},
    "t_max": 0.02
  })");
  auto r1 = run_experiment(cfg);
  auto r2 = run_experiment(cfg);
  std::ostringstream s1, s2;
  write_trace_csv(s1, r1.outcome.trace);
  write_trace_csv(s2, r2.outcome.trace);
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().rfind("t,n_vertices,length,weighted_length,area,r_min,r_max,"
                       "max_abs_kpsi,int_kpsi2_dspsi,dt",
                       0) == 0);
  CHECK(summary_json(r1) == summary_json(r2));
}

TEST_CASE("snapshot JSONL round trip") {
  auto c = build_from_polar(1.0, {}, {0.2, 0.1}, 16);
  std::stringstream ss;
  append_snapshot_jsonl(ss, 0.25, c);
  append_snapshot_jsonl(ss, 0.5, c);
  auto snaps = read_snapshots_jsonl(ss);
  REQUIRE(snaps.size() == 2);
  CHECK(snaps[0].first == doctest::Approx(0.25));
  REQUIRE(snaps[0].second.size() == 16);
  for (int i = 0; i < 16; ++i) {
    CHECK(snaps[0].second.vertices[i].x == doctest::Approx(c.vertices[i].x));
    CHECK(snaps[0].second.vertices[i].y == doctest::Approx(c.vertices[i].y));
  }
}

TEST_CASE("run_experiment writes the configured outputs") {
  std::string trace = tmp_path("psiflow_test_trace.csv");
  std::string snaps = tmp_path("psiflow_test_snaps.jsonl");
  std::string summary = tmp_path("psiflow_test_summary.json");
  std::string svg = tmp_path("psiflow_test_plot.svg");
  std::ostringstream cfg_text;
  cfg_text << R"({
    "id": "outputs-smoke",
    "density": {"family": "critical_log"},
    "curve": {"shape": "polar", "rho0": 0.4, "center": [3.0, 0.0], "n_vertices": 64},
    "t_max": 1.0,
    "snapshot_every": 10,
    "outputs": {"trace": ")"
           << trace << R"(", "snapshots": ")" << snaps << R"(", "summary": ")"
           << summary << R"(", "svg": ")" << svg << R"("}
  })";
  auto result = run_experiment(parse_config(cfg_text.str()));
  CHECK(result.outcome.verdict == Verdict::CollapsedToPoint);
  // T = A/2pi for a circle of radius 0.4 away from the origin
  CHECK(result.prediction.exact_time.has_value());
  CHECK(*result.prediction.exact_time == doctest::Approx(0.08).epsilon(1e-3));

  CHECK(std::filesystem::file_size(trace) > 100);
  CHECK(std::filesystem::file_size(summary) > 100);
  {
    std::ifstream in(snaps);
    auto loaded = read_snapshots_jsonl(in);
    CHECK(loaded.size() >= 2);
  }
  {
    std::ifstream in(svg);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("<svg") != std::string::npos);
    CHECK(ss.str().find("polyline") != std::string::npos);
  }
  for (const auto& p : {trace, snaps, summary, svg}) std::remove(p.c_str());
}

TEST_CASE("t_max zero yields ReachedTMax at t=0 through the config path") {
  auto cfg = parse_config(R"({
    "density": {"family": "flat"},
    "curve": {"shape": "polar", "rho0": 1.0, "n_vertices": 32},
    "t_max": 0.0
  })");
  auto r = run_experiment(cfg);
  CHECK(r.outcome.verdict == Verdict::ReachedTMax);
  CHECK(r.outcome.trace.size() == 1);
}

TEST_CASE("density spec parser") {
  auto d = parse_density_spec(
      R"({"family": "quadratic_log", "lambda": 2.0, "a": -2.0, "b": 0.0})");
  CHECK(d.family() == DensityFamily::quadratic_log);
  CHECK(d.singular_at_origin());
  CHECK_THROWS_AS(parse_density_spec("not json"), ParseError);
  CHECK_THROWS_AS(parse_density_spec(R"({"family": "nope"})"), ParseError);
  CHECK_THROWS_AS(parse_density_spec(R"({"family": "gaussian", "mu": -1})"),
                  ValidationError);
}

TEST_CASE("phase portrait SVG carries the markers") {
  std::string path = tmp_path("psiflow_test_pp.svg");
  auto read_all = [&]() {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  auto gauss_pp = phase_portrait(RadialDensity::gaussian(1.0, 1), 1, 0.1, 3.0, 61);
  write_phase_portrait_svg(path, gauss_pp);
  std::string svg = read_all();
  CHECK(svg.find(">R<") != std::string::npos);   // repulsor marker at r=1
  CHECK(svg.find(">A<") == std::string::npos);

  auto anti_pp = phase_portrait(RadialDensity::anti_gaussian(1.0, 1), 1, 0.1, 3.0, 61);
  write_phase_portrait_svg(path, anti_pp);
  svg = read_all();
  CHECK(svg.find(">R<") == std::string::npos);
  CHECK(svg.find(">A<") == std::string::npos);

  auto crit_pp = phase_portrait(RadialDensity::critical_log(1), 1, 0.1, 3.0, 61);
  write_phase_portrait_svg(path, crit_pp);
  svg = read_all();
  CHECK(svg.find("degenerate") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("off-origin ellipse through the config path hits T = A/2pi") {
  // the acceptance ellipse delivered as a polygon file
  std::string poly = tmp_path("psiflow_test_ellipse.json");
  {
    std::ofstream os(poly);
    os << "[";
    for (int i = 0; i < 128; ++i) {
      double th = 2.0 * 3.14159265358979323846 * i / 128;
      if (i) os << ",";
      os << "[" << 3.0 + 0.5 * std::cos(th) << "," << 0.3 * std::sin(th) << "]";
    }
    os << "]";
  }
  std::ostringstream cfg_text;
  cfg_text << R"({
    "id": "ellipse-criterion",
    "density": {"family": "critical_log"},
    "curve": {"shape": "polygon_file", "path": ")" << poly << R"("},
    "vertex_budget": 128,
    "t_max": 1.0
  })";
  auto r = run_experiment(parse_config(cfg_text.str()));
  REQUIRE(r.prediction.exact_time.has_value());
  CHECK(*r.prediction.exact_time == doctest::Approx(0.075).epsilon(2e-4));
  CHECK(r.outcome.verdict == Verdict::CollapsedToPoint);
  CHECK(r.outcome.t_est == doctest::Approx(0.075).epsilon(0.02));
  std::remove(poly.c_str());
}

TEST_CASE("polygon file curves") {
  std::string path = tmp_path("psiflow_test_polygon.json");
  {
    std::ofstream os(path);
    os << "[";
    for (int i = 0; i < 32; ++i) {
      double th = 2.0 * 3.14159265358979323846 * i / 32;
      if (i) os << ",";
      os << "[" << 2.0 + std::cos(th) << "," << std::sin(th) << "]";
    }
    os << "]";
  }
  CurveSpec spec;
  spec.shape = CurveSpec::Shape::polygon_file;
  spec.path = path;
  auto c = build_curve(spec);
  CHECK(c.size() == 32);
  std::remove(path.c_str());
}
