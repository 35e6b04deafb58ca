#include "psiflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "psiflow/errors.hpp"
#include "psiflow/svg.hpp"

namespace psiflow {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail_parse(const std::string& path, const std::string& what) {
  throw ParseError(path.empty() ? what : path + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : allowed)
      if (key == k) ok = true;
    if (!ok) fail_parse(path.empty() ? key : path + "." + key, "unknown key");
  }
}

double require_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail_parse(path + "." + key, "missing required key");
  if (!obj[key].is_number()) fail_parse(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

double optional_number(const json& obj, const std::string& path, const char* key,
                       double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail_parse(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

std::string family_name(DensityFamily f) {
  switch (f) {
    case DensityFamily::critical_log: return "critical_log";
    case DensityFamily::gaussian: return "gaussian";
    case DensityFamily::anti_gaussian: return "anti_gaussian";
    case DensityFamily::quadratic_log: return "quadratic_log";
    case DensityFamily::flat: return "flat";
    case DensityFamily::tabulated: return "tabulated";
  }
  return "?";
}

RadialDensity density_from_json(const json& spec, const std::string& path) {
  if (!spec.is_object()) fail_parse(path, "density spec must be an object");
  if (!spec.contains("family")) fail_parse(path + ".family", "missing required key");
  if (!spec["family"].is_string()) fail_parse(path + ".family", "expected a string");
  std::string family = spec["family"].get<std::string>();

  int n = 1;
  if (spec.contains("n")) {
    if (!spec["n"].is_number_integer()) fail_parse(path + ".n", "expected an integer");
    n = spec["n"].get<int>();
    if (n < 1) throw ValidationError(path + ".n must be >= 1");
  }

  if (family == "critical_log") {
    reject_unknown_keys(spec, path, {"family", "n", "b"});
    return RadialDensity::critical_log(n, optional_number(spec, path, "b", 0.0));
  }
  if (family == "gaussian" || family == "anti_gaussian") {
    reject_unknown_keys(spec, path, {"family", "n", "mu"});
    double mu = require_number(spec, path, "mu");
    if (!(mu > 0.0)) throw ValidationError(path + ".mu must be positive");
    return family == "gaussian" ? RadialDensity::gaussian(mu, n)
                                : RadialDensity::anti_gaussian(mu, n);
  }
  if (family == "quadratic_log") {
    reject_unknown_keys(spec, path, {"family", "n", "lambda", "a", "b"});
    double lambda = require_number(spec, path, "lambda");
    double a = require_number(spec, path, "a");
    double b = optional_number(spec, path, "b", 0.0);
    return RadialDensity::quadratic_log(lambda, a, b, n);
  }
  if (family == "flat") {
    reject_unknown_keys(spec, path, {"family"});
    return RadialDensity::flat();
  }
  if (family == "tabulated") {
    reject_unknown_keys(spec, path, {"family", "n", "r", "psi", "singular_at_origin"});
    if (!spec.contains("r") || !spec.contains("psi"))
      fail_parse(path, "tabulated density needs r and psi arrays");
    std::vector<double> rs = spec["r"].get<std::vector<double>>();
    std::vector<double> ps = spec["psi"].get<std::vector<double>>();
    bool singular = spec.value("singular_at_origin", false);
    return RadialDensity::tabulated(std::move(rs), std::move(ps), singular);
  }
  fail_parse(path + ".family", "unknown density family '" + family + "'");
}

json density_to_json(const RadialDensity& d) {
  json j;
  j["family"] = family_name(d.family());
  switch (d.family()) {
    case DensityFamily::critical_log:
      j["n"] = d.n();
      j["b"] = d.b();
      break;
    case DensityFamily::gaussian:
    case DensityFamily::anti_gaussian:
      j["n"] = d.n();
      j["mu"] = d.mu();
      break;
    case DensityFamily::quadratic_log:
      j["n"] = d.n();
      j["lambda"] = d.lambda();
      j["a"] = d.a();
      j["b"] = d.b();
      break;
    case DensityFamily::flat:
      break;
    case DensityFamily::tabulated:
      j["n"] = d.n();
      j["r"] = d.grid_r();
      j["psi"] = d.grid_psi();
      j["singular_at_origin"] = d.singular_at_origin();
      break;
  }
  return j;
}

CurveSpec curve_from_json(const json& spec, const std::string& path,
                          std::vector<std::string>& violations) {
  if (!spec.is_object()) fail_parse(path, "curve spec must be an object");
  CurveSpec out;
  std::string shape = spec.value("shape", std::string("polar"));
  if (shape == "polar") {
    reject_unknown_keys(spec, path, {"shape", "rho0", "modes", "center", "n_vertices"});
    out.shape = CurveSpec::Shape::polar;
    out.rho0 = optional_number(spec, path, "rho0", 1.0);
    if (spec.contains("modes")) {
      if (!spec["modes"].is_array()) fail_parse(path + ".modes", "expected an array");
      for (const auto& m : spec["modes"]) {
        if (!m.is_array() || m.size() != 2)
          fail_parse(path + ".modes", "each mode is a [m, amplitude] pair");
        out.modes.emplace_back(m[0].get<int>(), m[1].get<double>());
      }
    }
    if (spec.contains("center")) {
      const auto& c = spec["center"];
      if (!c.is_array() || c.size() != 2)
        fail_parse(path + ".center", "expected [x, y]");
      out.center = {c[0].get<double>(), c[1].get<double>()};
    }
    out.n_vertices = static_cast<int>(optional_number(spec, path, "n_vertices", 256));
    if (out.n_vertices < 8) violations.push_back(path + ".n_vertices must be >= 8");
    double amp = 0.0;
    for (auto& [m, a] : out.modes) amp += std::abs(a);
    if (!(out.rho0 > amp))
      violations.push_back(path + ".rho0 must exceed the sum of |amplitudes|");
  } else if (shape == "polygon_file") {
    reject_unknown_keys(spec, path, {"shape", "path"});
    out.shape = CurveSpec::Shape::polygon_file;
    if (!spec.contains("path")) fail_parse(path + ".path", "missing required key");
    out.path = spec["path"].get<std::string>();
  } else {
    fail_parse(path + ".shape", "unknown curve shape '" + shape + "'");
  }
  return out;
}

json curve_to_json(const CurveSpec& c) {
  json j;
  if (c.shape == CurveSpec::Shape::polar) {
    j["shape"] = "polar";
    j["rho0"] = c.rho0;
    json modes = json::array();
    for (const auto& [m, a] : c.modes) modes.push_back(json::array({m, a}));
    j["modes"] = modes;
    j["center"] = json::array({c.center.x, c.center.y});
    j["n_vertices"] = c.n_vertices;
  } else {
    j["shape"] = "polygon_file";
    j["path"] = c.path;
  }
  return j;
}

}  // namespace

RadialDensity parse_density_spec(const std::string& text) {
  json spec = json::parse(text, nullptr, false);
  if (spec.is_discarded()) throw ParseError("density spec is not valid JSON");
  return density_from_json(spec, "density");
}

ExperimentConfig parse_config(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw ParseError("config is not valid JSON");
  if (!root.is_object()) throw ParseError("config must be a JSON object");

  reject_unknown_keys(root, "",
                      {"id", "density", "curve", "outputs", "cfl_factor", "t_max",
                       "max_steps", "epsilon_len", "epsilon_kpsi", "dwell",
                       "snapshot_every", "origin_guard", "resample_every",
                       "vertex_budget"});

  if (!root.contains("density")) throw ParseError("density: missing required key");
  if (!root.contains("curve")) throw ParseError("curve: missing required key");

  std::vector<std::string> violations;
  ExperimentConfig cfg;
  cfg.id = root.value("id", std::string("experiment"));
  cfg.density = density_from_json(root["density"], "density");
  cfg.curve = curve_from_json(root["curve"], "curve", violations);

  cfg.flow.cfl_factor = optional_number(root, "", "cfl_factor", 0.25);
  cfg.flow.t_max = optional_number(root, "", "t_max", 10.0);
  cfg.flow.max_steps = static_cast<long>(optional_number(root, "", "max_steps", 500000));
  cfg.flow.epsilon_len = optional_number(root, "", "epsilon_len", 1e-2);
  cfg.flow.epsilon_kpsi = optional_number(root, "", "epsilon_kpsi", 1e-3);
  cfg.flow.dwell = static_cast<int>(optional_number(root, "", "dwell", 50));
  cfg.flow.origin_guard = optional_number(root, "", "origin_guard", 0.0);
  cfg.flow.resample_every = static_cast<int>(optional_number(root, "", "resample_every", 1));
  cfg.flow.vertex_budget = static_cast<int>(optional_number(
      root, "", "vertex_budget",
      cfg.curve.shape == CurveSpec::Shape::polar ? cfg.curve.n_vertices : 256));
  cfg.snapshot_every = static_cast<int>(optional_number(root, "", "snapshot_every", 100));

  if (root.contains("outputs")) {
    const json& o = root["outputs"];
    reject_unknown_keys(o, "outputs", {"trace", "snapshots", "summary", "svg"});
    cfg.outputs.trace = o.value("trace", std::string());
    cfg.outputs.snapshots = o.value("snapshots", std::string());
    cfg.outputs.summary = o.value("summary", std::string());
    cfg.outputs.svg = o.value("svg", std::string());
  }

  if (!(cfg.flow.cfl_factor > 0.0)) violations.push_back("cfl_factor must be positive");
  if (cfg.flow.t_max < 0.0) violations.push_back("t_max must be >= 0");
  if (cfg.flow.max_steps <= 0) violations.push_back("max_steps must be positive");
  if (!(cfg.flow.epsilon_len > 0.0 && cfg.flow.epsilon_len < 1.0))
    violations.push_back("epsilon_len must lie in (0, 1)");
  if (!(cfg.flow.epsilon_kpsi > 0.0)) violations.push_back("epsilon_kpsi must be positive");
  if (cfg.flow.dwell <= 0) violations.push_back("dwell must be positive");
  if (cfg.flow.resample_every <= 0) violations.push_back("resample_every must be positive");
  if (cfg.flow.vertex_budget < 8) violations.push_back("vertex_budget must be >= 8");
  if (cfg.snapshot_every < 0) violations.push_back("snapshot_every must be >= 0");
  if (cfg.flow.origin_guard < 0.0) violations.push_back("origin_guard must be >= 0");

  if (!violations.empty()) {
    std::string msg = "invalid config:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ValidationError(msg);
  }
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  j["id"] = cfg.id;
  j["density"] = density_to_json(cfg.density);
  j["curve"] = curve_to_json(cfg.curve);
  j["cfl_factor"] = cfg.flow.cfl_factor;
  j["t_max"] = cfg.flow.t_max;
  j["max_steps"] = cfg.flow.max_steps;
  j["epsilon_len"] = cfg.flow.epsilon_len;
  j["epsilon_kpsi"] = cfg.flow.epsilon_kpsi;
  j["dwell"] = cfg.flow.dwell;
  j["origin_guard"] = cfg.flow.origin_guard;
  j["resample_every"] = cfg.flow.resample_every;
  j["vertex_budget"] = cfg.flow.vertex_budget;
  j["snapshot_every"] = cfg.snapshot_every;
  json o;
  o["trace"] = cfg.outputs.trace;
  o["snapshots"] = cfg.outputs.snapshots;
  o["summary"] = cfg.outputs.summary;
  o["svg"] = cfg.outputs.svg;
  j["outputs"] = o;
  return j.dump(2);
}

DiscreteCurve build_curve(const CurveSpec& spec) {
  if (spec.shape == CurveSpec::Shape::polar)
    return build_from_polar(spec.rho0, spec.modes, spec.center, spec.n_vertices);

  std::ifstream in(spec.path);
  if (!in) throw Error("cannot open polygon file: " + spec.path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw ParseError("polygon file must hold a JSON array of [x, y] pairs");
  DiscreteCurve c;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2)
      throw ParseError("polygon file must hold a JSON array of [x, y] pairs");
    c.vertices.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  validate_curve(c);
  return c;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
  os << "t,n_vertices,length,weighted_length,area,r_min,r_max,max_abs_kpsi,"
        "int_kpsi2_dspsi,dt\n";
  for (const auto& r : trace) {
    os << fmt17(r.t) << ',' << r.n_vertices << ',' << fmt17(r.length) << ','
       << fmt17(r.weighted_length) << ',' << fmt17(r.area) << ','
       << fmt17(r.r_min) << ',' << fmt17(r.r_max) << ','
       << fmt17(r.max_abs_kpsi) << ',' << fmt17(r.int_kpsi2_dspsi) << ','
       << fmt17(r.dt) << '\n';
  }
}

void append_snapshot_jsonl(std::ostream& os, double t, const DiscreteCurve& c) {
  os << "{\"t\": " << fmt17(t) << ", \"vertices\": [";
  for (int i = 0; i < c.size(); ++i) {
    if (i) os << ", ";
    os << '[' << fmt17(c.vertices[i].x) << ", " << fmt17(c.vertices[i].y) << ']';
  }
  os << "]}\n";
}

std::vector<std::pair<double, DiscreteCurve>> read_snapshots_jsonl(
    std::istream& is) {
  std::vector<std::pair<double, DiscreteCurve>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("snapshot line is not valid JSON");
    DiscreteCurve c;
    for (const auto& p : j["vertices"])
      c.vertices.push_back({p[0].get<double>(), p[1].get<double>()});
    out.emplace_back(j["t"].get<double>(), std::move(c));
  }
  return out;
}

namespace {

json prediction_to_json(const Prediction& p) {
  json j;
  j["case"] = to_string(p.label);
  j["outcome"] = to_string(p.outcome);
  j["exact_T"] = p.exact_time ? json(*p.exact_time) : json(nullptr);
  j["limit_radius"] = p.limit_radius ? json(*p.limit_radius) : json(nullptr);
  json as = json::array();
  for (const auto& a : p.assumptions) {
    json e;
    e["name"] = a.name;
    e["pass"] = a.pass;
    if (!a.detail.empty()) e["detail"] = a.detail;
    as.push_back(e);
  }
  j["assumptions"] = as;
  return j;
}

}  // namespace

std::string summary_json(const ExperimentResult& r) {
  json j;
  j["id"] = r.config.id;
  j["density"] = density_to_json(r.config.density);
  j["prediction"] = prediction_to_json(r.prediction);

  json o;
  o["verdict"] = to_string(r.outcome.verdict);
  o["t_final"] = r.outcome.trace.empty() ? 0.0 : r.outcome.trace.back().t;
  o["accepted_steps"] = r.outcome.trace.size() - 1;
  if (r.outcome.verdict == Verdict::CollapsedToPoint) {
    o["t_est"] = r.outcome.t_est;
    o["limit_point"] = json::array({r.outcome.limit_point.x, r.outcome.limit_point.y});
    o["isoperimetric_ratio"] = r.outcome.isoperimetric_ratio;
  }
  if (r.outcome.verdict == Verdict::ConvergedToMinimal) {
    o["sup_kpsi"] = r.outcome.sup_kpsi;
    o["final_radius"] = r.measured_final_radius ? json(*r.measured_final_radius)
                                                : json(nullptr);
  }
  if (!r.outcome.abort_reason.empty()) o["note"] = r.outcome.abort_reason;
  j["outcome"] = o;

  json deltas;
  deltas["t_est"] = r.t_est_delta ? json(*r.t_est_delta) : json(nullptr);
  deltas["limit_radius"] = r.radius_delta ? json(*r.radius_delta) : json(nullptr);
  j["measured_vs_predicted"] = deltas;
  return j.dump(2);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.config = cfg;

  DiscreteCurve c0 = build_curve(cfg.curve);
  const RadialDensity& d = cfg.density;

  double r_max0 = 0.0, r_min0 = 1e300;
  for (const auto& v : c0.vertices) {
    r_max0 = std::max(r_max0, norm(v));
    r_min0 = std::min(r_min0, norm(v));
  }
  double scan_lo = std::max(1e-6, std::min(0.01, 0.1 * r_min0));
  double scan_hi = std::max(10.0, 3.0 * r_max0);
  CrossingSet crossings = find_crossings(d, 1, scan_lo, scan_hi);

  CurveGeometry g0 = geometry(c0, d);
  result.prediction = classify_case(d, curve_stats(g0), crossings);

  std::ofstream snap_stream;
  if (!cfg.outputs.snapshots.empty()) {
    snap_stream.open(cfg.outputs.snapshots);
    if (!snap_stream) throw Error("cannot write " + cfg.outputs.snapshots);
  }
  std::vector<std::pair<double, DiscreteCurve>> kept;
  const bool keep_for_svg = !cfg.outputs.svg.empty();

  long counter = 0;
  StepCallback on_accept = [&](const FlowState& s, const TraceRecord&) {
    bool due = cfg.snapshot_every > 0 && (counter % cfg.snapshot_every == 0);
    if (due && snap_stream.is_open()) append_snapshot_jsonl(snap_stream, s.t, s.curve);
    if (due && keep_for_svg) kept.emplace_back(s.t, s.curve);
    ++counter;
  };

  result.outcome = run(c0, d, cfg.flow, on_accept);

  if (snap_stream.is_open())
    append_snapshot_jsonl(snap_stream, result.outcome.trace.back().t,
                          result.outcome.final_curve);
  if (keep_for_svg)
    kept.emplace_back(result.outcome.trace.back().t, result.outcome.final_curve);

  if (result.outcome.verdict == Verdict::ConvergedToMinimal) {
    double acc = 0.0;
    for (const auto& v : result.outcome.final_curve.vertices) acc += norm(v);
    result.measured_final_radius = acc / result.outcome.final_curve.size();
    if (result.prediction.limit_radius)
      result.radius_delta =
          *result.measured_final_radius - *result.prediction.limit_radius;
  }
  if (result.outcome.verdict == Verdict::CollapsedToPoint &&
      result.prediction.exact_time)
    result.t_est_delta = result.outcome.t_est - *result.prediction.exact_time;

  if (!cfg.outputs.trace.empty()) {
    std::ofstream os(cfg.outputs.trace);
    if (!os) throw Error("cannot write " + cfg.outputs.trace);
    write_trace_csv(os, result.outcome.trace);
  }
  if (!cfg.outputs.summary.empty()) {
    std::ofstream os(cfg.outputs.summary);
    if (!os) throw Error("cannot write " + cfg.outputs.summary);
    os << summary_json(result) << '\n';
  }
  if (!cfg.outputs.svg.empty()) {
    std::optional<double> circle;
    if (result.prediction.limit_radius) circle = *result.prediction.limit_radius;
    write_curve_overlay_svg(cfg.outputs.svg, kept, circle);
  }
  return result;
}

}  // namespace psiflow
