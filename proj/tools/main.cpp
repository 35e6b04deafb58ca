// psiflow command line: simulate weighted curve-shortening experiments,
// render phase portraits, classify initial data, run the verification
// matrix, plot snapshot files.
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "psiflow/analysis.hpp"
#include "psiflow/circle_ode.hpp"
#include "psiflow/errors.hpp"
#include "psiflow/io.hpp"
#include "psiflow/svg.hpp"
#include "psiflow/verify.hpp"

namespace {

using namespace psiflow;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// density argument: inline JSON, or a path to a JSON file
std::string density_text(const std::string& arg) {
  if (!arg.empty() && arg.front() != '{' && std::filesystem::exists(arg))
    return slurp(arg);
  return arg;
}

std::string one_line_result(const ExperimentResult& r) {
  std::ostringstream os;
  os << r.config.id << ": " << to_string(r.outcome.verdict);
  if (r.outcome.verdict == Verdict::CollapsedToPoint) {
    os << " t_est=" << r.outcome.t_est;
    if (r.prediction.exact_time) os << " predicted_T=" << *r.prediction.exact_time;
    if (r.t_est_delta) os << " delta=" << *r.t_est_delta;
  } else if (r.outcome.verdict == Verdict::ConvergedToMinimal) {
    if (r.measured_final_radius) os << " radius=" << *r.measured_final_radius;
    if (r.prediction.limit_radius)
      os << " predicted_radius=" << *r.prediction.limit_radius;
    if (r.radius_delta) os << " delta=" << *r.radius_delta;
  }
  os << " [case " << to_string(r.prediction.label) << "]";
  return os.str();
}

int cmd_simulate(const std::string& config_path) {
  std::string text = slurp(config_path);
  nlohmann::json root = nlohmann::json::parse(text, nullptr, false);
  if (root.is_discarded()) throw ParseError("config is not valid JSON");

  if (root.is_array()) {  // batch: run concurrently, report in config order
    std::vector<ExperimentConfig> cfgs;
    for (const auto& item : root) cfgs.push_back(parse_config(item.dump()));
    std::vector<std::future<ExperimentResult>> futures;
    for (const auto& cfg : cfgs)
      futures.push_back(std::async(std::launch::async,
                                   [cfg]() { return run_experiment(cfg); }));
    bool ok = true;
    for (auto& f : futures) {
      try {
        std::cout << one_line_result(f.get()) << "\n";
      } catch (const std::exception& e) {
        std::cout << "failed: " << e.what() << "\n";
        ok = false;
      }
    }
    return ok ? 0 : 1;
  }

  ExperimentResult r = run_experiment(parse_config(text));
  std::cout << one_line_result(r) << "\n";
  return 0;
}

int cmd_phase_portrait(const std::string& density_arg, const std::string& interval,
                       int samples, const std::string& out_svg,
                       const std::string& out_csv) {
  auto d = parse_density_spec(density_text(density_arg));
  double lo = 0.0, hi = 0.0;
  if (std::sscanf(interval.c_str(), "%lf,%lf", &lo, &hi) != 2)
    throw ParseError("interval must be 'a,b'");
  auto pp = phase_portrait(d, 1, lo, hi, samples);
  if (!out_svg.empty()) write_phase_portrait_svg(out_svg, pp);
  if (!out_csv.empty()) write_phase_portrait_csv(out_csv, pp);
  std::cout << pp.crossings.zeros.size() << " psi-minimal radii";
  if (pp.crossings.degenerate) std::cout << " (degenerate: every circle minimal)";
  std::cout << "\n";
  for (const auto& z : pp.crossings.zeros) {
    auto cls = classify_circle(d, 1, z.r);
    std::cout << "  r=" << z.r << "  " << to_string(cls.verdict)
              << (z.transversal ? "" : " (tangential)") << "\n";
  }
  return 0;
}

int cmd_classify(const std::string& config_path) {
  ExperimentConfig cfg = parse_config(slurp(config_path));
  DiscreteCurve c0 = build_curve(cfg.curve);
  CurveGeometry g = geometry(c0, cfg.density);

  double r_max0 = g.r_max;
  double scan_lo = std::max(1e-6, std::min(0.01, 0.1 * g.r_min));
  auto crossings = find_crossings(cfg.density, 1, scan_lo, std::max(10.0, 3.0 * r_max0));
  Prediction p = classify_case(cfg.density, curve_stats(g), crossings);

  nlohmann::json j;
  j["case"] = to_string(p.label);
  j["outcome"] = to_string(p.outcome);
  j["exact_T"] = p.exact_time ? nlohmann::json(*p.exact_time) : nlohmann::json(nullptr);
  j["limit_radius"] =
      p.limit_radius ? nlohmann::json(*p.limit_radius) : nlohmann::json(nullptr);
  nlohmann::json as = nlohmann::json::array();
  for (const auto& a : p.assumptions) {
    nlohmann::json e;
    e["name"] = a.name;
    e["pass"] = a.pass;
    if (!a.detail.empty()) e["detail"] = a.detail;
    as.push_back(e);
  }
  j["assumptions"] = as;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& suite) {
  auto rows = run_verify_suite(suite, std::cerr);
  print_verify_table(std::cout, rows);
  return all_pass(rows) ? 0 : 1;
}

int cmd_plot(const std::string& snapshots_path, const std::string& out,
             double limit_circle) {
  std::ifstream in(snapshots_path);
  if (!in) throw Error("cannot open " + snapshots_path);
  auto snaps = read_snapshots_jsonl(in);
  if (snaps.empty()) throw Error("no snapshots in " + snapshots_path);
  std::optional<double> circle;
  if (limit_circle > 0.0) circle = limit_circle;
  write_curve_overlay_svg(out, snaps, circle);
  std::cout << "wrote " << out << " (" << snaps.size() << " snapshots)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curve shortening flow with radial densities"};
  app.require_subcommand(1);

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "run one experiment (or a batch array)");
  simulate->add_option("config", config_path, "experiment config JSON")->required();

  std::string density_arg, interval = "0.1,5", pp_svg, pp_csv;
  int samples = 257;
  auto* portrait = app.add_subcommand("phase-portrait",
                                      "drift profile of origin-centered circles");
  portrait->add_option("--density", density_arg, "density spec JSON (inline or file)")
      ->required();
  portrait->add_option("--interval", interval, "radius interval a,b");
  portrait->add_option("--samples", samples, "number of samples");
  portrait->add_option("--out", pp_svg, "output SVG path");
  portrait->add_option("--csv", pp_csv, "optional CSV path (r, drift, class)");

  std::string classify_path;
  auto* classify = app.add_subcommand("classify", "print the predicted case as JSON");
  classify->add_option("config", classify_path, "experiment config JSON")->required();

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run an acceptance suite");
  verify->add_option("suite", suite,
                     "collapse-times | limit-circles | invariants | refinement | all");

  std::string snaps_path, plot_out;
  double limit_circle = 0.0;
  auto* plot = app.add_subcommand("plot", "overlay snapshots from a JSONL file");
  plot->add_option("snapshots", snaps_path, "snapshot JSONL path")->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();
  plot->add_option("--limit-circle", limit_circle, "dashed circle radius");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(config_path);
    if (*portrait) return cmd_phase_portrait(density_arg, interval, samples, pp_svg, pp_csv);
    if (*classify) return cmd_classify(classify_path);
    if (*verify) return cmd_verify(suite);
    if (*plot) return cmd_plot(snaps_path, plot_out, limit_circle);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
