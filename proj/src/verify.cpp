#include "psiflow/verify.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#include "psiflow/analysis.hpp"
#include "psiflow/circle_ode.hpp"
#include "psiflow/curve.hpp"
#include "psiflow/density.hpp"
#include "psiflow/errors.hpp"
#include "psiflow/flow.hpp"

namespace psiflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

unsigned suite_seed() {
  if (const char* s = std::getenv("PSIFLOW_SEED")) return std::strtoul(s, nullptr, 10);
  return 20240915u;
}

DiscreteCurve ellipse(double a, double b, Vec2 center, int n) {
  DiscreteCurve c;
  for (int i = 0; i < n; ++i) {
    double th = 2.0 * kPi * i / n;
    c.vertices.push_back(center + Vec2{a * std::cos(th), b * std::sin(th)});
  }
  return c;
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

struct RunData {
  FlowOutcome outcome;
  std::vector<std::pair<double, DiscreteCurve>> snaps;  // every 10th step
};

RunData flow_run(const DiscreteCurve& c0, const RadialDensity& d,
                 const FlowConfig& cfg, int snap_every = 10) {
  RunData data;
  long counter = 0;
  StepCallback cb = [&](const FlowState& s, const TraceRecord&) {
    if (snap_every > 0 && counter % snap_every == 0)
      data.snaps.emplace_back(s.t, s.curve);
    ++counter;
  };
  data.outcome = run(c0, d, cfg, cb);
  return data;
}

// Advance a single flow through a list of checkpoint times, capturing the
// curve at each checkpoint (used by the rescaling-equivalence criterion).
std::vector<DiscreteCurve> flow_checkpoints(const DiscreteCurve& c0,
                                            const RadialDensity& d,
                                            FlowConfig cfg,
                                            const std::vector<double>& times) {
  std::vector<DiscreteCurve> out;
  cfg.t_max = times.back();
  FlowState s = make_initial_state(c0, d, cfg);
  for (double target : times) {
    FlowConfig local = cfg;
    local.t_max = target;
    while (s.t < target - 1e-14) s = step(s, d, local);
    out.push_back(s.curve);
  }
  return out;
}

double residual_at(const DiscreteCurve& c, const RadialDensity& d) {
  FlowState s;
  s.curve = c;
  s.geom = geometry(c, d);
  return area_law_residual(s, d);
}

// Shared experiment definitions (the refinement criterion reruns them at
// doubled resolution and halved CFL).
struct Experiment {
  std::string name;
  RadialDensity density;
  std::function<DiscreteCurve(int)> curve_at;  // vertex count -> initial curve
  double expected_T;       // exact collapse time (collapse experiments)
  double tolerance_rel;    // acceptance tolerance on t_est
  double t_max;
};

Experiment exp_critical_ellipse() {
  return {"critical ellipse", RadialDensity::critical_log(1),
          [](int n) { return ellipse(0.5, 0.3, {3.0, 0.0}, n); },
          0.15 * kPi / (2.0 * kPi), 0.02, 1.0};
}

Experiment exp_gaussian_circle() {
  return {"gaussian circle", RadialDensity::gaussian(1.0, 1),
          [](int n) { return build_from_polar(0.5, {}, {0.0, 0.0}, n); },
          0.5 * std::log(4.0 / 3.0), 0.01, 1.0};
}

Experiment exp_antigaussian_ellipse() {
  return {"anti-gaussian ellipse", RadialDensity::anti_gaussian(1.0, 1),
          [](int n) { return ellipse(1.0, 0.6, {0.0, 0.0}, n); },
          0.5 * std::log(1.6), 0.02, 1.0};
}

Experiment exp_quadlog_ellipse() {
  return {"quadratic-log ellipse", RadialDensity::quadratic_log(1.0, -2.0),
          [](int n) { return ellipse(2.0, 1.0, {5.0, 0.0}, n); },
          std::log(2.0), 0.02, 3.0};
}

struct Context {
  std::optional<RunData> runs[7];  // 1..6 by experiment index
  std::ostream& progress;

  explicit Context(std::ostream& os) : progress(os) {}

  const RunData& collapse_run(int idx) {
    if (runs[idx]) return *runs[idx];
    Experiment e = experiment_for(idx);
    FlowConfig cfg;
    cfg.vertex_budget = 256;
    cfg.t_max = e.t_max;
    progress << "  [run] " << e.name << " (N=256)..." << std::endl;
    runs[idx] = flow_run(e.curve_at(256), e.density, cfg);
    return *runs[idx];
  }

  const RunData& convergence_run(int idx) {
    if (runs[idx]) return *runs[idx];
    FlowConfig cfg;
    cfg.vertex_budget = 256;
    if (idx == 2) {
      cfg.t_max = 5.0;
      progress << "  [run] critical star (N=256)..." << std::endl;
      runs[idx] = flow_run(build_from_polar(1.0, {{3, 0.2}}, {0.0, 0.0}, 256),
                           RadialDensity::critical_log(1), cfg);
    } else {  // idx == 6
      cfg.t_max = 10.0;
      progress << "  [run] quadratic-log attractor star (N=256)..." << std::endl;
      runs[idx] = flow_run(build_from_polar(1.3, {{2, 0.15}}, {0.0, 0.0}, 256),
                           RadialDensity::quadratic_log(2.0, -2.0), cfg);
    }
    return *runs[idx];
  }

  static Experiment experiment_for(int idx) {
    switch (idx) {
      case 1: return exp_critical_ellipse();
      case 3: return exp_gaussian_circle();
      case 4: return exp_antigaussian_ellipse();
      case 5: return exp_quadlog_ellipse();
    }
    throw Error("no experiment for index " + std::to_string(idx));
  }
};

VerifyRow check_collapse(Context& ctx, int row_id, int idx, const char* name) {
  Experiment e = Context::experiment_for(idx);
  const RunData& data = ctx.collapse_run(idx);
  std::ostringstream detail;
  bool pass = data.outcome.verdict == Verdict::CollapsedToPoint;
  if (!pass) {
    detail << "verdict=" << to_string(data.outcome.verdict);
    return {row_id, name, false, detail.str()};
  }
  double rel = std::abs(data.outcome.t_est - e.expected_T) / e.expected_T;
  pass = rel < e.tolerance_rel;
  detail << "t_est=" << fmt(data.outcome.t_est) << " expected=" << fmt(e.expected_T)
         << " rel_err=" << fmt(rel, 3) << " tol=" << fmt(e.tolerance_rel, 2);
  return {row_id, name, pass, detail.str()};
}

VerifyRow check_1(Context& ctx) {
  return check_collapse(ctx, 1, 1, "critical-density collapse time T=A/2pi");
}

VerifyRow check_2(Context& ctx) {
  const RunData& data = ctx.convergence_run(2);
  const auto& tr = data.outcome.trace;
  std::ostringstream detail;

  bool pass = data.outcome.verdict == Verdict::ConvergedToMinimal;
  double a0 = tr.front().area;
  double drift = 0.0;
  for (const auto& rec : tr) drift = std::max(drift, std::abs(rec.area - a0) / a0);
  pass = pass && drift < 0.005;

  double r_pred = std::sqrt(a0 / kPi);
  double hd = hausdorff_distance(data.outcome.final_curve,
                                 build_from_polar(r_pred, {}, {0.0, 0.0}, 1024));
  pass = pass && hd < 0.01 * r_pred;

  double energy = tr.back().int_kpsi2_dspsi;
  pass = pass && energy < 1e-5;

  detail << "verdict=" << to_string(data.outcome.verdict)
         << " area_drift=" << fmt(drift, 3) << " hausdorff=" << fmt(hd, 3)
         << " (limit r=" << fmt(r_pred) << ") energy=" << fmt(energy, 3);
  return {2, "critical-density conservation and limit circle", pass, detail.str()};
}

VerifyRow check_3(Context& ctx) {
  std::ostringstream detail;
  auto gauss = RadialDensity::gaussian(1.0, 1);
  double expected = 0.5 * std::log(4.0 / 3.0);

  auto ode = integrate_radius(0.5, gauss, 1, 1.0);
  bool pass = ode.extinct && std::abs(ode.extinction_time - expected) < 1e-6;
  detail << "ode_T=" << fmt(ode.extinction_time, 9) << " (|err|="
         << fmt(std::abs(ode.extinction_time - expected), 3) << ")";

  const RunData& data = ctx.collapse_run(3);
  bool flow_ok = data.outcome.verdict == Verdict::CollapsedToPoint &&
                 std::abs(data.outcome.t_est - expected) / expected < 0.01;
  pass = pass && flow_ok;
  detail << " flow_t_est=" << fmt(data.outcome.t_est)
         << " expected=" << fmt(expected);
  return {3, "gaussian circle extinction (ODE 1e-6, flow 1%)", pass, detail.str()};
}

VerifyRow check_4(Context& ctx) {
  const RunData& data = ctx.collapse_run(4);
  Experiment e = Context::experiment_for(4);
  const auto& tr = data.outcome.trace;
  std::ostringstream detail;

  bool pass = data.outcome.verdict == Verdict::CollapsedToPoint;
  double rel = pass ? std::abs(data.outcome.t_est - e.expected_T) / e.expected_T : 1.0;
  pass = pass && rel < 0.02;

  auto ratio = [&](const TraceRecord& r) {
    return r.length * r.length / (4.0 * kPi * r.area);
  };
  bool monotone = true;
  std::size_t start = tr.size() - tr.size() / 4;
  for (std::size_t i = start + 1; i < tr.size(); ++i)
    if (ratio(tr[i]) > ratio(tr[i - 1]) * (1.0 + 1e-9)) monotone = false;
  double final_ratio = ratio(tr.back());
  pass = pass && monotone && final_ratio < 1.01;

  detail << "t_est=" << fmt(data.outcome.t_est) << " expected=" << fmt(e.expected_T)
         << " rel_err=" << fmt(rel, 3) << " iso_final=" << fmt(final_ratio, 6)
         << (monotone ? " monotone" : " NOT-monotone");
  return {4, "anti-gaussian round point", pass, detail.str()};
}

VerifyRow check_5(Context& ctx) {
  return check_collapse(ctx, 5, 5, "quadratic-log collapse time T=ln2");
}

VerifyRow check_6(Context& ctx) {
  std::ostringstream detail;
  auto q = RadialDensity::quadratic_log(2.0, -2.0);
  bool pass = true;
  for (double r0 : {0.7, 1.5}) {
    auto res = integrate_radius(r0, q, 1, 10.0);
    double err = std::abs(res.path.back().r - 1.0);
    pass = pass && !res.extinct && err < 1e-4;
    detail << "ode(r0=" << fmt(r0, 2) << ") |r(10)-1|=" << fmt(err, 2) << "  ";
  }

  const RunData& data = ctx.convergence_run(6);
  bool conv = data.outcome.verdict == Verdict::ConvergedToMinimal;
  double hd = conv ? hausdorff_distance(data.outcome.final_curve,
                                        build_from_polar(1.0, {}, {0.0, 0.0}, 1024))
                   : 1e300;
  pass = pass && conv && hd < 0.01;
  detail << "flow verdict=" << to_string(data.outcome.verdict)
         << " hausdorff_to_r1=" << fmt(hd, 3);
  return {6, "attractor capture (ODE and full flow)", pass, detail.str()};
}

VerifyRow check_7(Context& ctx) {
  bool pass = true;
  double worst = 0.0;
  for (int idx : {1, 3, 4, 5, 2, 6}) {
    const RunData& data = (idx == 2 || idx == 6) ? ctx.convergence_run(idx)
                                                 : ctx.collapse_run(idx);
    const auto& tr = data.outcome.trace;
    for (std::size_t i = 1; i < tr.size(); ++i) {
      double rel = tr[i].weighted_length / tr[i - 1].weighted_length - 1.0;
      worst = std::max(worst, rel);
      if (rel > 1e-9) pass = false;
    }
  }
  std::ostringstream detail;
  detail << "max relative increase per step = " << fmt(worst, 3);
  return {7, "weighted-length monotonicity across all runs", pass, detail.str()};
}

VerifyRow check_8(Context& ctx) {
  bool pass = true;
  double worst = 0.0;
  std::string worst_run;
  struct Item { int idx; const char* name; RadialDensity d; };
  std::vector<Item> items = {
      {1, "run1", RadialDensity::critical_log(1)},
      {2, "run2", RadialDensity::critical_log(1)},
      {4, "run4", RadialDensity::anti_gaussian(1.0, 1)},
      {5, "run5", RadialDensity::quadratic_log(1.0, -2.0)},
  };
  for (const auto& item : items) {
    const RunData& data = (item.idx == 2) ? ctx.convergence_run(2)
                                          : ctx.collapse_run(item.idx);
    for (const auto& [t, curve] : data.snaps) {
      double res = residual_at(curve, item.d);
      if (res > worst) {
        worst = res;
        worst_run = item.name;
      }
      if (res >= 0.01) pass = false;
    }
  }
  std::ostringstream detail;
  detail << "max residual = " << fmt(worst, 3) << " of 2pi (" << worst_run
         << "), threshold 0.01";
  return {8, "area-law residual at every 10th record", pass, detail.str()};
}

VerifyRow check_9(Context&) {
  std::mt19937 rng(suite_seed());
  std::uniform_real_distribution<double> lam_mag(0.2, 4.0);
  std::uniform_real_distribution<double> a_dist(-4.0, 4.0);
  std::bernoulli_distribution coin(0.5);

  int agree = 0, total = 0;
  while (total < 100) {
    double lambda = lam_mag(rng) * (coin(rng) ? 1.0 : -1.0);
    double a = a_dist(rng);
    if (!((a + 1.0) / lambda < 0.0)) continue;
    auto d = RadialDensity::quadratic_log(lambda, a);
    double r_star = std::sqrt(-2.0 * (a + 1.0) / lambda);
    bool stable = stability_second_variation(d, 1, r_star);
    bool attractor =
        classify_circle(d, 1, r_star).verdict == CircleVerdict::psi_minimal_attractor;
    if (stable == attractor) ++agree;
    ++total;
  }
  std::ostringstream detail;
  detail << agree << "/100 agreements";
  return {9, "stability criterion equals ODE-linearization verdict", agree == 100,
          detail.str()};
}

VerifyRow check_10(Context& ctx) {
  ctx.progress << "  [run] rescaling equivalence (gaussian vs flat)..." << std::endl;
  auto gauss = RadialDensity::gaussian(1.0, 1);
  auto flat = RadialDensity::flat();
  auto star = build_from_polar(1.0, {{5, 0.15}}, {0.0, 0.0}, 256);

  std::vector<double> t_hats = {0.05, 0.10, 0.15, 0.20, 0.25};
  std::vector<double> ts;
  for (double th : t_hats) ts.push_back(gaussian_time_map(th, 1.0, -1, 1));

  FlowConfig cfg;
  cfg.vertex_budget = 256;
  auto gauss_curves = flow_checkpoints(star, gauss, cfg, ts);
  auto flat_curves = flow_checkpoints(star, flat, cfg, t_hats);

  bool pass = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < t_hats.size(); ++i) {
    DiscreteCurve predicted = gaussian_rescale_curve(gauss_curves[i], t_hats[i], 1.0, -1, 1);
    double diam = curve_diameter(flat_curves[i]);
    double hd = hausdorff_distance(predicted, flat_curves[i]) / diam;
    worst = std::max(worst, hd);
    if (hd >= 0.01) pass = false;
  }
  std::ostringstream detail;
  detail << "max hausdorff = " << fmt(worst, 3) << " of diameter at "
         << t_hats.size() << " matched times";
  return {10, "rescaling equivalence (gaussian vs flat through the maps)", pass,
          detail.str()};
}

VerifyRow check_11(Context& ctx) {
  ctx.progress << "  [run] avoidance pair (critical density)..." << std::endl;
  auto crit = RadialDensity::critical_log(1);
  FlowConfig cfg;
  cfg.vertex_budget = 128;
  cfg.t_max = 1.0;

  FlowState inner = make_initial_state(ellipse(0.5, 0.3, {3.0, 0.0}, 128), crit, cfg);
  FlowState outer = make_initial_state(build_from_polar(2.2, {}, {3.0, 0.0}, 128), crit, cfg);

  double min_dist = min_distance(inner.curve, outer.curve);
  const double len0_inner = inner.geom.length;
  const double len0_outer = outer.geom.length;
  bool pass = min_dist > 0.0;
  long guard = 0;

  // advance whichever curve lags in time until the first verdict
  while (true) {
    if (inner.geom.length < cfg.epsilon_len * len0_inner) break;
    if (outer.geom.length < cfg.epsilon_len * len0_outer) break;
    if (inner.t >= cfg.t_max && outer.t >= cfg.t_max) break;
    if (++guard > 200000) {
      pass = false;
      break;
    }
    if (inner.t <= outer.t)
      inner = step(inner, crit, cfg);
    else
      outer = step(outer, crit, cfg);
    double dmin = min_distance(inner.curve, outer.curve);
    min_dist = std::min(min_dist, dmin);
    if (dmin <= 0.0) {
      pass = false;
      break;
    }
  }
  std::ostringstream detail;
  detail << "min inter-curve distance = " << fmt(min_dist, 4)
         << " over " << guard << " paired steps";
  return {11, "avoidance: disjoint curves stay disjoint", pass, detail.str()};
}

VerifyRow check_12(Context& ctx) {
  bool pass = true;
  std::ostringstream detail;
  for (int idx : {1, 3, 4, 5}) {
    Experiment e = Context::experiment_for(idx);
    const RunData& base = ctx.collapse_run(idx);
    ctx.progress << "  [run] " << e.name << " refined (N=512, cfl/2)..."
                 << std::endl;
    FlowConfig cfg;
    cfg.vertex_budget = 512;
    cfg.cfl_factor = 0.125;
    cfg.t_max = e.t_max;
    RunData fine = flow_run(e.curve_at(512), e.density, cfg, 0);
    bool ok = fine.outcome.verdict == Verdict::CollapsedToPoint;
    double change = ok ? std::abs(fine.outcome.t_est - base.outcome.t_est) : 1e300;
    double allowed = 0.5 * e.tolerance_rel * e.expected_T;
    ok = ok && change < allowed;
    pass = pass && ok;
    detail << "[" << e.name << " d=" << fmt(change, 2) << " allow="
           << fmt(allowed, 2) << (ok ? " ok" : " FAIL") << "] ";
  }
  return {12, "refinement convergence of every t_est", pass, detail.str()};
}

}  // namespace

std::vector<VerifyRow> run_verify_suite(const std::string& suite,
                                        std::ostream& progress) {
  std::vector<int> ids;
  if (suite == "collapse-times")
    ids = {1, 3, 4, 5};
  else if (suite == "limit-circles")
    ids = {2, 6};
  else if (suite == "invariants")
    ids = {7, 8, 9, 10, 11};
  else if (suite == "refinement")
    ids = {12};
  else if (suite == "all")
    ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  else
    throw Error("unknown verify suite: " + suite);

  Context ctx(progress);
  std::vector<VerifyRow> rows;
  for (int id : ids) {
    VerifyRow row;
    try {
      switch (id) {
        case 1: row = check_1(ctx); break;
        case 2: row = check_2(ctx); break;
        case 3: row = check_3(ctx); break;
        case 4: row = check_4(ctx); break;
        case 5: row = check_5(ctx); break;
        case 6: row = check_6(ctx); break;
        case 7: row = check_7(ctx); break;
        case 8: row = check_8(ctx); break;
        case 9: row = check_9(ctx); break;
        case 10: row = check_10(ctx); break;
        case 11: row = check_11(ctx); break;
        case 12: row = check_12(ctx); break;
      }
    } catch (const std::exception& e) {
      row = {id, "criterion " + std::to_string(id), false,
             std::string("exception: ") + e.what()};
    }
    progress << (row.pass ? "[PASS] " : "[FAIL] ") << std::setw(2) << row.id
             << "  " << row.name << "  --  " << row.detail << std::endl;
    rows.push_back(std::move(row));
  }
  return rows;
}

void print_verify_table(std::ostream& os, const std::vector<VerifyRow>& rows) {
  for (const auto& r : rows)
    os << (r.pass ? "PASS " : "FAIL ") << std::setw(2) << r.id << "  " << r.name
       << "\n      " << r.detail << "\n";
  os << (all_pass(rows) ? "all criteria passed\n" : "SOME CRITERIA FAILED\n");
}

bool all_pass(const std::vector<VerifyRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return !rows.empty();
}

}  // namespace psiflow
