#include "psiflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "psiflow/errors.hpp"

namespace psiflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLpsiSlack = 1e-9;   // allowed relative rise per step
constexpr double kKpsiGrowth = 1.5;   // rejection threshold on max|kpsi|
constexpr int kMaxRejects = 20;

TraceRecord record_of(const FlowState& s) {
  TraceRecord r;
  r.t = s.t;
  r.n_vertices = s.curve.size();
  r.length = s.geom.length;
  r.weighted_length = s.geom.weighted_length;
  r.area = s.geom.area;
  r.r_min = s.geom.r_min;
  r.r_max = s.geom.r_max;
  r.max_abs_kpsi = s.geom.max_abs_kpsi;
  r.int_kpsi2_dspsi = s.geom.int_kpsi2_dspsi;
  r.dt = s.dt_last;
  return r;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CollapsedToPoint: return "CollapsedToPoint";
    case Verdict::ConvergedToMinimal: return "ConvergedToMinimal";
    case Verdict::ReachedTMax: return "ReachedTMax";
    case Verdict::Aborted: return "Aborted";
  }
  return "?";
}

FlowState make_initial_state(const DiscreteCurve& c0, const RadialDensity& d,
                             const FlowConfig& cfg) {
  validate_curve(c0);
  if (!is_simple(c0)) throw SelfIntersection("initial curve is not simple");

  // reject curves that touch the origin of a singular density before the
  // resampling can move vertices off it
  if (d.singular_at_origin()) {
    double r_min0 = norm(c0.vertices[0]), r_max0 = r_min0;
    for (const auto& v : c0.vertices) {
      r_min0 = std::min(r_min0, norm(v));
      r_max0 = std::max(r_max0, norm(v));
    }
    if (r_min0 <= 1e-14 * r_max0)
      throw SingularProximity("curve touches the origin of a singular density");
  }

  FlowState s;
  s.budget = cfg.vertex_budget;
  s.curve = resample_uniform(c0, s.budget);

  double r_min_init = norm(s.curve.vertices[0]);
  for (const auto& v : s.curve.vertices)
    r_min_init = std::min(r_min_init, norm(v));
  s.origin_guard = cfg.origin_guard;
  if (s.origin_guard <= 0.0 && d.singular_at_origin())
    s.origin_guard = 1e-3 * r_min_init;

  s.geom = geometry(s.curve, d, s.origin_guard);
  return s;
}

FlowState step(const FlowState& s, const RadialDensity& d, const FlowConfig& cfg) {
  const int n = s.curve.size();
  const int budget = s.budget;

  // diffusion CFL from the smallest edge, reaction scale from the density
  double min_h2 = s.geom.edge_length[0] * s.geom.edge_length[0];
  for (int i = 1; i < n; ++i)
    min_h2 = std::min(min_h2, s.geom.edge_length[i] * s.geom.edge_length[i]);
  double reaction = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = norm(s.curve.vertices[i]);
    DensityEval e = d.eval(r);
    reaction = std::max(reaction, std::abs(e.d2psi) + std::abs(e.dpsi) / r);
  }
  double dt = cfg.cfl_factor * std::min(min_h2, 1.0 / (1.0 + reaction));
  if (cfg.t_max > s.t) dt = std::min(dt, cfg.t_max - s.t);

  const bool resample_now =
      cfg.resample_every <= 1 || ((s.accepted + 1) % cfg.resample_every == 0);

  for (int attempt = 0; attempt <= kMaxRejects; ++attempt) {
    DiscreteCurve moved;
    moved.vertices.resize(n);
    for (int i = 0; i < n; ++i)
      moved.vertices[i] = s.curve.vertices[i] +
                          dt * s.geom.weighted_curvature[i] * s.geom.normal[i];

    DiscreteCurve next = resample_now ? resample_uniform(moved, budget)
                                      : std::move(moved);
    CurveGeometry geom = geometry(next, d, s.origin_guard);

    bool lpsi_ok = geom.weighted_length <=
                   s.geom.weighted_length * (1.0 + kLpsiSlack);
    bool kpsi_ok = geom.max_abs_kpsi <=
                   kKpsiGrowth * std::max(s.geom.max_abs_kpsi, 1e-12);
    if (!lpsi_ok || !kpsi_ok) {
      dt *= 0.5;
      continue;
    }

    if (!is_simple(next))
      throw SelfIntersection("curve self-intersects after the move");

    FlowState out;
    out.t = s.t + dt;
    out.curve = std::move(next);
    out.geom = std::move(geom);
    out.accepted = s.accepted + 1;
    out.dt_last = dt;
    out.budget = budget;
    out.origin_guard = s.origin_guard;
    return out;
  }
  throw StepRejectedRepeatedly("step rejected " + std::to_string(kMaxRejects) +
                               " times (weighted length or curvature guard)");
}

FlowOutcome run(const DiscreteCurve& c0, const RadialDensity& d,
                const FlowConfig& cfg, const StepCallback& on_accept) {
  FlowState s = make_initial_state(c0, d, cfg);

  FlowOutcome out;
  out.trace.push_back(record_of(s));
  if (on_accept) on_accept(s, out.trace.back());

  const double len0 = s.geom.length;
  int dwell_streak = 0;

  while (true) {
    if (s.t >= cfg.t_max - 1e-15) {
      out.verdict = Verdict::ReachedTMax;
      break;
    }
    if (s.accepted >= cfg.max_steps) {
      out.verdict = Verdict::ReachedTMax;
      out.abort_reason = "max_steps reached";
      break;
    }

    s = step(s, d, cfg);
    out.trace.push_back(record_of(s));
    if (on_accept) on_accept(s, out.trace.back());

    if (s.geom.length < cfg.epsilon_len * len0) {
      out.verdict = Verdict::CollapsedToPoint;
      out.t_est = extrapolate_collapse_time(out.trace, d, s.geom.winding);
      out.limit_point = area_centroid(s.curve);
      break;
    }

    if (s.geom.max_abs_kpsi < cfg.epsilon_kpsi)
      ++dwell_streak;
    else
      dwell_streak = 0;
    if (dwell_streak >= cfg.dwell) {
      out.verdict = Verdict::ConvergedToMinimal;
      out.sup_kpsi = s.geom.max_abs_kpsi;
      break;
    }
  }

  out.final_curve = s.curve;
  double area = s.geom.area;
  out.isoperimetric_ratio =
      area > 0.0 ? s.geom.length * s.geom.length / (4.0 * kPi * area) : 0.0;
  return out;
}

bool area_law_coefficients(const RadialDensity& d, int winding, double* c_out,
                           double* lambda_out) {
  double lambda_eff = 0.0, a_eff = 0.0;
  switch (d.family()) {
    case DensityFamily::critical_log:
      lambda_eff = 0.0;
      a_eff = -static_cast<double>(d.n());
      break;
    case DensityFamily::gaussian:
      lambda_eff = -2.0 * d.n() * d.mu() * d.mu();
      a_eff = 0.0;
      break;
    case DensityFamily::anti_gaussian:
      lambda_eff = 2.0 * d.n() * d.mu() * d.mu();
      a_eff = 0.0;
      break;
    case DensityFamily::quadratic_log:
      lambda_eff = d.lambda();
      a_eff = d.a();
      break;
    case DensityFamily::flat:
      lambda_eff = 0.0;
      a_eff = 0.0;
      break;
    case DensityFamily::tabulated:
      return false;
  }
  *lambda_out = lambda_eff;
  *c_out = 2.0 * kPi * (1.0 + (winding == 1 ? a_eff : 0.0));
  return true;
}

double extrapolate_collapse_time(const std::vector<TraceRecord>& trace,
                                 const RadialDensity& d, int winding) {
  if (trace.empty()) throw NoCollapseDetected("empty trace");
  const TraceRecord& last = trace.back();
  if (!(last.area > 0.0))
    throw NoCollapseDetected("no positive area at the last record");

  double c, lambda;
  if (!area_law_coefficients(d, winding, &c, &lambda)) {
    // no closed form: linear extrapolation from the measured slope
    if (trace.size() < 2)
      throw NoCollapseDetected("need two records to extrapolate");
    const TraceRecord& prev = trace[trace.size() - 2];
    double slope = (last.area - prev.area) / (last.t - prev.t);
    if (!(slope < 0.0))
      throw NoCollapseDetected("measured area is not decreasing");
    return last.t - last.area / slope;
  }

  if (lambda == 0.0) {
    if (!(c > 0.0)) throw NoCollapseDetected("area law predicts no extinction");
    return last.t + last.area / c;
  }
  double arg = 1.0 + lambda * last.area / c;
  if (!(c > 0.0) || !(arg > 0.0))
    throw NoCollapseDetected("area law predicts no extinction");
  return last.t + std::log(arg) / lambda;
}

namespace {

// Integral of f(|x|) over the polygon via a centroid fan with the midpoint
// (three edge midpoints) rule on each triangle.
double fan_integral(const DiscreteCurve& c,
                    const std::function<double(double)>& f) {
  const auto& v = c.vertices;
  const int n = c.size();
  Vec2 o = area_centroid(c);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    double tri2 = cross(p - o, q - o);  // twice the signed area
    Vec2 m0 = 0.5 * (o + p);
    Vec2 m1 = 0.5 * (p + q);
    Vec2 m2 = 0.5 * (q + o);
    double avg = (f(norm(m0)) + f(norm(m1)) + f(norm(m2))) / 3.0;
    acc += 0.5 * tri2 * avg;
  }
  return acc;
}

}  // namespace

double area_law_residual(const FlowState& s, const RadialDensity& d) {
  double measured = -s.geom.int_kpsi_ds;

  double c, lambda;
  double rhs;
  if (area_law_coefficients(d, s.geom.winding, &c, &lambda)) {
    rhs = -c - lambda * s.geom.area;
  } else {
    if (d.singular_at_origin() && s.geom.winding == 1)
      throw SingularProximity(
          "domain integral crosses the origin singularity; the winding "
          "correction form is required");
    rhs = -2.0 * kPi - fan_integral(s.curve, [&](double r) {
            DensityEval e = d.eval(r);
            return e.d2psi + e.dpsi / r;
          });
  }
  return std::abs(measured - rhs) / (2.0 * kPi);
}

}  // namespace psiflow
