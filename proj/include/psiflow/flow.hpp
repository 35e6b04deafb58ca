#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psiflow/curve.hpp"
#include "psiflow/density.hpp"

namespace psiflow {

struct FlowConfig {
  double cfl_factor = 0.25;
  int resample_every = 1;
  int vertex_budget = 256;
  double epsilon_len = 1e-2;    // collapse when L < epsilon_len * L(0)
  double epsilon_kpsi = 1e-3;   // convergence when max|kpsi| stays below this
  int dwell = 50;               // accepted steps the convergence bound must hold
  double t_max = 10.0;
  long max_steps = 500000;
  double origin_guard = 0.0;    // 0: auto (1e-3 * initial r_min, singular only)
};

struct FlowState {
  double t = 0.0;
  DiscreteCurve curve;
  CurveGeometry geom;
  long accepted = 0;
  double dt_last = 0.0;
  int budget = 0;
  double origin_guard = 0.0;
};

struct TraceRecord {
  double t;
  int n_vertices;
  double length;
  double weighted_length;
  double area;
  double r_min;
  double r_max;
  double max_abs_kpsi;
  double int_kpsi2_dspsi;
  double dt;
};

enum class Verdict { CollapsedToPoint, ConvergedToMinimal, ReachedTMax, Aborted };

const char* to_string(Verdict v);

struct FlowOutcome {
  Verdict verdict = Verdict::ReachedTMax;
  std::vector<TraceRecord> trace;
  DiscreteCurve final_curve;

  // CollapsedToPoint
  double t_est = 0.0;
  Vec2 limit_point{0.0, 0.0};
  double isoperimetric_ratio = 0.0;  // L^2 / (4 pi A) at the final record

  // ConvergedToMinimal
  double sup_kpsi = 0.0;

  std::string abort_reason;
};

// Resamples c0 to the vertex budget, checks simplicity, fills the caches.
FlowState make_initial_state(const DiscreteCurve& c0, const RadialDensity& d,
                             const FlowConfig& cfg);

// One explicit Euler move v <- v + dt kpsi N followed by uniform resampling.
// dt = cfl * min(min_i h_i^2, 1/(1+S)), S = max_i(|psi''| + |psi'|/r), capped
// so the state never steps past cfg.t_max.  A step is rejected and retried
// with half the dt (at most 20 times) if the weighted length rises by more
// than 1e-9 relative or max|kpsi| grows by more than 50%.
FlowState step(const FlowState& s, const RadialDensity& d, const FlowConfig& cfg);

using StepCallback = std::function<void(const FlowState&, const TraceRecord&)>;

FlowOutcome run(const DiscreteCurve& c0, const RadialDensity& d,
                const FlowConfig& cfg, const StepCallback& on_accept = {});

// Solve the family's exact area law forward from the last trace record to
// A = 0 (linear extrapolation from the measured slope for tabulated
// densities).  Throws NoCollapseDetected when the law predicts no extinction.
double extrapolate_collapse_time(const std::vector<TraceRecord>& trace,
                                 const RadialDensity& d, int winding);

// |measured(-int kpsi ds) - closed-form dA/dt| / 2pi.  The closed form is
// -2pi - lambda A - 2pi a [winding=1] for the quadratic-log family and its
// specializations, and -2pi - integral of (psi'' + psi'/r) over the enclosed
// domain (fan quadrature) otherwise.
double area_law_residual(const FlowState& s, const RadialDensity& d);

// Area-law coefficients dA/dt = -c - lambda A shared by the extrapolation,
// the residual check, and the prediction layer.  Returns false when the
// density has no closed-form law (tabulated).
bool area_law_coefficients(const RadialDensity& d, int winding, double* c_out,
                           double* lambda_out);

}  // namespace psiflow
