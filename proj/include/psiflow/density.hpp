#pragma once

#include <string>
#include <vector>

#include "psiflow/geometry.hpp"

namespace psiflow {

enum class DensityFamily {
  critical_log,   // psi = -n ln r + b
  gaussian,       // psi = -(1/2) n mu^2 r^2
  anti_gaussian,  // psi = +(1/2) n mu^2 r^2
  quadratic_log,  // psi = lambda r^2/4 + b + a ln r
  flat,           // psi = 0
  tabulated,      // natural cubic spline through (r_i, psi_i)
};

struct DensityEval {
  double psi;    // psi(r)
  double dpsi;   // psi'(r)
  double d2psi;  // psi''(r)
};

// A radial weight e^psi on the plane.  psi depends only on r = |x|.  The
// analytic families carry closed-form derivatives; tabulated data uses a
// natural cubic spline, so its second derivative is approximate by
// construction.  Immutable after construction and safe to share between
// concurrent simulations.
class RadialDensity {
 public:
  static RadialDensity critical_log(int n = 1, double b = 0.0);
  static RadialDensity gaussian(double mu, int n = 1);
  static RadialDensity anti_gaussian(double mu, int n = 1);
  static RadialDensity quadratic_log(double lambda, double a, double b = 0.0,
                                     int n = 1);
  static RadialDensity flat();
  static RadialDensity tabulated(std::vector<double> r, std::vector<double> psi,
                                 bool singular_at_origin = false);

  DensityFamily family() const { return family_; }
  bool singular_at_origin() const { return singular_; }
  int n() const { return n_; }

  // Family parameters; meaning depends on family() (zero when unused).
  double mu() const { return mu_; }
  double lambda() const { return lambda_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<double>& grid_r() const { return grid_r_; }
  const std::vector<double>& grid_psi() const { return grid_psi_; }

  // Throws EvalAtSingularity when r = 0 and the density is singular there.
  DensityEval eval(double r) const;

  double weight(double r) const;  // e^psi(r)

  // grad psi = psi'(r) x/|x|
  Vec2 grad(Vec2 p) const;

  // Hessian of psi contracted twice with the unit vector nu:
  // psi'' c^2 + (psi'/r)(1 - c^2), c = <x/|x|, nu>.
  double hess_nn(Vec2 p, Vec2 nu) const;

  // r * psi'(r), continuous down to r = 0 for the closed-form families
  // (critical_log -> -n, quadratic_log -> a, others -> 0).  Used by the
  // radial ODE where 1/r terms would otherwise blow up.
  double radial_slope_times_r(double r) const;

  std::string describe() const;

 private:
  RadialDensity() = default;

  DensityFamily family_ = DensityFamily::flat;
  bool singular_ = false;
  int n_ = 1;
  double mu_ = 0.0, lambda_ = 0.0, a_ = 0.0, b_ = 0.0;

  // tabulated: natural cubic spline data
  std::vector<double> grid_r_, grid_psi_, grid_m_;  // m = spline second derivatives
  DensityEval eval_spline(double r) const;
};

// A zero of g(r) = psi'(r) + n/r.  sign_change is stated for the radial
// drift -(psi' + n/r): minus_to_plus marks a repulsor ordering (circles
// shrink below the zero and expand above it), plus_to_minus an attractor.
struct Crossing {
  double r;
  bool transversal;
  enum class DriftChange { plus_to_minus, minus_to_plus } sign_change;
};

struct CrossingSet {
  std::vector<Crossing> zeros;  // ordered, r strictly increasing
  bool degenerate = false;      // g == 0 identically (the critical density)
  double r_lo = 0.0, r_hi = 0.0;

  bool empty() const { return zeros.empty(); }
};

// Scan [r_lo, r_hi] on a uniform grid (log-spaced for densities singular at
// the origin) and refine every sign change of g by bisection.
CrossingSet find_crossings(const RadialDensity& d, int n, double r_lo,
                           double r_hi, int grid_points = 2048);

enum class CircleVerdict {
  psi_minimal_attractor,
  psi_minimal_repulsor,
  psi_minimal_semistable,
  shrinking,
  expanding,
};

struct CircleClass {
  CircleVerdict verdict;
  double drift;  // -(n/r + psi'(r))
};

const char* to_string(CircleVerdict v);

// Radial drift of the origin-centered sphere of radius r, with the
// psi-minimal verdicts refined by the slope of the drift.
CircleClass classify_circle(const RadialDensity& d, int n, double r);

// Strict stability of the psi-minimal sphere of radius r: psi''(r) > n/r^2.
// Throws NotMinimalRadius unless |psi'(r) + n/r| is below tolerance.
bool stability_second_variation(const RadialDensity& d, int n, double r);

// Tolerances shared by the classification operations.
inline constexpr double kDriftTolerance = 1e-9;
inline constexpr double kTransversalTolerance = 1e-8;

}  // namespace psiflow
