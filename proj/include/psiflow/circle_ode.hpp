#pragma once

#include <optional>
#include <vector>

#include "psiflow/density.hpp"

namespace psiflow {

// Radial dynamics of origin-centered circles/spheres:
//   dr/dt = -(n/r + psi'(r)).
// Internally the integrator works on u = r^2, whose right-hand side
// u' = -2(n + r psi'(r)) stays finite through extinction for every
// closed-form family.

double radial_drift(const RadialDensity& d, int n, double r);

struct OdePoint {
  double t;
  double r;
};

struct OdeResult {
  std::vector<OdePoint> path;  // accepted steps, starting at (0, r0)
  bool extinct = false;
  double extinction_time = 0.0;  // time at which r reaches the 1e-6 floor
};

// Classical 4th-order integration with step doubling, local error `tol`.
// Stops early when r falls to 1e-6; the crossing time comes from a cubic
// Hermite dense-output root of u(t).  Throws BlowUp past r = 1e6.
OdeResult integrate_radius(double r0, const RadialDensity& d, int n,
                           double t_end, double tol = 1e-9);

// Closed forms for u = r^2 (u' = -c - lambda u with family coefficients).
// Throws NoClosedForm for tabulated densities.
std::optional<double> exact_extinction_time(const RadialDensity& d, int n,
                                            double r0);
// Radius at time t; returns 0 at or past extinction.
double exact_radius(const RadialDensity& d, int n, double r0, double t);

struct PortraitRow {
  double r;
  double drift;
  CircleVerdict verdict;
};

struct PhasePortrait {
  std::vector<PortraitRow> rows;
  CrossingSet crossings;
};

PhasePortrait phase_portrait(const RadialDensity& d, int n, double r_lo,
                             double r_hi, int samples);

}  // namespace psiflow
