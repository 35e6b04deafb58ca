#pragma once

#include <utility>
#include <vector>

#include "psiflow/density.hpp"
#include "psiflow/geometry.hpp"

namespace psiflow {

// Closed polygon in the plane, implicitly joined back to vertices.front().
// Curves produced by the factories here are positively oriented (counter-
// clockwise, signed area > 0).
struct DiscreteCurve {
  std::vector<Vec2> vertices;

  int size() const { return static_cast<int>(vertices.size()); }
};

// Per-vertex geometric data plus the curve integrals the flow needs.
// Normals are the tangents rotated by +90 degrees, which points inward on a
// counterclockwise curve; with that convention k = 1/rho > 0 on circles.
struct CurveGeometry {
  std::vector<double> arclength;           // s_i, s_0 = 0
  std::vector<double> edge_length;         // |v_{i+1} - v_i|
  std::vector<Vec2> tangent;               // unit
  std::vector<Vec2> normal;                // unit, inward for CCW
  std::vector<double> curvature;           // turning angle / mean edge
  std::vector<double> weighted_curvature;  // k - <grad psi, N>

  double length = 0.0;
  double weighted_length = 0.0;  // integral of e^psi ds
  double area = 0.0;             // shoelace, signed
  double int_kpsi_ds = 0.0;
  double int_kpsi2_dspsi = 0.0;
  double max_abs_kpsi = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  int winding = 0;  // about the origin
};

// Sample r(theta) = rho0 + sum a_m cos(m theta) about `center`.
// Requires rho0 > sum |a_m| so the graph stays a simple star-shaped curve.
DiscreteCurve build_from_polar(double rho0,
                               const std::vector<std::pair<int, double>>& modes,
                               Vec2 center, int n_vertices);

// Checks the structural invariants (vertex count, distinct consecutive
// vertices, positive signed area); throws InvalidCurve on violation.
void validate_curve(const DiscreteCurve& c);

// Full geometry pass.  origin_guard > 0 rejects vertices closer than that to
// the origin of a singular density (SingularProximity).
CurveGeometry geometry(const DiscreteCurve& c, const RadialDensity& d,
                       double origin_guard = 0.0);

// N vertices at equal arclength spacing along the piecewise-linear input,
// iterated to its fixed point so that resampling a resampled curve is the
// identity to ~1e-13.
DiscreteCurve resample_uniform(const DiscreteCurve& c, int n_vertices);

// Exact segment-intersection test over all non-adjacent edge pairs.
bool is_simple(const DiscreteCurve& c);

// Symmetric max over vertices of point-to-polyline distance.
double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b);

// Minimum vertex-to-polyline distance between two curves (avoidance checks).
double min_distance(const DiscreteCurve& a, const DiscreteCurve& b);

double signed_area(const DiscreteCurve& c);
double curve_length(const DiscreteCurve& c);
Vec2 area_centroid(const DiscreteCurve& c);
double curve_diameter(const DiscreteCurve& c);

// Regular n-gon sample of the circle of given radius/center (test helper and
// reference shape for limit-circle comparisons).
DiscreteCurve circle_polygon(double radius, Vec2 center, int n_vertices);

}  // namespace psiflow
