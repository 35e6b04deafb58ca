#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psiflow/curve.hpp"
#include "psiflow/density.hpp"

namespace psiflow {

enum class CaseLabel {
  A_i,
  A_ii,
  A_iii,
  A_iii_1,
  B_i,
  B_ii_1,
  B_ii_2,
  B_ii_3,
  Critical_outside,
  Critical_inside,
  QuadLog_outside,
  Gaussian_subcritical,
  Gaussian_critical,
  Gaussian_supercritical,
  AntiGaussian,
  Unpredicted,
};

enum class OutcomeKind {
  FiniteTimePoint,
  GlobalExistenceLimitCircle,
  GlobalExistenceUnresolvedLimit,
};

const char* to_string(CaseLabel l);
const char* to_string(OutcomeKind k);

struct Assumption {
  std::string name;
  bool pass;
  std::string detail;
};

struct Prediction {
  CaseLabel label = CaseLabel::Unpredicted;
  OutcomeKind outcome = OutcomeKind::GlobalExistenceUnresolvedLimit;
  std::optional<double> exact_time;    // closed-form collapse time, if pinned
  std::optional<double> limit_radius;  // limit circle radius, if pinned
  std::vector<Assumption> assumptions;
};

struct CurveStats {
  double r_min = 0.0;
  double r_max = 0.0;
  int winding = 0;
  double area = 0.0;
};

CurveStats curve_stats(const CurveGeometry& g);

// Match (density, initial curve) to the classification case that governs
// its evolution.  Unpredicted is a valid result whenever the hypotheses fail.
Prediction classify_case(const RadialDensity& d, const CurveStats& stats,
                         const CrossingSet& crossings);

// Exact collapse times for the closed-form families (area A0, winding in
// {0,1}); nullopt when no exact time is pinned.
std::optional<double> predicted_collapse_time(const RadialDensity& d,
                                              double area0, int winding);

// Limit-circle radius for the global-existence cases.  Throws NotGlobalCase
// when classification does not yield a pinned limit circle.
double predicted_limit_radius(const RadialDensity& d,
                              const CrossingSet& crossings,
                              const CurveStats& stats);

struct MinimalCircleInventory {
  std::vector<double> radii;
  bool none_inside_first_zero = false;
  bool all_circles_minimal = false;
  bool starshaped_necessary = false;  // n = 1
};

MinimalCircleInventory minimal_circles_in_region(const RadialDensity& d, int n,
                                                 const CrossingSet& crossings,
                                                 double r_lo, double r_hi);

// Time map between the weighted flow with (anti-)Gaussian density and the
// unweighted flow: t(t_hat) = ln(1 + 2 eps n mu^2 t_hat) / (2 eps n mu^2),
// eps = +1 anti-Gaussian, -1 Gaussian (domain t_hat < 1/(2 n mu^2)).
double gaussian_time_map(double t_hat, double mu, int eps, int n);
double gaussian_time_map_inverse(double t, double mu, int eps, int n);

// Spatial factor e^{eps n mu^2 t(t_hat)} applied to every vertex.
DiscreteCurve gaussian_rescale_curve(const DiscreteCurve& c, double t_hat,
                                     double mu, int eps, int n);
double gaussian_rescale_factor(double t_hat, double mu, int eps, int n);

// Reference-point translation p(t) = e^{-eps n mu^2 t} p0.
Vec2 translation_map(Vec2 p0, double t, double mu, int eps, int n);

struct AOBounds {
  double grad_sup = 0.0;    // sup |psi'|
  double hess_sup = 0.0;    // sup over unit directions of |Hess psi|
  double weight_min = 0.0;  // E <= e^psi
  double weight_max = 0.0;  // e^psi <= D
  double safety_margin = 0.1;
  bool all_finite = false;
  double r_lo = 0.0, r_hi = 0.0;
};

// Dense sampling (4096 points) of the flow-existence bounds over an annulus.
AOBounds validate_ao_bounds(const RadialDensity& d, double r_lo, double r_hi);

}  // namespace psiflow
