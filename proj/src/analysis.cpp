#include "psiflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "psiflow/errors.hpp"

namespace psiflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kBracketTol = 1e-9;
}  // namespace

const char* to_string(CaseLabel l) {
  switch (l) {
    case CaseLabel::A_i: return "A_i";
    case CaseLabel::A_ii: return "A_ii";
    case CaseLabel::A_iii: return "A_iii";
    case CaseLabel::A_iii_1: return "A_iii_1";
    case CaseLabel::B_i: return "B_i";
    case CaseLabel::B_ii_1: return "B_ii_1";
    case CaseLabel::B_ii_2: return "B_ii_2";
    case CaseLabel::B_ii_3: return "B_ii_3";
    case CaseLabel::Critical_outside: return "Critical_outside";
    case CaseLabel::Critical_inside: return "Critical_inside";
    case CaseLabel::QuadLog_outside: return "QuadLog_outside";
    case CaseLabel::Gaussian_subcritical: return "Gaussian_subcritical";
    case CaseLabel::Gaussian_critical: return "Gaussian_critical";
    case CaseLabel::Gaussian_supercritical: return "Gaussian_supercritical";
    case CaseLabel::AntiGaussian: return "AntiGaussian";
    case CaseLabel::Unpredicted: return "Unpredicted";
  }
  return "?";
}

const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::FiniteTimePoint: return "FiniteTimePoint";
    case OutcomeKind::GlobalExistenceLimitCircle: return "GlobalExistenceLimitCircle";
    case OutcomeKind::GlobalExistenceUnresolvedLimit: return "GlobalExistenceUnresolvedLimit";
  }
  return "?";
}

CurveStats curve_stats(const CurveGeometry& g) {
  return {g.r_min, g.r_max, g.winding, g.area};
}

std::optional<double> predicted_collapse_time(const RadialDensity& d,
                                              double area0, int winding) {
  if (!(area0 > 0.0)) return std::nullopt;
  switch (d.family()) {
    case DensityFamily::critical_log:
      if (winding == 0) return area0 / (2.0 * kPi);
      return std::nullopt;  // origin inside: area conserved, global existence
    case DensityFamily::quadratic_log: {
      if (d.lambda() > 0.0 && d.a() <= -1.0 && winding == 0)
        return std::log(1.0 + d.lambda() * area0 / (2.0 * kPi)) / d.lambda();
      return std::nullopt;
    }
    case DensityFamily::anti_gaussian: {
      double m2 = d.n() * d.mu() * d.mu();
      return std::log(1.0 + m2 * area0 / kPi) / (2.0 * m2);
    }
    case DensityFamily::gaussian: {
      double m2 = d.n() * d.mu() * d.mu();
      if (m2 * area0 / kPi < 1.0 - 1e-9)
        return -std::log(1.0 - m2 * area0 / kPi) / (2.0 * m2);
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

namespace {

void note(Prediction& p, const std::string& name, bool pass,
          const std::string& detail = "") {
  p.assumptions.push_back({name, pass, detail});
}

// Bracket search shared by the smooth case and (shifted by one
// zero) the singular cases.  Zeros with index parity `repulsor_parity`
// (1-based, counted from `offset`) bound the brackets; the zero between two
// consecutive repulsors is the attractor the flow can settle on.
struct BracketResult {
  bool inside_first = false;   // r_max below the first repulsor zone
  bool found = false;          // curve bracketed between consecutive repulsors
  double attractor = 0.0;
  bool beyond_first = false;   // r_min above the first repulsor
};

BracketResult bracket_curve(const std::vector<double>& zeros, int offset,
                            const CurveStats& st) {
  // zeros listed in increasing order; repulsors at indices offset, offset+2,
  // ... (0-based into the vector).
  BracketResult out;
  const int nz = static_cast<int>(zeros.size());
  if (offset >= nz) return out;

  double first_rep = zeros[offset];
  out.inside_first = st.r_max <= first_rep + kBracketTol;
  out.beyond_first = st.r_min >= first_rep - kBracketTol;
  for (int k = offset; k < nz; k += 2) {
    double lo = zeros[k];
    bool has_upper = (k + 2) < nz;
    double hi = has_upper ? zeros[k + 2] : std::numeric_limits<double>::infinity();
    bool has_attractor = (k + 1) < nz;
    if (!has_attractor) break;  // trailing repulsor with nothing beyond it
    if (st.r_min >= lo - kBracketTol && st.r_max <= hi + kBracketTol) {
      out.found = true;
      out.attractor = zeros[k + 1];
      return out;
    }
  }
  return out;
}

Prediction classify_general(const RadialDensity& d, const CurveStats& st,
                            const CrossingSet& crossings, Prediction p) {
  std::vector<double> zeros;
  for (const auto& z : crossings.zeros) zeros.push_back(z.r);
  const int nz = static_cast<int>(zeros.size());

  // transversality inside the region the curve can reach
  bool transversal_ok = true;
  for (const auto& z : crossings.zeros)
    if (!z.transversal && z.r <= st.r_max + kBracketTol) transversal_ok = false;
  note(p, "transversal_crossings", transversal_ok);
  if (!transversal_ok) {
    p.label = CaseLabel::Unpredicted;
    return p;
  }

  // one of the classification's domain hypotheses: the curve stays inside the
  // biggest zero, or the tail of psi' + n/r is positive after it
  bool tail_ok = false;
  if (nz > 0) {
    double last = zeros.back();
    double hi = std::max(crossings.r_hi, 2.0 * last);
    tail_ok = true;
    for (int i = 1; i <= 8; ++i) {
      double r = last + (hi - last) * i / 8.0;
      if (d.eval(r).dpsi + 1.0 / r <= 0.0) {
        tail_ok = false;
        break;
      }
    }
  }
  bool inside_biggest = nz > 0 && st.r_max <= zeros.back() + kBracketTol;
  note(p, "tail_sign_or_containment", tail_ok || inside_biggest || nz == 0,
       tail_ok ? "psi'+1/r > 0 after the biggest zero"
               : "curve inside the biggest zero");

  const bool origin_inside = st.winding == 1;

  if (!d.singular_at_origin()) {
    if (nz == 0) {
      // no psi-minimal circle anywhere: everything collapses
      p.label = CaseLabel::A_i;
      p.outcome = OutcomeKind::FiniteTimePoint;
      return p;
    }
    if (st.r_max <= zeros.front() + kBracketTol) {
      p.label = CaseLabel::A_i;
      p.outcome = OutcomeKind::FiniteTimePoint;
      return p;
    }
    if (!tail_ok && !inside_biggest) {
      p.label = CaseLabel::Unpredicted;
      return p;
    }
    BracketResult br = bracket_curve(zeros, 0, st);
    std::ostringstream det;
    if (br.found) det << "bracketed with attractor r = " << br.attractor;
    note(p, "bracketed_between_repulsors", br.found, det.str());
    if (br.found) {
      if (origin_inside) {
        p.label = CaseLabel::A_iii_1;
        p.outcome = OutcomeKind::GlobalExistenceLimitCircle;
        p.limit_radius = br.attractor;
      } else {
        p.label = CaseLabel::A_ii;
        p.outcome = OutcomeKind::FiniteTimePoint;
      }
      return p;
    }
    if (origin_inside && br.beyond_first) {
      p.label = CaseLabel::A_iii;
      p.outcome = OutcomeKind::GlobalExistenceUnresolvedLimit;
      return p;
    }
    p.label = CaseLabel::Unpredicted;
    return p;
  }

  // singular at the origin: the classification needs psi' -> -infinity there
  double probe = nz > 0 ? zeros.front() : crossings.r_lo * 8.0;
  double r_small = std::min(crossings.r_lo, probe * 1e-3);
  bool diverges_down = d.eval(r_small).dpsi < 0.0;
  note(p, "psi_prime_to_minus_infinity", diverges_down);
  if (!diverges_down) {
    p.label = CaseLabel::Unpredicted;
    return p;
  }
  if (nz == 0) {
    // no crossings at all: neither singular sub-case applies
    p.label = CaseLabel::Unpredicted;
    return p;
  }

  // sign of g = psi' + 1/r below the first zero picks the sub-case
  double r_before = zeros.front() * 0.5;
  bool g_positive_before = d.eval(r_before).dpsi + 1.0 / r_before > 0.0;
  note(p, "sign_before_first_zero", true,
       g_positive_before ? "psi' > -1/r below r_1" : "psi' < -1/r below r_1");

  if (g_positive_before) {
    // same zoo as the smooth case, except the inner disk is out of reach
    if (st.r_max <= zeros.front() + kBracketTol) {
      note(p, "inner_disk_case_excluded", false,
           "r_max <= r_1 with a singular density is not covered");
      p.label = CaseLabel::Unpredicted;
      return p;
    }
    if (!tail_ok && !inside_biggest) {
      p.label = CaseLabel::Unpredicted;
      return p;
    }
    BracketResult br = bracket_curve(zeros, 0, st);
    if (br.found) {
      p.label = CaseLabel::B_i;
      if (origin_inside) {
        p.outcome = OutcomeKind::GlobalExistenceLimitCircle;
        p.limit_radius = br.attractor;
      } else {
        p.outcome = OutcomeKind::FiniteTimePoint;
      }
      return p;
    }
    if (origin_inside && br.beyond_first) {
      p.label = CaseLabel::B_i;
      p.outcome = OutcomeKind::GlobalExistenceUnresolvedLimit;
      return p;
    }
    p.label = CaseLabel::Unpredicted;
    return p;
  }

  // g < 0 before r_1: the first zero is an attractor; repulsors sit at the
  // even positions (r_2, r_4, ...)
  double r2 = nz >= 2 ? zeros[1] : std::numeric_limits<double>::infinity();
  if (st.r_max <= r2 + kBracketTol) {
    if (origin_inside) {
      p.label = CaseLabel::B_ii_2;
      p.outcome = OutcomeKind::GlobalExistenceLimitCircle;
      p.limit_radius = zeros.front();
    } else {
      p.label = CaseLabel::B_ii_1;
      p.outcome = OutcomeKind::FiniteTimePoint;
    }
    return p;
  }
  if (!tail_ok && !inside_biggest) {
    p.label = CaseLabel::Unpredicted;
    return p;
  }
  BracketResult br = bracket_curve(zeros, 1, st);
  if (br.found) {
    p.label = CaseLabel::B_ii_3;
    if (origin_inside) {
      p.outcome = OutcomeKind::GlobalExistenceLimitCircle;
      p.limit_radius = br.attractor;
    } else {
      p.outcome = OutcomeKind::FiniteTimePoint;
    }
    return p;
  }
  if (origin_inside && br.beyond_first) {
    p.label = CaseLabel::B_ii_3;
    p.outcome = OutcomeKind::GlobalExistenceUnresolvedLimit;
    return p;
  }
  p.label = CaseLabel::Unpredicted;
  return p;
}

}  // namespace

Prediction classify_case(const RadialDensity& d, const CurveStats& st,
                         const CrossingSet& crossings) {
  Prediction p;
  const bool origin_inside = st.winding == 1;

  switch (d.family()) {
    case DensityFamily::critical_log: {
      note(p, "critical_density", true, "every origin-centered circle is psi-minimal");
      if (d.n() != 1) break;  // curve-flow statements need psi = -ln r
      if (origin_inside) {
        p.label = CaseLabel::Critical_inside;
        p.outcome = OutcomeKind::GlobalExistenceLimitCircle;
        p.limit_radius = std::sqrt(st.area / kPi);
      } else {
        p.label = CaseLabel::Critical_outside;
        p.outcome = OutcomeKind::FiniteTimePoint;
        p.exact_time = predicted_collapse_time(d, st.area, 0);
      }
      return p;
    }
    case DensityFamily::gaussian: {
      double critical_area = kPi / (d.n() * d.mu() * d.mu());
      double ratio = st.area / critical_area;
      note(p, "gaussian_area_ratio", true,
           "A0 / (pi/mu^2) = " + std::to_string(ratio));
      if (ratio < 1.0 - 1e-9) {
        p.label = CaseLabel::Gaussian_subcritical;
        p.outcome = OutcomeKind::FiniteTimePoint;
        p.exact_time = predicted_collapse_time(d, st.area, st.winding);
      } else if (ratio <= 1.0 + 1e-9) {
        p.label = CaseLabel::Gaussian_critical;
        p.outcome = OutcomeKind::GlobalExistenceLimitCircle;
        p.limit_radius = 1.0 / d.mu();
      } else {
        p.label = CaseLabel::Gaussian_supercritical;
        p.outcome = OutcomeKind::GlobalExistenceUnresolvedLimit;
      }
      return p;
    }
    case DensityFamily::anti_gaussian: {
      p.label = CaseLabel::AntiGaussian;
      p.outcome = OutcomeKind::FiniteTimePoint;
      p.exact_time = predicted_collapse_time(d, st.area, st.winding);
      note(p, "no_crossings", true, "psi' + n/r has no zeros");
      return p;
    }
    case DensityFamily::quadratic_log: {
      if (d.lambda() > 0.0 && d.a() < -1.0) {
        double r_star = std::sqrt(-2.0 * (d.a() + 1.0) / d.lambda());
        note(p, "unique_attractor_circle", true,
             "r* = " + std::to_string(r_star));
        if (origin_inside) {
          p.label = CaseLabel::B_ii_2;
          p.outcome = OutcomeKind::GlobalExistenceLimitCircle;
          p.limit_radius = r_star;
        } else {
          p.label = CaseLabel::QuadLog_outside;
          p.outcome = OutcomeKind::FiniteTimePoint;
          p.exact_time = predicted_collapse_time(d, st.area, 0);
        }
        return p;
      }
      if (d.lambda() > 0.0 && d.a() == -1.0 && !origin_inside) {
        p.label = CaseLabel::QuadLog_outside;
        p.outcome = OutcomeKind::FiniteTimePoint;
        p.exact_time = predicted_collapse_time(d, st.area, 0);
        return p;
      }
      break;  // other parameter ranges fall through to the general classifier
    }
    default:
      break;
  }

  if (crossings.degenerate) {
    // numerically degenerate but not tagged critical: no prediction
    note(p, "degenerate_crossings", false, "psi' + n/r vanishes identically");
    p.label = CaseLabel::Unpredicted;
    return p;
  }
  return classify_general(d, st, crossings, std::move(p));
}

double predicted_limit_radius(const RadialDensity& d,
                              const CrossingSet& crossings,
                              const CurveStats& stats) {
  Prediction p = classify_case(d, stats, crossings);
  if (p.outcome == OutcomeKind::GlobalExistenceLimitCircle && p.limit_radius)
    return *p.limit_radius;
  throw NotGlobalCase("classification does not pin a limit circle (case " +
                      std::string(to_string(p.label)) + ")");
}

MinimalCircleInventory minimal_circles_in_region(const RadialDensity& d, int n,
                                                 const CrossingSet& crossings,
                                                 double r_lo, double r_hi) {
  MinimalCircleInventory inv;
  inv.starshaped_necessary = (n == 1);
  if (crossings.degenerate || (d.family() == DensityFamily::critical_log && d.n() == n)) {
    inv.all_circles_minimal = true;
    return inv;
  }
  for (const auto& z : crossings.zeros)
    if (z.r >= r_lo && z.r <= r_hi) inv.radii.push_back(z.r);
  if (crossings.zeros.empty())
    inv.none_inside_first_zero = true;
  else
    inv.none_inside_first_zero = r_hi <= crossings.zeros.front().r + kBracketTol;
  return inv;
}

namespace {

double rate_coefficient(double mu, int eps, int n) {
  if (eps != 1 && eps != -1) throw Error("eps must be +1 or -1");
  if (!(mu > 0.0)) throw Error("mu must be positive");
  if (n < 1) throw Error("n must be >= 1");
  return 2.0 * eps * n * mu * mu;  // the 2 eps n mu^2 in the time map
}

}  // namespace

double gaussian_time_map(double t_hat, double mu, int eps, int n) {
  double k = rate_coefficient(mu, eps, n);
  double arg = 1.0 + k * t_hat;
  if (!(arg > 0.0))
    throw TimeOutOfDomain("t_hat outside the domain of the time map");
  return std::log(arg) / k;
}

double gaussian_time_map_inverse(double t, double mu, int eps, int n) {
  double k = rate_coefficient(mu, eps, n);
  return std::expm1(k * t) / k;
}

double gaussian_rescale_factor(double t_hat, double mu, int eps, int n) {
  double k = rate_coefficient(mu, eps, n);
  double arg = 1.0 + k * t_hat;
  if (!(arg > 0.0))
    throw TimeOutOfDomain("t_hat outside the domain of the time map");
  return std::sqrt(arg);  // e^{eps n mu^2 t(t_hat)}
}

DiscreteCurve gaussian_rescale_curve(const DiscreteCurve& c, double t_hat,
                                     double mu, int eps, int n) {
  double s = gaussian_rescale_factor(t_hat, mu, eps, n);
  DiscreteCurve out;
  out.vertices.reserve(c.vertices.size());
  for (const auto& v : c.vertices) out.vertices.push_back(s * v);
  return out;
}

Vec2 translation_map(Vec2 p0, double t, double mu, int eps, int n) {
  double k = 0.5 * rate_coefficient(mu, eps, n);  // eps n mu^2
  return std::exp(-k * t) * p0;
}

AOBounds validate_ao_bounds(const RadialDensity& d, double r_lo, double r_hi) {
  if (!(0.0 < r_lo && r_lo < r_hi)) throw Error("validate_ao_bounds: bad annulus");
  constexpr int kSamples = 4096;
  AOBounds b;
  b.r_lo = r_lo;
  b.r_hi = r_hi;
  b.weight_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    double r = r_lo + (r_hi - r_lo) * i / (kSamples - 1);
    DensityEval e = d.eval(r);
    b.grad_sup = std::max(b.grad_sup, std::abs(e.dpsi));
    // Hessian eigenvalues of a radial function: psi'' radially, psi'/r
    // tangentially.
    b.hess_sup = std::max({b.hess_sup, std::abs(e.d2psi), std::abs(e.dpsi) / r});
    double w = std::exp(e.psi);
    b.weight_min = std::min(b.weight_min, w);
    b.weight_max = std::max(b.weight_max, w);
  }
  b.all_finite = std::isfinite(b.grad_sup) && std::isfinite(b.hess_sup) &&
                 std::isfinite(b.weight_max) && b.weight_min > 0.0;
  return b;
}

}  // namespace psiflow
