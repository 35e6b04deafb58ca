#include "psiflow/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psiflow/errors.hpp"

namespace psiflow {

RadialDensity RadialDensity::critical_log(int n, double b) {
  RadialDensity d;
  d.family_ = DensityFamily::critical_log;
  d.singular_ = true;
  d.n_ = n;
  d.b_ = b;
  return d;
}

RadialDensity RadialDensity::gaussian(double mu, int n) {
  RadialDensity d;
  d.family_ = DensityFamily::gaussian;
  d.n_ = n;
  d.mu_ = mu;
  return d;
}

RadialDensity RadialDensity::anti_gaussian(double mu, int n) {
  RadialDensity d;
  d.family_ = DensityFamily::anti_gaussian;
  d.n_ = n;
  d.mu_ = mu;
  return d;
}

RadialDensity RadialDensity::quadratic_log(double lambda, double a, double b,
                                           int n) {
  RadialDensity d;
  d.family_ = DensityFamily::quadratic_log;
  d.singular_ = (a != 0.0);
  d.n_ = n;
  d.lambda_ = lambda;
  d.a_ = a;
  d.b_ = b;
  return d;
}

RadialDensity RadialDensity::flat() { return RadialDensity{}; }

RadialDensity RadialDensity::tabulated(std::vector<double> r,
                                       std::vector<double> psi,
                                       bool singular_at_origin) {
  if (r.size() < 4 || r.size() != psi.size())
    throw Error("tabulated density needs >= 4 matching (r, psi) samples");
  for (std::size_t i = 0; i + 1 < r.size(); ++i)
    if (!(r[i] < r[i + 1]))
      throw Error("tabulated density grid must be strictly increasing");
  if (r.front() <= 0.0) throw Error("tabulated density grid must have r > 0");

  RadialDensity d;
  d.family_ = DensityFamily::tabulated;
  d.singular_ = singular_at_origin;
  d.grid_r_ = std::move(r);
  d.grid_psi_ = std::move(psi);

  // natural cubic spline: solve for second derivatives m_i with m_0 = m_last = 0
  const std::size_t n = d.grid_r_.size();
  std::vector<double> m(n, 0.0), c(n, 0.0), diag(n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double h0 = d.grid_r_[i] - d.grid_r_[i - 1];
    double h1 = d.grid_r_[i + 1] - d.grid_r_[i];
    diag[i] = 2.0 * (h0 + h1);
    rhs[i] = 6.0 * ((d.grid_psi_[i + 1] - d.grid_psi_[i]) / h1 -
                    (d.grid_psi_[i] - d.grid_psi_[i - 1]) / h0);
  }
  // Thomas algorithm on the interior rows
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double h0 = d.grid_r_[i] - d.grid_r_[i - 1];
    if (i > 1) {
      double w = h0 / diag[i - 1];
      diag[i] -= w * h0;
      rhs[i] -= w * rhs[i - 1];
    }
    c[i] = d.grid_r_[i + 1] - d.grid_r_[i];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    double upper = (i + 2 < n) ? c[i] * m[i + 1] : 0.0;
    m[i] = (rhs[i] - upper) / diag[i];
    if (i == 1) break;
  }
  d.grid_m_ = std::move(m);
  return d;
}

DensityEval RadialDensity::eval_spline(double r) const {
  const auto& xs = grid_r_;
  const auto& ys = grid_psi_;
  const auto& ms = grid_m_;
  const std::size_t n = xs.size();
  // linear extension beyond the grid, psi'' = 0 there
  if (r <= xs.front()) {
    double h = xs[1] - xs[0];
    double slope = (ys[1] - ys[0]) / h - h / 6.0 * (2.0 * ms[0] + ms[1]);
    return {ys.front() + slope * (r - xs.front()), slope, 0.0};
  }
  if (r >= xs.back()) {
    double h = xs[n - 1] - xs[n - 2];
    double slope = (ys[n - 1] - ys[n - 2]) / h + h / 6.0 * (ms[n - 2] + 2.0 * ms[n - 1]);
    return {ys.back() + slope * (r - xs.back()), slope, 0.0};
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), r);
  std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  double h = xs[i + 1] - xs[i];
  double u = xs[i + 1] - r, v = r - xs[i];
  double psi = (ms[i] * u * u * u + ms[i + 1] * v * v * v) / (6.0 * h) +
               (ys[i] / h - ms[i] * h / 6.0) * u +
               (ys[i + 1] / h - ms[i + 1] * h / 6.0) * v;
  double dpsi = (-ms[i] * u * u + ms[i + 1] * v * v) / (2.0 * h) -
                (ys[i] / h - ms[i] * h / 6.0) +
                (ys[i + 1] / h - ms[i + 1] * h / 6.0);
  double d2psi = (ms[i] * u + ms[i + 1] * v) / h;
  return {psi, dpsi, d2psi};
}

DensityEval RadialDensity::eval(double r) const {
  if (r < 0.0) throw Error("density evaluated at negative radius");
  if (r == 0.0 && singular_)
    throw EvalAtSingularity("density singular at the origin");
  switch (family_) {
    case DensityFamily::critical_log: {
      double nn = static_cast<double>(n_);
      return {-nn * std::log(r) + b_, -nn / r, nn / (r * r)};
    }
    case DensityFamily::gaussian: {
      double c = static_cast<double>(n_) * mu_ * mu_;
      return {-0.5 * c * r * r, -c * r, -c};
    }
    case DensityFamily::anti_gaussian: {
      double c = static_cast<double>(n_) * mu_ * mu_;
      return {0.5 * c * r * r, c * r, c};
    }
    case DensityFamily::quadratic_log: {
      double psi = lambda_ * r * r / 4.0 + b_;
      double dpsi = lambda_ * r / 2.0;
      double d2psi = lambda_ / 2.0;
      if (a_ != 0.0) {
        psi += a_ * std::log(r);
        dpsi += a_ / r;
        d2psi -= a_ / (r * r);
      }
      return {psi, dpsi, d2psi};
    }
    case DensityFamily::flat:
      return {0.0, 0.0, 0.0};
    case DensityFamily::tabulated:
      return eval_spline(r);
  }
  throw Error("unreachable density family");
}

double RadialDensity::weight(double r) const { return std::exp(eval(r).psi); }

Vec2 RadialDensity::grad(Vec2 p) const {
  double r = norm(p);
  if (r == 0.0) {
    if (singular_) throw EvalAtSingularity("grad psi at the origin of a singular density");
    return {0.0, 0.0};  // radial smooth density has vanishing gradient at 0
  }
  double dpsi = eval(r).dpsi;
  return (dpsi / r) * p;
}

double RadialDensity::hess_nn(Vec2 p, Vec2 nu) const {
  double r = norm(p);
  if (r == 0.0)
    throw EvalAtSingularity("hessian of psi at the origin");
  if (std::abs(norm(nu) - 1.0) > 1e-12)
    throw Error("hess_nn requires a unit direction");
  DensityEval e = eval(r);
  double c = dot(p, nu) / r;
  double c2 = c * c;
  return e.d2psi * c2 + (e.dpsi / r) * (1.0 - c2);
}

double RadialDensity::radial_slope_times_r(double r) const {
  switch (family_) {
    case DensityFamily::critical_log:
      return -static_cast<double>(n_);
    case DensityFamily::gaussian:
      return -static_cast<double>(n_) * mu_ * mu_ * r * r;
    case DensityFamily::anti_gaussian:
      return static_cast<double>(n_) * mu_ * mu_ * r * r;
    case DensityFamily::quadratic_log:
      return lambda_ * r * r / 2.0 + a_;
    case DensityFamily::flat:
      return 0.0;
    case DensityFamily::tabulated:
      return r > 0.0 ? r * eval(r).dpsi : 0.0;
  }
  return 0.0;
}

std::string RadialDensity::describe() const {
  std::ostringstream os;
  switch (family_) {
    case DensityFamily::critical_log:
      os << "critical_log(n=" << n_ << ", b=" << b_ << ")";
      break;
    case DensityFamily::gaussian:
      os << "gaussian(mu=" << mu_ << ", n=" << n_ << ")";
      break;
    case DensityFamily::anti_gaussian:
      os << "anti_gaussian(mu=" << mu_ << ", n=" << n_ << ")";
      break;
    case DensityFamily::quadratic_log:
      os << "quadratic_log(lambda=" << lambda_ << ", a=" << a_ << ", b=" << b_ << ")";
      break;
    case DensityFamily::flat:
      os << "flat";
      break;
    case DensityFamily::tabulated:
      os << "tabulated(" << grid_r_.size() << " samples)";
      break;
  }
  return os.str();
}

namespace {

double crossing_g(const RadialDensity& d, int n, double r) {
  return d.eval(r).dpsi + static_cast<double>(n) / r;
}

double crossing_g_slope(const RadialDensity& d, int n, double r) {
  return d.eval(r).d2psi - static_cast<double>(n) / (r * r);
}

}  // namespace

CrossingSet find_crossings(const RadialDensity& d, int n, double r_lo,
                           double r_hi, int grid_points) {
  if (!(0.0 < r_lo && r_lo < r_hi)) throw Error("find_crossings: bad interval");
  if (grid_points < 16) throw Error("find_crossings: need >= 16 grid points");

  CrossingSet out;
  out.r_lo = r_lo;
  out.r_hi = r_hi;

  // The critical density is flagged symbolically so the degenerate case is
  // exact rather than a numerical accident.
  if (d.family() == DensityFamily::critical_log && d.n() == n) {
    out.degenerate = true;
    return out;
  }

  const bool log_spaced = d.singular_at_origin();
  auto grid_at = [&](int i) {
    double t = static_cast<double>(i) / (grid_points - 1);
    if (log_spaced) return r_lo * std::pow(r_hi / r_lo, t);
    return r_lo + (r_hi - r_lo) * t;
  };

  double max_abs_g = 0.0;
  double prev_r = grid_at(0);
  double prev_g = crossing_g(d, n, prev_r);
  max_abs_g = std::abs(prev_g);

  for (int i = 1; i < grid_points; ++i) {
    double r = grid_at(i);
    double g = crossing_g(d, n, r);
    max_abs_g = std::max(max_abs_g, std::abs(g));

    bool bracketed = (prev_g < 0.0 && g > 0.0) || (prev_g > 0.0 && g < 0.0) ||
                     prev_g == 0.0;
    if (bracketed && !(prev_g == 0.0 && g == 0.0)) {
      double lo = prev_r, hi = r;
      double glo = prev_g;
      double mid = 0.5 * (lo + hi), gmid = 0.0;
      for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        gmid = crossing_g(d, n, mid);
        double slope = crossing_g_slope(d, n, mid);
        if (std::abs(gmid) < 1e-12 * std::max(1.0, std::abs(slope))) break;
        if ((glo <= 0.0) == (gmid <= 0.0)) {
          lo = mid;
          glo = gmid;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-16 * std::max(1.0, mid)) break;
      }
      double slope = crossing_g_slope(d, n, mid);
      Crossing cr;
      cr.r = mid;
      cr.transversal = std::abs(slope) > kTransversalTolerance;
      // drift = -g flips sign opposite to g
      cr.sign_change = (prev_g > 0.0) ? Crossing::DriftChange::minus_to_plus
                                      : Crossing::DriftChange::plus_to_minus;
      if (out.zeros.empty() || cr.r > out.zeros.back().r + 1e-14)
        out.zeros.push_back(cr);
    }
    prev_r = r;
    prev_g = g;
  }

  if (max_abs_g < 1e-12) {
    out.degenerate = true;
    out.zeros.clear();
  }
  return out;
}

const char* to_string(CircleVerdict v) {
  switch (v) {
    case CircleVerdict::psi_minimal_attractor: return "psi_minimal_attractor";
    case CircleVerdict::psi_minimal_repulsor: return "psi_minimal_repulsor";
    case CircleVerdict::psi_minimal_semistable: return "psi_minimal_semistable";
    case CircleVerdict::shrinking: return "shrinking";
    case CircleVerdict::expanding: return "expanding";
  }
  return "?";
}

CircleClass classify_circle(const RadialDensity& d, int n, double r) {
  if (!(r > 0.0)) throw Error("classify_circle: r must be positive");
  double g = crossing_g(d, n, r);
  double drift = -g;
  CircleClass out;
  out.drift = drift;
  if (drift < -kDriftTolerance) {
    out.verdict = CircleVerdict::shrinking;
  } else if (drift > kDriftTolerance) {
    out.verdict = CircleVerdict::expanding;
  } else {
    double drift_slope = -crossing_g_slope(d, n, r);
    if (drift_slope < -kTransversalTolerance)
      out.verdict = CircleVerdict::psi_minimal_attractor;
    else if (drift_slope > kTransversalTolerance)
      out.verdict = CircleVerdict::psi_minimal_repulsor;
    else
      out.verdict = CircleVerdict::psi_minimal_semistable;
  }
  return out;
}

bool stability_second_variation(const RadialDensity& d, int n, double r) {
  if (!(r > 0.0)) throw Error("stability_second_variation: r must be positive");
  double g = crossing_g(d, n, r);
  if (std::abs(g) >= kDriftTolerance)
    throw NotMinimalRadius("radius is not psi-minimal: |psi' + n/r| = " +
                           std::to_string(std::abs(g)));
  // On a sphere the squared second fundamental form equals n/r^2; strict
  // stability demands psi'' to beat it.
  return d.eval(r).d2psi > static_cast<double>(n) / (r * r);
}

}  // namespace psiflow
