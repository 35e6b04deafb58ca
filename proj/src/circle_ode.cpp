#include "psiflow/circle_ode.hpp"

#include <cmath>

#include "psiflow/errors.hpp"

namespace psiflow {

namespace {

constexpr double kRadiusFloor = 1e-6;
constexpr double kUFloor = kRadiusFloor * kRadiusFloor;
constexpr double kRadiusCeil = 1e6;

// du/dt for u = r^2
double rhs_u(const RadialDensity& d, int n, double u) {
  double uc = std::max(u, 0.0);
  double r = std::sqrt(uc);
  return -2.0 * (static_cast<double>(n) + d.radial_slope_times_r(r));
}

double rk4_u(const RadialDensity& d, int n, double u, double dt) {
  double k1 = rhs_u(d, n, u);
  double k2 = rhs_u(d, n, u + 0.5 * dt * k1);
  double k3 = rhs_u(d, n, u + 0.5 * dt * k2);
  double k4 = rhs_u(d, n, u + dt * k3);
  return u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Root of the cubic Hermite interpolant of u on [t0, t0+dt] at level u_star.
double hermite_root(double t0, double u0, double f0, double dt, double u1,
                    double f1, double u_star) {
  auto value = [&](double tau) {
    double h00 = (1.0 + 2.0 * tau) * (1.0 - tau) * (1.0 - tau);
    double h10 = tau * (1.0 - tau) * (1.0 - tau);
    double h01 = tau * tau * (3.0 - 2.0 * tau);
    double h11 = tau * tau * (tau - 1.0);
    return h00 * u0 + h10 * dt * f0 + h01 * u1 + h11 * dt * f1 - u_star;
  };
  double lo = 0.0, hi = 1.0;
  // u0 > u_star >= u1 along the final step
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (value(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return t0 + 0.5 * (lo + hi) * dt;
}

}  // namespace

double radial_drift(const RadialDensity& d, int n, double r) {
  if (!(r > 0.0)) throw Error("radial_drift: r must be positive");
  return -(static_cast<double>(n) / r + d.eval(r).dpsi);
}

OdeResult integrate_radius(double r0, const RadialDensity& d, int n,
                           double t_end, double tol) {
  if (!(r0 > 0.0)) throw Error("integrate_radius: r0 must be positive");
  OdeResult out;
  out.path.push_back({0.0, r0});
  if (t_end <= 0.0) return out;

  double u = r0 * r0;
  double t = 0.0;
  double dt = std::min(0.01 * std::max(1.0, std::abs(u)), t_end);

  while (t < t_end) {
    dt = std::min(dt, t_end - t);
    double full = rk4_u(d, n, u, dt);
    double half = rk4_u(d, n, u, 0.5 * dt);
    double two_half = rk4_u(d, n, half, 0.5 * dt);
    double err = std::abs(two_half - full) / 15.0;
    double scale = tol * std::max(1.0, std::abs(u));
    if (err > scale) {
      dt *= std::max(0.1, 0.9 * std::pow(scale / std::max(err, 1e-300), 0.2));
      continue;
    }
    double u_new = two_half + (two_half - full) / 15.0;
    double t_new = t + dt;

    if (u_new > kRadiusCeil * kRadiusCeil)
      throw BlowUp("circle radius exceeded 1e6");

    if (u_new <= kUFloor) {
      double f0 = rhs_u(d, n, u);
      double f1 = rhs_u(d, n, u_new);
      double t_star = hermite_root(t, u, f0, dt, u_new, f1, kUFloor);
      out.path.push_back({t_star, kRadiusFloor});
      out.extinct = true;
      out.extinction_time = t_star;
      return out;
    }

    u = u_new;
    t = t_new;
    out.path.push_back({t, std::sqrt(u)});
    if (err > 0.0)
      dt *= std::min(5.0, std::max(0.2, 0.9 * std::pow(scale / err, 0.2)));
    else
      dt *= 5.0;
  }
  return out;
}

namespace {

struct LinearOde {
  // u' = -c - lambda u
  double c;
  double lambda;
};

LinearOde closed_form_coefficients(const RadialDensity& d, int n) {
  double nn = static_cast<double>(n);
  double nd = static_cast<double>(d.n());
  switch (d.family()) {
    case DensityFamily::critical_log:
      return {2.0 * (nn - nd), 0.0};
    case DensityFamily::gaussian:
      return {2.0 * nn, -2.0 * nd * d.mu() * d.mu()};
    case DensityFamily::anti_gaussian:
      return {2.0 * nn, 2.0 * nd * d.mu() * d.mu()};
    case DensityFamily::quadratic_log:
      return {2.0 * (nn + d.a()), d.lambda()};
    case DensityFamily::flat:
      return {2.0 * nn, 0.0};
    case DensityFamily::tabulated:
      throw NoClosedForm("tabulated densities have no closed-form circle solution");
  }
  throw NoClosedForm("unknown family");
}

}  // namespace

std::optional<double> exact_extinction_time(const RadialDensity& d, int n,
                                            double r0) {
  if (!(r0 > 0.0)) throw Error("exact_extinction_time: r0 must be positive");
  auto [c, lambda] = closed_form_coefficients(d, n);
  double u0 = r0 * r0;
  if (lambda == 0.0) {
    if (c <= 0.0) return std::nullopt;
    return u0 / c;
  }
  if (!(c > 0.0) || !(c + lambda * u0 > 0.0)) return std::nullopt;
  return std::log(1.0 + lambda * u0 / c) / lambda;
}

double exact_radius(const RadialDensity& d, int n, double r0, double t) {
  if (!(r0 > 0.0)) throw Error("exact_radius: r0 must be positive");
  auto [c, lambda] = closed_form_coefficients(d, n);
  double u0 = r0 * r0;
  double u;
  if (lambda == 0.0) {
    u = u0 - c * t;
  } else {
    double u_star = -c / lambda;  // fixed point
    u = (u0 - u_star) * std::exp(-lambda * t) + u_star;
  }
  return u > 0.0 ? std::sqrt(u) : 0.0;
}

PhasePortrait phase_portrait(const RadialDensity& d, int n, double r_lo,
                             double r_hi, int samples) {
  if (!(0.0 < r_lo && r_lo < r_hi)) throw Error("phase_portrait: bad interval");
  if (samples < 2) throw Error("phase_portrait: need >= 2 samples");
  PhasePortrait out;
  out.crossings = find_crossings(d, n, r_lo, r_hi);
  out.rows.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    double r = r_lo + (r_hi - r_lo) * i / (samples - 1);
    CircleClass cc = classify_circle(d, n, r);
    out.rows.push_back({r, cc.drift, cc.verdict});
  }
  return out;
}

}  // namespace psiflow
