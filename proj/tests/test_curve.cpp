#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "psiflow/curve.hpp"
#include "psiflow/density.hpp"
#include "psiflow/errors.hpp"

using namespace psiflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

DiscreteCurve ellipse(double a, double b, Vec2 center, int n) {
  DiscreteCurve c;
  for (int i = 0; i < n; ++i) {
    double th = 2.0 * kPi * i / n;
    c.vertices.push_back(center + Vec2{a * std::cos(th), b * std::sin(th)});
  }
  return c;
}

// adaptive Simpson quadrature, used as the independent length oracle
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2.0) +
         adaptive_simpson(f, m, b, fm, frm, fb, tol / 2.0);
}

double smooth_ellipse_perimeter(double a, double b) {
  auto speed = [&](double th) {
    double dx = -a * std::sin(th), dy = b * std::cos(th);
    return std::sqrt(dx * dx + dy * dy);
  };
  double lo = 0.0, hi = 2.0 * kPi;
  return adaptive_simpson(speed, lo, hi, speed(lo), speed(0.5 * (lo + hi)),
                          speed(hi), 1e-12);
}

// ray casting oracle for "origin inside the polygon"
bool origin_inside_raycast(const DiscreteCurve& c) {
  const auto& v = c.vertices;
  const int n = c.size();
  bool inside = false;
  for (int i = 0, j = n - 1; i < n; j = i++) {
    bool crosses = (v[i].y > 0.0) != (v[j].y > 0.0);
    if (crosses) {
      double x_at = v[i].x + (0.0 - v[i].y) * (v[j].x - v[i].x) / (v[j].y - v[i].y);
      if (x_at > 0.0) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

TEST_CASE("build_from_polar") {
  auto circle = build_from_polar(1.0, {}, {0.0, 0.0}, 256);
  CHECK(circle.size() == 256);
  for (const auto& p : circle.vertices) CHECK(norm(p) == doctest::Approx(1.0));
  CHECK_NOTHROW(validate_curve(circle));

  auto trefoil = build_from_polar(1.0, {{3, 0.2}}, {0.0, 0.0}, 256);
  CHECK(is_simple(trefoil));

  CHECK_THROWS_AS(build_from_polar(0.5, {{2, 0.6}}, {0.0, 0.0}, 64),
                  DegenerateRadius);
}

TEST_CASE("geometry: weighted curvature on circles") {
  auto crit = RadialDensity::critical_log(1);
  auto circle = build_from_polar(1.0, {}, {0.0, 0.0}, 256);
  auto g = geometry(circle, crit);
  for (double k : g.weighted_curvature) CHECK(std::abs(k) < 1e-3);
  CHECK(g.winding == 1);

  // on an origin-centered circle kpsi = 1/rho + psi'(rho) for every density
  auto gauss = RadialDensity::gaussian(0.8, 1);
  for (double rho : {0.5, 1.0, 2.0}) {
    auto c = build_from_polar(rho, {}, {0.0, 0.0}, 512);
    auto gg = geometry(c, gauss);
    double expected = 1.0 / rho + gauss.eval(rho).dpsi;
    for (double k : gg.weighted_curvature)
      CHECK(k == doctest::Approx(expected).epsilon(1e-4));
  }
}

TEST_CASE("geometry: winding") {
  auto off = build_from_polar(2.0, {}, {5.0, 0.0}, 128);
  auto flat = RadialDensity::flat();
  CHECK(geometry(off, flat).winding == 0);
  auto at_origin = build_from_polar(1.0, {}, {0.0, 0.0}, 128);
  CHECK(geometry(at_origin, flat).winding == 1);
}

TEST_CASE("geometry: winding matches ray casting on random star curves") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  auto flat = RadialDensity::flat();
  for (int trial = 0; trial < 40; ++trial) {
    Vec2 center{shift(rng), shift(rng)};
    auto c = build_from_polar(1.0, {{4, 0.18}, {2, 0.1}}, center, 128);
    double dist_origin = norm(center);
    if (std::abs(dist_origin - 1.0) < 0.35) continue;  // keep away from the boundary
    auto g = geometry(c, flat);
    CHECK((g.winding == 0 || g.winding == 1));
    CHECK((g.winding == 1) == origin_inside_raycast(c));
  }
}

TEST_CASE("geometry: curvature and area converge at second order on circles") {
  for (double rho : {0.5, 1.0, 2.0}) {
    double prev_keps = 0.0, prev_aeps = 0.0;
    for (int j = 6; j <= 10; ++j) {
      int n = 1 << j;
      auto c = build_from_polar(rho, {}, {0.0, 0.0}, n);
      auto g = geometry(c, RadialDensity::flat());
      double keps = 0.0;
      for (double k : g.curvature) keps = std::max(keps, std::abs(k - 1.0 / rho));
      double aeps = std::abs(g.area - kPi * rho * rho);
      if (j > 6) {
        CHECK(std::log2(prev_keps / keps) > 1.9);
        CHECK(std::log2(prev_aeps / aeps) > 1.9);
      }
      prev_keps = keps;
      prev_aeps = aeps;
    }
  }
}

TEST_CASE("geometry: velocity kpsi*N is orientation independent") {
  auto gauss = RadialDensity::gaussian(1.0, 1);
  auto c = build_from_polar(1.0, {{3, 0.2}}, {0.4, -0.2}, 64);
  auto g = geometry(c, gauss);

  DiscreteCurve rev;
  for (int i = c.size() - 1; i >= 0; --i) rev.vertices.push_back(c.vertices[i]);
  auto gr = geometry(rev, gauss);

  for (int i = 0; i < c.size(); ++i) {
    int j = c.size() - 1 - i;
    Vec2 v_fwd = g.weighted_curvature[i] * g.normal[i];
    Vec2 v_rev = gr.weighted_curvature[j] * gr.normal[j];
    CHECK(std::abs(v_fwd.x - v_rev.x) < 1e-12);
    CHECK(std::abs(v_fwd.y - v_rev.y) < 1e-12);
  }
}

TEST_CASE("resample_uniform: fixed point and idempotency") {
  auto circle = build_from_polar(1.0, {}, {0.0, 0.0}, 256);
  auto once = resample_uniform(circle, 256);
  for (int i = 0; i < 256; ++i)
    CHECK(norm(once.vertices[i] - circle.vertices[i]) < 1e-9);

  auto blob = build_from_polar(1.0, {{2, 0.3}, {5, 0.05}}, {0.0, 0.0}, 64);
  auto r1 = resample_uniform(blob, 96);
  auto r2 = resample_uniform(r1, 96);
  for (int i = 0; i < 96; ++i)
    CHECK(norm(r2.vertices[i] - r1.vertices[i]) < 1e-12);
}

TEST_CASE("resample_uniform: ellipse length against smooth-perimeter oracle") {
  double oracle = smooth_ellipse_perimeter(2.0, 1.0);
  auto coarse = ellipse(2.0, 1.0, {0.0, 0.0}, 64);
  auto fine = resample_uniform(coarse, 256);
  double len = curve_length(fine);
  CHECK(std::abs(len - oracle) / oracle < 1e-3);
  // resampling alone moves the polygon length by less than (2pi/N)^2 relative
  CHECK(std::abs(len - curve_length(coarse)) / curve_length(coarse) <
        (2.0 * kPi / 256) * (2.0 * kPi / 256));
}

TEST_CASE("is_simple") {
  CHECK(is_simple(build_from_polar(1.0, {}, {0.0, 0.0}, 64)));
  CHECK(is_simple(build_from_polar(1.0, {{3, 0.2}}, {0.0, 0.0}, 128)));

  DiscreteCurve eight;
  for (int i = 0; i < 64; ++i) {
    double th = 2.0 * kPi * i / 64;
    eight.vertices.push_back({std::sin(2.0 * th), std::sin(th)});
  }
  CHECK_FALSE(is_simple(eight));
}

TEST_CASE("hausdorff_distance") {
  auto a = build_from_polar(1.0, {}, {0.0, 0.0}, 512);
  CHECK(hausdorff_distance(a, a) == 0.0);

  auto b = build_from_polar(1.1, {}, {0.0, 0.0}, 512);
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.1).epsilon(1e-3));

  auto c = build_from_polar(1.0, {}, {3.0, 0.0}, 512);
  CHECK(hausdorff_distance(a, c) == doctest::Approx(3.0).epsilon(1e-3));

  // brute-force oracle over vertex pairs and projections
  double brute = 0.0;
  for (const auto& p : a.vertices) {
    double best = 1e300;
    for (int i = 0; i < c.size(); ++i) {
      Vec2 u = c.vertices[i];
      Vec2 w = c.vertices[(i + 1) % c.size()];
      Vec2 uw = w - u;
      double t = std::clamp(dot(p - u, uw) / norm2(uw), 0.0, 1.0);
      best = std::min(best, norm(p - (u + t * uw)));
    }
    brute = std::max(brute, best);
  }
  CHECK(hausdorff_distance(a, c) >= brute - 1e-12);
}

TEST_CASE("geometry: singular proximity guards") {
  auto crit = RadialDensity::critical_log(1);
  // one vertex exactly at the origin
  auto touching = build_from_polar(0.45, {}, {0.45, 0.0}, 64);
  CHECK_THROWS_AS(geometry(touching, crit), SingularProximity);
  // inside an explicit guard
  auto near = build_from_polar(0.5, {}, {0.45, 0.0}, 64);
  CHECK_THROWS_AS(geometry(near, crit, 0.2), SingularProximity);
  CHECK_NOTHROW(geometry(near, crit, 0.01));
}

TEST_CASE("validate_curve rejects degenerate input") {
  DiscreteCurve tiny;
  tiny.vertices = {{0, 0}, {1, 0}, {1, 1}};
  CHECK_THROWS_AS(validate_curve(tiny), InvalidCurve);

  // clockwise orientation
  DiscreteCurve cw;
  for (int i = 0; i < 16; ++i) {
    double th = -2.0 * kPi * i / 16;
    cw.vertices.push_back({std::cos(th), std::sin(th)});
  }
  CHECK_THROWS_AS(validate_curve(cw), InvalidCurve);
}
