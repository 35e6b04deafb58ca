#include "psiflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "psiflow/errors.hpp"

namespace psiflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline int wrap(int i, int n) { return (i % n + n) % n; }

}  // namespace

DiscreteCurve build_from_polar(double rho0,
                               const std::vector<std::pair<int, double>>& modes,
                               Vec2 center, int n_vertices) {
  double amp_sum = 0.0;
  for (const auto& [m, a] : modes) amp_sum += std::abs(a);
  if (!(rho0 > amp_sum))
    throw DegenerateRadius("polar curve needs rho0 > sum of |amplitudes|");
  if (n_vertices < 8) throw InvalidCurve("need at least 8 vertices");

  DiscreteCurve c;
  c.vertices.reserve(n_vertices);
  for (int i = 0; i < n_vertices; ++i) {
    double theta = 2.0 * kPi * i / n_vertices;
    double r = rho0;
    for (const auto& [m, a] : modes) r += a * std::cos(m * theta);
    c.vertices.push_back(center + Vec2{r * std::cos(theta), r * std::sin(theta)});
  }
  return c;
}

DiscreteCurve circle_polygon(double radius, Vec2 center, int n_vertices) {
  return build_from_polar(radius, {}, center, n_vertices);
}

double signed_area(const DiscreteCurve& c) {
  const auto& v = c.vertices;
  const int n = c.size();
  double twice = 0.0;
  for (int i = 0; i < n; ++i) twice += cross(v[i], v[wrap(i + 1, n)]);
  return 0.5 * twice;
}

double curve_length(const DiscreteCurve& c) {
  const auto& v = c.vertices;
  const int n = c.size();
  double len = 0.0;
  for (int i = 0; i < n; ++i) len += norm(v[wrap(i + 1, n)] - v[i]);
  return len;
}

Vec2 area_centroid(const DiscreteCurve& c) {
  const auto& v = c.vertices;
  const int n = c.size();
  double twice = 0.0;
  Vec2 acc{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[wrap(i + 1, n)];
    double w = cross(p, q);
    twice += w;
    acc = acc + w * (p + q);
  }
  if (twice == 0.0) {  // degenerate polygon: fall back to the vertex mean
    Vec2 mean{0.0, 0.0};
    for (const auto& p : v) mean = mean + p;
    return (1.0 / n) * mean;
  }
  return (1.0 / (3.0 * twice)) * acc;
}

double curve_diameter(const DiscreteCurve& c) {
  const auto& v = c.vertices;
  const int n = c.size();
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) best = std::max(best, norm2(v[i] - v[j]));
  return std::sqrt(best);
}

void validate_curve(const DiscreteCurve& c) {
  const int n = c.size();
  if (n < 8) throw InvalidCurve("curve needs at least 8 vertices");
  double diam = curve_diameter(c);
  for (int i = 0; i < n; ++i) {
    double h = norm(c.vertices[wrap(i + 1, n)] - c.vertices[i]);
    if (!(h > 1e-14 * diam))
      throw InvalidCurve("consecutive vertices coincide");
  }
  if (!(signed_area(c) > 0.0))
    throw InvalidCurve("curve must be positively oriented (signed area > 0)");
}

CurveGeometry geometry(const DiscreteCurve& c, const RadialDensity& d,
                       double origin_guard) {
  const auto& v = c.vertices;
  const int n = c.size();
  if (n < 3) throw InvalidCurve("geometry needs a closed polygon");

  CurveGeometry g;
  g.edge_length.resize(n);
  g.arclength.resize(n);
  g.tangent.resize(n);
  g.normal.resize(n);
  g.curvature.resize(n);
  g.weighted_curvature.resize(n);

  g.r_min = std::numeric_limits<double>::infinity();
  g.r_max = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = norm(v[i]);
    g.r_min = std::min(g.r_min, r);
    g.r_max = std::max(g.r_max, r);
  }
  if (d.singular_at_origin()) {
    if (g.r_min <= 1e-14 * g.r_max)
      throw SingularProximity("curve touches the origin of a singular density");
    if (origin_guard > 0.0 && g.r_min < origin_guard)
      throw SingularProximity("vertex inside the origin guard of a singular density");
  }

  for (int i = 0; i < n; ++i) {
    g.edge_length[i] = norm(v[wrap(i + 1, n)] - v[i]);
    if (g.edge_length[i] == 0.0) throw InvalidCurve("zero-length edge");
  }
  g.arclength[0] = 0.0;
  for (int i = 1; i < n; ++i) g.arclength[i] = g.arclength[i - 1] + g.edge_length[i - 1];
  g.length = g.arclength[n - 1] + g.edge_length[n - 1];

  double winding_angle = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 e_prev = v[i] - v[wrap(i - 1, n)];
    const Vec2 e_next = v[wrap(i + 1, n)] - v[i];

    Vec2 chord = v[wrap(i + 1, n)] - v[wrap(i - 1, n)];
    double cn = norm(chord);
    g.tangent[i] = cn > 0.0 ? (1.0 / cn) * chord : normalized(e_next);
    g.normal[i] = rot90(g.tangent[i]);

    double turn = std::atan2(cross(e_prev, e_next), dot(e_prev, e_next));
    double mean_edge = 0.5 * (g.edge_length[wrap(i - 1, n)] + g.edge_length[i]);
    g.curvature[i] = turn / mean_edge;

    Vec2 gp = d.grad(v[i]);
    g.weighted_curvature[i] = g.curvature[i] - dot(gp, g.normal[i]);

    winding_angle += std::atan2(cross(v[i], v[wrap(i + 1, n)]),
                                dot(v[i], v[wrap(i + 1, n)]));
  }

  double turns = winding_angle / (2.0 * kPi);
  double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.1)
    throw WindingInconsistency("winding angle sum is not near an integer");
  g.winding = static_cast<int>(rounded);

  g.area = signed_area(c);

  double l_psi = 0.0, int_kpsi = 0.0, int_kpsi2 = 0.0, max_abs = 0.0;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = d.weight(norm(v[i]));
  for (int i = 0; i < n; ++i) {
    l_psi += 0.5 * (w[i] + w[wrap(i + 1, n)]) * g.edge_length[i];
    double ds_vertex = 0.5 * (g.edge_length[wrap(i - 1, n)] + g.edge_length[i]);
    double kpsi = g.weighted_curvature[i];
    int_kpsi += kpsi * ds_vertex;
    int_kpsi2 += kpsi * kpsi * w[i] * ds_vertex;
    max_abs = std::max(max_abs, std::abs(kpsi));
  }
  g.weighted_length = l_psi;
  g.int_kpsi_ds = int_kpsi;
  g.int_kpsi2_dspsi = int_kpsi2;
  g.max_abs_kpsi = max_abs;
  return g;
}

namespace {

// One equal-arclength sampling pass along the input polyline, anchored at
// vertices.front().
DiscreteCurve resample_pass(const DiscreteCurve& c, int n_out) {
  const auto& v = c.vertices;
  const int n = c.size();
  std::vector<double> cum(n + 1, 0.0);
  for (int i = 0; i < n; ++i)
    cum[i + 1] = cum[i] + norm(v[wrap(i + 1, n)] - v[i]);
  const double total = cum[n];

  DiscreteCurve out;
  out.vertices.resize(n_out);
  int seg = 0;
  for (int j = 0; j < n_out; ++j) {
    double target = total * j / n_out;
    while (seg + 1 < n && cum[seg + 1] < target) ++seg;
    double seg_len = cum[seg + 1] - cum[seg];
    double t = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    out.vertices[j] = v[seg] + t * (v[wrap(seg + 1, n)] - v[seg]);
  }
  return out;
}

}  // namespace

DiscreteCurve resample_uniform(const DiscreteCurve& c, int n_vertices) {
  if (n_vertices < 8) throw InvalidCurve("resample target below 8 vertices");
  double xmin = c.vertices[0].x, xmax = xmin, ymin = c.vertices[0].y, ymax = ymin;
  for (const auto& v : c.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  const double scale = std::max(1.0, std::hypot(xmax - xmin, ymax - ymin));

  DiscreteCurve cur = resample_pass(c, n_vertices);
  double prev_moved = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < 20; ++pass) {
    DiscreteCurve next = resample_pass(cur, n_vertices);
    double moved = 0.0;
    for (int i = 0; i < n_vertices; ++i)
      moved = std::max(moved, norm(next.vertices[i] - cur.vertices[i]));
    cur = std::move(next);
    if (moved < 1e-13 * scale) break;
    if (moved < 1e-9 * scale && moved > 0.5 * prev_moved) break;  // roundoff floor
    prev_moved = moved;
  }
  return cur;
}

namespace {

inline double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

inline bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  double o1 = orient(p1, p2, q1);
  double o2 = orient(p1, p2, q2);
  double o3 = orient(q1, q2, p1);
  double o4 = orient(q1, q2, p2);
  if (((o1 > 0.0) != (o2 > 0.0)) && ((o3 > 0.0) != (o4 > 0.0)) &&
      o1 != 0.0 && o2 != 0.0 && o3 != 0.0 && o4 != 0.0)
    return true;
  if (o1 == 0.0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0.0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0.0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0.0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

bool is_simple(const DiscreteCurve& c) {
  const auto& v = c.vertices;
  const int n = c.size();
  if (n < 3) return false;

  struct EdgeBox {
    int i;
    double xmin, xmax, ymin, ymax;
  };
  std::vector<EdgeBox> boxes(n);
  for (int i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[wrap(i + 1, n)];
    boxes[i] = {i, std::min(a.x, b.x), std::max(a.x, b.x),
                std::min(a.y, b.y), std::max(a.y, b.y)};
  }
  std::sort(boxes.begin(), boxes.end(),
            [](const EdgeBox& a, const EdgeBox& b) { return a.xmin < b.xmin; });

  for (int bi = 0; bi < n; ++bi) {
    const EdgeBox& e = boxes[bi];
    for (int bj = bi + 1; bj < n; ++bj) {
      const EdgeBox& f = boxes[bj];
      if (f.xmin > e.xmax) break;  // sorted by xmin: no later box overlaps
      if (f.ymin > e.ymax || e.ymin > f.ymax) continue;
      int i = e.i, j = f.i;
      int lo = std::min(i, j), hi = std::max(i, j);
      if (hi - lo == 1 || (lo == 0 && hi == n - 1)) continue;  // adjacent
      if (segments_intersect(v[i], v[wrap(i + 1, n)], v[j], v[wrap(j + 1, n)]))
        return false;
    }
  }
  return true;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = norm2(ab);
  if (len2 == 0.0) return norm(p - a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double point_to_polyline(Vec2 p, const DiscreteCurve& c) {
  const auto& v = c.vertices;
  const int n = c.size();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    best = std::min(best, point_segment_distance(p, v[i], v[wrap(i + 1, n)]));
  return best;
}

}  // namespace

double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  double d_ab = 0.0, d_ba = 0.0;
  for (const auto& p : a.vertices) d_ab = std::max(d_ab, point_to_polyline(p, b));
  for (const auto& p : b.vertices) d_ba = std::max(d_ba, point_to_polyline(p, a));
  return std::max(d_ab, d_ba);
}

double min_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.vertices) best = std::min(best, point_to_polyline(p, b));
  for (const auto& p : b.vertices) best = std::min(best, point_to_polyline(p, a));
  return best;
}

}  // namespace psiflow
