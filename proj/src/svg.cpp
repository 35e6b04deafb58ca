#include "psiflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "psiflow/errors.hpp"

namespace psiflow {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// early snapshots blue, late ones red
std::string time_color(double frac) {
  int r = static_cast<int>(30 + 200 * frac);
  int g = 60;
  int b = static_cast<int>(230 - 200 * frac);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_curve_overlay_svg(
    const std::string& path,
    const std::vector<std::pair<double, DiscreteCurve>>& snapshots,
    std::optional<double> limit_circle_radius) {
  if (snapshots.empty()) throw Error("no snapshots to plot");

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [t, c] : snapshots) {
    for (const auto& v : c.vertices) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  }
  if (limit_circle_radius) {
    xmin = std::min(xmin, -*limit_circle_radius);
    xmax = std::max(xmax, *limit_circle_radius);
    ymin = std::min(ymin, -*limit_circle_radius);
    ymax = std::max(ymax, *limit_circle_radius);
  }
  double span = std::max(xmax - xmin, ymax - ymin);
  if (span <= 0.0) span = 1.0;
  double pad = 0.05 * span;
  xmin -= pad; xmax += pad; ymin -= pad; ymax += pad;

  const double size = 720.0;
  double scale = size / std::max(xmax - xmin, ymax - ymin);
  auto X = [&](double x) { return (x - xmin) * scale; };
  auto Y = [&](double y) { return size - (y - ymin) * scale; };  // flip y

  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
     << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  double t0 = snapshots.front().first;
  double t1 = snapshots.back().first;
  for (const auto& [t, c] : snapshots) {
    double frac = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
    os << "<polyline fill=\"none\" stroke=\"" << time_color(frac)
       << "\" stroke-width=\"1.2\" points=\"";
    for (const auto& v : c.vertices)
      os << fmt(X(v.x)) << ',' << fmt(Y(v.y)) << ' ';
    os << fmt(X(c.vertices.front().x)) << ',' << fmt(Y(c.vertices.front().y));
    os << "\"/>\n";
  }

  if (limit_circle_radius) {
    os << "<circle cx=\"" << fmt(X(0.0)) << "\" cy=\"" << fmt(Y(0.0))
       << "\" r=\"" << fmt(*limit_circle_radius * scale)
       << "\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\" "
          "stroke-dasharray=\"6,4\"/>\n";
  }
  os << "</svg>\n";
}

void write_phase_portrait_svg(const std::string& path, const PhasePortrait& pp) {
  if (pp.rows.empty()) throw Error("empty phase portrait");
  const double w = 840.0, h = 320.0, ml = 60.0, mr = 20.0, mt = 24.0, mb = 48.0;
  double r_lo = pp.rows.front().r, r_hi = pp.rows.back().r;
  double dmax = 0.0;
  for (const auto& row : pp.rows) dmax = std::max(dmax, std::abs(row.drift));
  if (dmax == 0.0) dmax = 1.0;

  auto X = [&](double r) { return ml + (r - r_lo) / (r_hi - r_lo) * (w - ml - mr); };
  auto Y = [&](double drift) {
    return mt + (1.0 - (drift / dmax + 1.0) / 2.0) * (h - mt - mb);
  };
  double y_axis = Y(0.0);

  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << y_axis << "\" x2=\"" << w - mr
     << "\" y2=\"" << y_axis << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";

  if (pp.crossings.degenerate) {
    os << "<text x=\"" << 0.5 * w << "\" y=\"" << 0.5 * h
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
          "degenerate: drift is identically zero, every circle is stationary"
          "</text>\n";
  }

  // drift profile
  os << "<polyline fill=\"none\" stroke=\"#b03030\" stroke-width=\"1.5\" points=\"";
  for (const auto& row : pp.rows) os << fmt(X(row.r)) << ',' << fmt(Y(row.drift)) << ' ';
  os << "\"/>\n";

  // arrows on the axis showing which way circles move
  const int n_arrows = 24;
  for (int i = 0; i < n_arrows; ++i) {
    double r = r_lo + (r_hi - r_lo) * (i + 0.5) / n_arrows;
    const PortraitRow* nearest = &pp.rows.front();
    for (const auto& row : pp.rows)
      if (std::abs(row.r - r) < std::abs(nearest->r - r)) nearest = &row;
    if (std::abs(nearest->drift) < 1e-14) continue;
    double dir = nearest->drift > 0.0 ? 1.0 : -1.0;
    double x = X(r);
    os << "<path d=\"M " << fmt(x) << ' ' << fmt(y_axis - 4) << " L "
       << fmt(x + 10 * dir) << ' ' << fmt(y_axis) << " L " << fmt(x) << ' '
       << fmt(y_axis + 4) << " Z\" fill=\"#333\"/>\n";
  }

  // A/R/S markers at the crossings
  for (const auto& z : pp.crossings.zeros) {
    char mark = 'S';
    if (z.transversal)
      mark = (z.sign_change == Crossing::DriftChange::plus_to_minus) ? 'A' : 'R';
    double x = X(z.r);
    os << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y_axis)
       << "\" r=\"5\" fill=\"" << (mark == 'A' ? "#208020" : "#c08020")
       << "\"/>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y_axis - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
       << mark << "</text>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(h - 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">r="
       << fmt(z.r) << "</text>\n";
  }

  os << "<text x=\"" << w - mr << "\" y=\"" << h - 8
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">r"
        "</text>\n";
  os << "</svg>\n";
}

void write_phase_portrait_csv(const std::string& path, const PhasePortrait& pp) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "r,drift,class\n";
  char buf[80];
  for (const auto& row : pp.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", row.r, row.drift);
    os << buf << to_string(row.verdict) << '\n';
  }
}

}  // namespace psiflow
