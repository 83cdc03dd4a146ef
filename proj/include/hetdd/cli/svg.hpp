#pragma once

// Static log-log error plots written directly as SVG 1.1.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "hetdd/cli/csv.hpp"

namespace hetdd::cli {

struct PlotFrame {
  static constexpr double width = 800, height = 600;
  static constexpr double left = 90, right = 200, top = 50, bottom = 70;
  double lx0 = -4, lx1 = -1, ly0 = -8, ly1 = -1;  // log10 ranges

  double px(double nu) const { return left + (std::log10(nu) - lx0) / (lx1 - lx0) * (width - left - right); }
  double py(double err) const {
    return height - bottom - (std::log10(err) - ly0) / (ly1 - ly0) * (height - top - bottom);
  }
};

inline constexpr double guide_slopes[] = {1.0, 1.5, 2.0, 2.5, 4.0};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  return colors[i % 7];
}

inline bool plottable(double nu, double err) { return nu > 0 && err > 0 && std::isfinite(nu) && std::isfinite(err); }

}  // namespace detail

/// Frame covering every plottable point, padded to whole sub-decades.
inline PlotFrame frame_for(const std::vector<ErrorRow>& rows, bool omega1) {
  PlotFrame f;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& r : rows) {
    const double e = omega1 ? r.err_omega1 : r.err_omega2;
    if (!detail::plottable(r.nu, e)) continue;
    xmin = std::min(xmin, std::log10(r.nu)), xmax = std::max(xmax, std::log10(r.nu));
    ymin = std::min(ymin, std::log10(e)), ymax = std::max(ymax, std::log10(e));
  }
  if (!std::isfinite(xmin)) return f;
  auto widen = [](double& lo, double& hi) {
    if (hi - lo < 0.5) {
      const double mid = 0.5 * (lo + hi);
      lo = mid - 0.25, hi = mid + 0.25;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad, hi += pad;
  };
  widen(xmin, xmax);
  widen(ymin, ymax);
  f.lx0 = xmin, f.lx1 = xmax, f.ly0 = ymin, f.ly1 = ymax;
  return f;
}

/// One panel: Omega1 errors when omega1 is true, Omega2 errors otherwise.
inline std::string render_svg(const std::vector<ErrorRow>& rows, bool omega1, const std::string& title) {
  const PlotFrame f = frame_for(rows, omega1);
  using detail::fmt;
  const double x_lo = PlotFrame::left, x_hi = PlotFrame::width - PlotFrame::right;
  const double y_lo = PlotFrame::top, y_hi = PlotFrame::height - PlotFrame::bottom;
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  s += "<defs><clipPath id=\"plot\"><rect x=\"" + fmt(x_lo) + "\" y=\"" + fmt(y_lo) + "\" width=\"" +
       fmt(x_hi - x_lo) + "\" height=\"" + fmt(y_hi - y_lo) + "\"/></clipPath></defs>\n";
  s += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  s += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + title +
       "</text>\n";
  s += "<g class=\"axes\" stroke=\"black\" fill=\"none\"><rect x=\"" + fmt(x_lo) + "\" y=\"" + fmt(y_lo) +
       "\" width=\"" + fmt(x_hi - x_lo) + "\" height=\"" + fmt(y_hi - y_lo) + "\"/></g>\n";

  s += "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i < 6; ++i) {
    const double lx = f.lx0 + (f.lx1 - f.lx0) * i / 5.0;
    const double ly = f.ly0 + (f.ly1 - f.ly0) * i / 5.0;
    const double tx = f.px(std::pow(10.0, lx)), ty = f.py(std::pow(10.0, ly));
    s += "<line class=\"xtick\" x1=\"" + fmt(tx) + "\" y1=\"" + fmt(y_hi) + "\" x2=\"" + fmt(tx) + "\" y2=\"" +
         fmt(y_hi + 6) + "\" stroke=\"black\"/>";
    s += "<text x=\"" + fmt(tx) + "\" y=\"" + fmt(y_hi + 20) + "\" text-anchor=\"middle\">" +
         fmt(std::pow(10.0, lx), "%.2g") + "</text>\n";
    s += "<line class=\"ytick\" x1=\"" + fmt(x_lo - 6) + "\" y1=\"" + fmt(ty) + "\" x2=\"" + fmt(x_lo) + "\" y2=\"" +
         fmt(ty) + "\" stroke=\"black\"/>";
    s += "<text x=\"" + fmt(x_lo - 10) + "\" y=\"" + fmt(ty + 4) + "\" text-anchor=\"end\">" +
         fmt(std::pow(10.0, ly), "%.2g") + "</text>\n";
  }
  s += "</g>\n";
  s += "<text x=\"" + fmt(0.5 * (x_lo + x_hi)) + "\" y=\"" + fmt(PlotFrame::height - 20) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">viscosity</text>\n";
  s += std::string("<text x=\"20\" y=\"") + fmt(0.5 * (y_lo + y_hi)) + "\" transform=\"rotate(-90 20 " +
       fmt(0.5 * (y_lo + y_hi)) + ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
       (omega1 ? "L2(x,t) error on (-l1, 0)" : "L2(x,t) error on (0, l2)") + "</text>\n";

  // Guides through the upper right corner of the frame, clipped to the plot.
  s += "<g class=\"guides\" clip-path=\"url(#plot)\" stroke=\"#999999\" stroke-dasharray=\"4 3\">\n";
  const double nu_hi = std::pow(10.0, f.lx1), nu_lo = std::pow(10.0, f.lx0);
  const double e_hi = std::pow(10.0, f.ly1);
  for (double p : guide_slopes) {
    const double e_lo = e_hi * std::pow(nu_lo / nu_hi, p);
    s += "<line class=\"guide\" data-slope=\"" + fmt(p, "%g") + "\" x1=\"" + fmt(f.px(nu_lo), "%.6f") + "\" y1=\"" +
         fmt(f.py(e_lo), "%.6f") + "\" x2=\"" + fmt(f.px(nu_hi), "%.6f") + "\" y2=\"" + fmt(f.py(e_hi), "%.6f") +
         "\"/>\n";
  }
  s += "</g>\n";

  std::vector<std::string> order;
  std::map<std::string, std::vector<const ErrorRow*>> by_method;
  for (const auto& r : rows) {
    if (!by_method.count(r.method)) order.push_back(r.method);
    by_method[r.method].push_back(&r);
  }
  s += "<g class=\"series\">\n";
  std::size_t drawn = 0;
  std::vector<std::pair<std::string, const char*>> legend;
  for (const auto& m : order) {
    auto pts = by_method[m];
    std::erase_if(pts, [&](const ErrorRow* r) { return !detail::plottable(r->nu, omega1 ? r->err_omega1 : r->err_omega2); });
    if (pts.empty()) continue;
    std::sort(pts.begin(), pts.end(), [](const ErrorRow* a, const ErrorRow* b) { return a->nu < b->nu; });
    const char* color = detail::palette(drawn++);
    legend.emplace_back(m, color);
    std::string coords;
    for (const auto* r : pts) {
      const double e = omega1 ? r->err_omega1 : r->err_omega2;
      coords += (coords.empty() ? "" : " ") + fmt(f.px(r->nu), "%.6f") + "," + fmt(f.py(e), "%.6f");
    }
    s += "<polyline data-method=\"" + m + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" +
         coords + "\"/>\n";
    for (const auto* r : pts) {
      const double e = omega1 ? r->err_omega1 : r->err_omega2;
      s += "<circle class=\"marker\" data-method=\"" + m + "\" data-resolved=\"" + (r->resolved ? "1" : "0") +
           "\" cx=\"" + fmt(f.px(r->nu), "%.6f") + "\" cy=\"" + fmt(f.py(e), "%.6f") + "\" r=\"4\" stroke=\"" +
           color + "\" fill=\"" + (r->resolved ? color : "none") + "\"/>\n";
    }
  }
  s += "</g>\n";

  s += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double ly = y_lo + 10;
  for (const auto& [m, color] : legend) {
    s += "<line x1=\"" + fmt(x_hi + 15) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(x_hi + 40) + "\" y2=\"" + fmt(ly) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/><text x=\"" + fmt(x_hi + 46) + "\" y=\"" + fmt(ly + 4) +
         "\">" + m + "</text>\n";
    ly += 20;
  }
  for (double p : guide_slopes) {
    s += "<line x1=\"" + fmt(x_hi + 15) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(x_hi + 40) + "\" y2=\"" + fmt(ly) +
         "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/><text x=\"" + fmt(x_hi + 46) + "\" y=\"" + fmt(ly + 4) +
         "\">nu^" + fmt(p, "%g") + "</text>\n";
    ly += 20;
  }
  s += "<circle cx=\"" + fmt(x_hi + 27) + "\" cy=\"" + fmt(ly) + "\" r=\"4\" stroke=\"black\" fill=\"none\"/><text x=\"" +
       fmt(x_hi + 46) + "\" y=\"" + fmt(ly + 4) + "\">unresolved</text>\n";
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace hetdd::cli
