#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "qnsp.hpp"
#include "relaxation.hpp"

namespace qrelax {

struct PlotResult {
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
};

namespace detail {

inline std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Minimal static SVG canvas: a fixed plot frame, linear data-to-pixel
// mapping, and a handful of primitives. Produces self-contained files with
// no scripts or external references.
class SvgCanvas {
 public:
  SvgCanvas(double x0, double x1, double y0, double y1)
      : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    body_ += "<rect x='0' y='0' width='640' height='440' fill='white'/>\n";
    body_ += "<rect x='70' y='20' width='540' height='360' fill='none' "
             "stroke='black' stroke-width='1'/>\n";
  }

  double px(double x) const {
    return 70.0 + 540.0 * (x - x0_) / (x1_ - x0_);
  }
  double py(double y) const {
    return 380.0 - 360.0 * (y - y0_) / (y1_ - y0_);
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, double width = 1.5,
                const std::string& dash = "") {
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      pts += fmt_g(px(xs[i]));
      pts += ",";
      pts += fmt_g(py(ys[i]));
      pts += " ";
    }
    body_ += "<polyline points='" + pts + "' fill='none' stroke='" + color +
             "' stroke-width='" + fmt_g(width) + "'";
    if (!dash.empty()) body_ += " stroke-dasharray='" + dash + "'";
    body_ += "/>\n";
  }

  void marker(double x, double y, const std::string& color) {
    body_ += "<circle cx='" + fmt_g(px(x)) + "' cy='" + fmt_g(py(y)) +
             "' r='4' fill='" + color + "'/>\n";
  }

  void text(double xp, double yp, const std::string& s,
            const std::string& anchor = "start", int size = 12,
            const std::string& color = "black") {
    body_ += "<text x='" + fmt_g(xp) + "' y='" + fmt_g(yp) +
             "' font-family='sans-serif' font-size='" + std::to_string(size) +
             "' text-anchor='" + anchor + "' fill='" + color + "'>" + s +
             "</text>\n";
  }

  void xticks(const std::vector<double>& vals,
              const std::vector<std::string>& labels) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double xp = px(vals[i]);
      body_ += "<line x1='" + fmt_g(xp) + "' y1='380' x2='" + fmt_g(xp) +
               "' y2='386' stroke='black'/>\n";
      text(xp, 400, labels[i], "middle", 11);
    }
  }
  void yticks(const std::vector<double>& vals,
              const std::vector<std::string>& labels) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double yp = py(vals[i]);
      body_ += "<line x1='64' y1='" + fmt_g(yp) + "' x2='70' y2='" +
               fmt_g(yp) + "' stroke='black'/>\n";
      text(60, yp + 4, labels[i], "end", 11);
    }
  }

  void raw(const std::string& s) { body_ += s; }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw ConfigError("plot: cannot open for writing: " + path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='440' "
          "viewBox='0 0 640 440'>\n"
       << body_ << "</svg>\n";
    if (!os) throw ConfigError("plot: write failed: " + path);
  }

 private:
  double x0_, x1_, y0_, y1_;
  std::string body_;
};

struct Range {
  double lo = 0.0, hi = 1.0;
};

inline Range padded_range(const std::vector<double>& vals) {
  Range r;
  r.lo = *std::min_element(vals.begin(), vals.end());
  r.hi = *std::max_element(vals.begin(), vals.end());
  if (r.hi <= r.lo) {
    r.lo -= 1.0;
    r.hi += 1.0;
  } else {
    const double pad = 0.05 * (r.hi - r.lo);
    r.lo -= pad;
    r.hi += pad;
  }
  return r;
}

inline std::vector<double> linticks(const Range& r, int count = 5) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i)
    t[i] = r.lo + (r.hi - r.lo) * i / (count - 1);
  return t;
}

inline std::vector<std::string> tick_labels(const std::vector<double>& t) {
  std::vector<std::string> s;
  s.reserve(t.size());
  for (double v : t) s.push_back(fmt_g(v));
  return s;
}

}  // namespace detail

// Energy and augmented-entropy curves against time. A series containing nonfinite
// values is not plotted; the offending file is reported in errors instead.
inline void plot_series(const std::vector<DiagnosticsRecord>& records,
                        const std::string& path, PlotResult& res) {
  if (records.empty()) {
    res.warnings.push_back("plot: empty series, skipped " + path);
    return;
  }
  for (const DiagnosticsRecord& r : records)
    if (!r.finite()) {
      res.errors.push_back("plot: nonfinite values in series, skipped " + path);
      return;
    }
  std::vector<double> ts, es, bs;
  for (const DiagnosticsRecord& r : records) {
    ts.push_back(r.t);
    es.push_back(r.energy);
    bs.push_back(r.aug_entropy);
  }
  detail::Range rx = detail::padded_range(ts);
  std::vector<double> all(es);
  all.insert(all.end(), bs.begin(), bs.end());
  detail::Range ry = detail::padded_range(all);
  detail::SvgCanvas cv(rx.lo, rx.hi, ry.lo, ry.hi);
  cv.polyline(ts, es, "#1f77b4");
  cv.polyline(ts, bs, "#d62728");
  auto xt = detail::linticks(rx);
  auto yt = detail::linticks(ry);
  cv.xticks(xt, detail::tick_labels(xt));
  cv.yticks(yt, detail::tick_labels(yt));
  cv.text(340, 425, "t", "middle");
  cv.text(85, 35, "energy", "start", 12, "#1f77b4");
  cv.text(85, 52, "aug. entropy", "start", 12, "#d62728");
  cv.save(path);
  res.files.push_back(path);
}

// Density profiles: initial and final snapshot. In one dimension both are
// drawn as curves; in two the final snapshot becomes a grayscale cell map
// (downsampled to at most 64 cells per axis); three-dimensional data is
// shown as its z = 0 plane.
inline void plot_density(const Trajectory& traj, const std::string& path,
                         PlotResult& res) {
  if (traj.snaps.empty()) {
    res.warnings.push_back("plot: no snapshots, skipped " + path);
    return;
  }
  const Grid& grid = traj.grid;
  const Snapshot& first = traj.snaps.front();
  const Snapshot& last = traj.snaps.back();
  if (!all_finite(first.rho) || !all_finite(last.rho)) {
    res.errors.push_back("plot: nonfinite density, skipped " + path);
    return;
  }
  if (grid.dim == 1) {
    std::vector<double> xs(grid.n);
    for (int i = 0; i < grid.n; ++i) xs[i] = grid.x(i);
    std::vector<double> all(first.rho);
    all.insert(all.end(), last.rho.begin(), last.rho.end());
    detail::Range ry = detail::padded_range(all);
    detail::SvgCanvas cv(0.0, grid.length, ry.lo, ry.hi);
    cv.polyline(xs, first.rho, "#999999", 1.2, "4,3");
    cv.polyline(xs, last.rho, "#1f77b4");
    auto xt = detail::linticks({0.0, grid.length});
    auto yt = detail::linticks(ry);
    cv.xticks(xt, detail::tick_labels(xt));
    cv.yticks(yt, detail::tick_labels(yt));
    cv.text(340, 425, "x", "middle");
    cv.text(85, 35, "rho(x, 0)", "start", 12, "#999999");
    cv.text(85, 52, "rho(x, T)", "start", 12, "#1f77b4");
    cv.save(path);
    res.files.push_back(path);
    return;
  }
  const int stride = std::max(1, grid.n / 64);
  const int cells = grid.n / stride;
  double lo = 1e300, hi = -1e300;
  for (int iy = 0; iy < cells; ++iy)
    for (int ix = 0; ix < cells; ++ix) {
      const std::size_t idx =
          static_cast<std::size_t>(ix * stride) +
          static_cast<std::size_t>(grid.n) * (iy * stride);
      lo = std::min(lo, last.rho[idx]);
      hi = std::max(hi, last.rho[idx]);
    }
  if (hi <= lo) hi = lo + 1.0;
  detail::SvgCanvas cv(0.0, 1.0, 0.0, 1.0);
  const double cw = 540.0 / cells, ch = 360.0 / cells;
  for (int iy = 0; iy < cells; ++iy)
    for (int ix = 0; ix < cells; ++ix) {
      const std::size_t idx =
          static_cast<std::size_t>(ix * stride) +
          static_cast<std::size_t>(grid.n) * (iy * stride);
      const int shade =
          static_cast<int>(255.0 * (last.rho[idx] - lo) / (hi - lo));
      char color[16];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", shade, shade,
                    shade);
      char rect[160];
      std::snprintf(rect, sizeof(rect),
                    "<rect x='%.2f' y='%.2f' width='%.2f' height='%.2f' "
                    "fill='%s'/>\n",
                    70.0 + ix * cw, 380.0 - (iy + 1) * ch, cw + 0.5, ch + 0.5,
                    color);
      cv.raw(rect);
    }
  cv.text(340, 425, "rho(x, y, T) in [" + detail::fmt_g(lo) + ", " +
                        detail::fmt_g(hi) + "]",
          "middle");
  cv.save(path);
  res.files.push_back(path);
}

// Log-log convergence picture for a sweep: one marker per eps and the
// fitted power law drawn through the least-squares intercept.
inline void plot_convergence(const SweepReport& rep, const std::string& path,
                             PlotResult& res) {
  if (rep.legs.empty()) {
    res.warnings.push_back("plot: empty sweep report, skipped " + path);
    return;
  }
  std::vector<double> lx, ly;
  for (const SweepLeg& l : rep.legs) {
    if (!(l.eps > 0.0) || !(l.err_rho > 0.0) || !std::isfinite(l.err_rho)) {
      res.errors.push_back("plot: nonpositive or nonfinite sweep data, "
                           "skipped " + path);
      return;
    }
    lx.push_back(std::log10(l.eps));
    ly.push_back(std::log10(l.err_rho));
  }
  detail::Range rx = detail::padded_range(lx);
  detail::Range ry = detail::padded_range(ly);
  detail::SvgCanvas cv(rx.lo, rx.hi, ry.lo, ry.hi);

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  // log10 err = rate*log10 eps + b with the same slope as the natural-log fit
  const double b = my - rep.fitted_rate * mx;
  cv.polyline({rx.lo, rx.hi},
              {rep.fitted_rate * rx.lo + b, rep.fitted_rate * rx.hi + b},
              "#888888", 1.2, "5,4");
  for (std::size_t i = 0; i < lx.size(); ++i)
    cv.marker(lx[i], ly[i], "#1f77b4");
  auto xt = detail::linticks(rx);
  auto yt = detail::linticks(ry);
  cv.xticks(xt, detail::tick_labels(xt));
  cv.yticks(yt, detail::tick_labels(yt));
  cv.text(340, 425, "log10 eps", "middle");
  cv.text(85, 35,
          "log10 err_rho, fitted rate " + detail::fmt_g(rep.fitted_rate),
          "start");
  cv.save(path);
  res.files.push_back(path);
}

}  // namespace qrelax
