#include "eqins/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "eqins/errors.hpp"

namespace eqins::svg {

namespace {

constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 14.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 44.0;
constexpr double kLogFloor = 1e-16;

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range y_range(const Panel& panel) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Series& s : panel.series) {
    for (double v : s.y) {
      const double w = panel.log_y ? std::max(v, kLogFloor) : v;
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    return {0.0, 1.0};
  }
  if (panel.log_y) {
    lo = std::log10(lo);
    hi = std::log10(hi);
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

Range x_range(const Panel& panel) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Series& s : panel.series) {
    for (double v : s.x) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi - lo < 1e-12) {
    return {0.0, 1.0};
  }
  return {lo, hi};
}

void draw_panel(std::string& out, const Panel& panel, double ox, double oy,
                double width, double height) {
  const double px0 = ox + kMarginLeft;
  const double py0 = oy + kMarginTop;
  const double pw = width - kMarginLeft - kMarginRight;
  const double ph = height - kMarginTop - kMarginBottom;
  const Range xr = x_range(panel);
  const Range yr = y_range(panel);

  auto sx = [&](double v) { return px0 + (v - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double v) {
    const double w = panel.log_y ? std::log10(std::max(v, kLogFloor)) : v;
    return py0 + ph - (w - yr.lo) / (yr.hi - yr.lo) * ph;
  };

  out += "<rect x=\"" + fmt(px0) + "\" y=\"" + fmt(py0) + "\" width=\"" + fmt(pw) +
         "\" height=\"" + fmt(ph) +
         "\" fill=\"white\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  out += "<text x=\"" + fmt(px0 + pw / 2) + "\" y=\"" + fmt(oy + 18.0) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-weight=\"bold\">" +
         escape(panel.title) + "</text>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / ticks;
    const double gx = sx(fx);
    out += "<line x1=\"" + fmt(gx) + "\" y1=\"" + fmt(py0) + "\" x2=\"" + fmt(gx) +
           "\" y2=\"" + fmt(py0 + ph) + "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    out += "<text x=\"" + fmt(gx) + "\" y=\"" + fmt(py0 + ph + 16.0) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + fmt(fx, "%.4g") + "</text>\n";

    const double fy = yr.lo + (yr.hi - yr.lo) * i / ticks;
    const double gy = py0 + ph - (fy - yr.lo) / (yr.hi - yr.lo) * ph;
    out += "<line x1=\"" + fmt(px0) + "\" y1=\"" + fmt(gy) + "\" x2=\"" + fmt(px0 + pw) +
           "\" y2=\"" + fmt(gy) + "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    const double label = panel.log_y ? std::pow(10.0, fy) : fy;
    out += "<text x=\"" + fmt(px0 - 6.0) + "\" y=\"" + fmt(gy + 3.0) +
           "\" text-anchor=\"end\" font-size=\"10\">" + fmt(label, "%.3g") + "</text>\n";
  }

  out += "<text x=\"" + fmt(px0 + pw / 2) + "\" y=\"" + fmt(py0 + ph + 34.0) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + escape(panel.x_label) +
         "</text>\n";
  out += "<text x=\"" + fmt(ox + 16.0) + "\" y=\"" + fmt(py0 + ph / 2) +
         "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 " +
         fmt(ox + 16.0) + " " + fmt(py0 + ph / 2) + ")\">" + escape(panel.y_label) +
         "</text>\n";

  for (const Series& s : panel.series) {
    out += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.2\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      out += fmt(sx(s.x[i]), "%.2f");
      out += ',';
      out += fmt(sy(s.y[i]), "%.2f");
      out += ' ';
    }
    out += "\"/>\n";
  }

  double ly = py0 + 14.0;
  for (const Series& s : panel.series) {
    const double lx = px0 + pw - 110.0;
    out += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4.0) + "\" x2=\"" +
           fmt(lx + 22.0) + "\" y2=\"" + fmt(ly - 4.0) + "\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + fmt(lx + 27.0) + "\" y=\"" + fmt(ly) +
           "\" font-size=\"10\">" + escape(s.label) + "</text>\n";
    ly += 14.0;
  }
}

}  // namespace

void write_panel_grid(const std::filesystem::path& path,
                      const std::vector<Panel>& panels, int cols, int panel_width,
                      int panel_height) {
  if (cols < 1) {
    cols = 1;
  }
  const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
  const int width = cols * panel_width;
  const int height = std::max(rows, 1) * panel_height;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
         std::to_string(width) + " " + std::to_string(height) +
         "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double ox = static_cast<double>(i % cols) * panel_width;
    const double oy = static_cast<double>(i / cols) * panel_height;
    draw_panel(out, panels[i], ox, oy, panel_width, panel_height);
  }
  out += "</svg>\n";

  std::ofstream file(path);
  if (!file) {
    throw IoError("write_panel_grid: cannot open " + path.string());
  }
  file << out;
  if (!file) {
    throw IoError("write_panel_grid: write failed for " + path.string());
  }
}

}  // namespace eqins::svg
