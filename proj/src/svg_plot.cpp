#include "dvz/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dvz/errors.hpp"

namespace dvz {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double x, const char* fmt = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  double to_plot(double v) const { return log ? std::log(v) : v; }
  bool placeable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

}  // namespace

std::string render_svg(const PlotData& plot) {
  Axis ax{plot.log_x}, ay{plot.log_y};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  std::size_t points = 0;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw InputError("render_svg: x and y lengths differ in series " + s.label);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!ax.placeable(s.x[i]) || !ay.placeable(s.y[i])) continue;
      const double px = ax.to_plot(s.x[i]), py = ay.to_plot(s.y[i]);
      xmin = std::min(xmin, px);
      xmax = std::max(xmax, px);
      ymin = std::min(ymin, py);
      ymax = std::max(ymax, py);
      ++points;
    }
  }
  if (points < 2) throw InputError("render_svg: need at least two plottable points");
  auto widen = [](double& lo, double& hi) {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  };
  widen(xmin, xmax);
  widen(ymin, ymax);
  ax.lo = xmin;
  ax.hi = xmax;
  ay.lo = ymin;
  ay.hi = ymax;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double px) { return kLeft + (px - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto sy = [&](double py) { return kTop + ph - (py - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Five evenly spaced ticks per axis, labelled in data units.
  for (int t = 0; t <= 4; ++t) {
    const double px = ax.lo + (ax.hi - ax.lo) * t / 4.0;
    const double x = sx(px);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << num(ax.log ? std::exp(px) : px, "%.4g") << "</text>\n";
    const double py = ay.lo + (ay.hi - ay.lo) * t / 4.0;
    const double y = sy(py);
    svg << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(y) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << num(ay.log ? std::exp(py) : py, "%.4g") << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << (ax.log ? " (log scale)" : "") << "</text>\n";
  svg << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(plot.y_label) << (ay.log ? " (log scale)" : "") << "</text>\n";

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const auto& s = plot.series[si];
    const char* color = kColors[si % (sizeof kColors / sizeof kColors[0])];
    double fx_lo = std::numeric_limits<double>::infinity(), fx_hi = -fx_lo;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!ax.placeable(s.x[i]) || !ay.placeable(s.y[i])) continue;
      const double px = ax.to_plot(s.x[i]);
      fx_lo = std::min(fx_lo, px);
      fx_hi = std::max(fx_hi, px);
      svg << "<circle cx=\"" << num(sx(px)) << "\" cy=\"" << num(sy(ay.to_plot(s.y[i]))) << "\" r=\"3.5\" fill=\""
          << color << "\"/>\n";
    }
    std::string legend = s.label;
    if (s.fit && std::isfinite(fx_lo)) {
      const auto& f = *s.fit;
      const double y0 = std::clamp(f.intercept + f.slope * fx_lo, ay.lo, ay.hi);
      const double y1 = std::clamp(f.intercept + f.slope * fx_hi, ay.lo, ay.hi);
      svg << "<line x1=\"" << num(sx(fx_lo)) << "\" y1=\"" << num(sy(y0)) << "\" x2=\"" << num(sx(fx_hi))
          << "\" y2=\"" << num(sy(y1)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"6,3\"/>\n";
      legend += "  " + plot.slope_symbol + " = " + num(f.slope, "%.3f") + " ± " + num(f.slope_stderr, "%.3f");
    }
    const double ly = kTop + 16.0 + 16.0 * static_cast<double>(si);
    svg << "<circle cx=\"" << num(kLeft + 12) << "\" cy=\"" << num(ly - 4) << "\" r=\"3.5\" fill=\"" << color
        << "\"/>\n";
    svg << "<text x=\"" << num(kLeft + 22) << "\" y=\"" << num(ly) << "\">" << escape(legend) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const PlotData& plot, const std::string& path) {
  const std::string doc = render_svg(plot);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("write_svg: cannot open " + path);
  out << doc;
}

}  // namespace dvz
