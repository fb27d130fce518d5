#include "airycov/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "airycov/errors.hpp"

namespace airycov {

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 90, kRight = 30, kTop = 50, kBottom = 70;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
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
  double lo = 0, hi = 1;
  bool log = false;

  double t(double v) const {
    const double a = log ? std::log10(v) : v;
    return (a - lo) / (hi - lo);
  }
};

// Expands [lo, hi] to a range with "nice" tick spacing; returns ticks.
std::vector<double> nice_ticks(Axis& ax) {
  std::vector<double> ticks;
  if (ax.log) {
    ax.lo = std::floor(ax.lo);
    ax.hi = std::ceil(ax.hi);
    if (ax.hi <= ax.lo) ax.hi = ax.lo + 1;
    for (double e = ax.lo; e <= ax.hi + 1e-9; e += 1) ticks.push_back(std::pow(10.0, e));
    return ticks;
  }
  if (ax.hi <= ax.lo) {
    ax.lo -= 0.5;
    ax.hi += 0.5;
  }
  const double raw = (ax.hi - ax.lo) / 6;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  ax.lo = std::floor(ax.lo / step) * step;
  ax.hi = std::ceil(ax.hi / step) * step;
  for (double v = ax.lo; v <= ax.hi + step * 1e-9; v += step) ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return ticks;
}

bool usable(double x, double y, bool log) {
  if (!std::isfinite(x) || !std::isfinite(y)) return false;
  return !log || (x > 0 && y > 0);
}

}  // namespace

std::string render_svg(const ChartSpec& spec, const std::vector<ChartSeries>& series) {
  Axis ax, ay;
  ax.log = ay.log = spec.log_log;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ArgumentError("render_svg: x and y lengths differ");
    if (s.error && s.error->size() != s.y.size()) throw ArgumentError("render_svg: error length differs");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i], spec.log_log)) continue;
      const double e = s.error && std::isfinite((*s.error)[i]) ? (*s.error)[i] : 0.0;
      const double ylo = spec.log_log && s.y[i] - e <= 0 ? s.y[i] : s.y[i] - e;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, ylo);
      ymax = std::max(ymax, s.y[i] + e);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = ymin = spec.log_log ? 1.0 : 0.0;
    xmax = ymax = spec.log_log ? 10.0 : 1.0;
  }
  ax.lo = spec.log_log ? std::log10(xmin) : xmin;
  ax.hi = spec.log_log ? std::log10(xmax) : xmax;
  ay.lo = spec.log_log ? std::log10(ymin) : ymin;
  ay.hi = spec.log_log ? std::log10(ymax) : ymax;
  const auto xticks = nice_ticks(ax);
  const auto yticks = nice_ticks(ay);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + ax.t(x) * pw; };
  const auto py = [&](double y) { return kTop + (1 - ay.t(y)) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
      << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
      << xml_escape(spec.title) << "</text>\n";

  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : xticks)
    svg << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(t))
        << "\" y2=\"" << num(kTop + ph) << "\"/>\n";
  for (double t : yticks)
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(kLeft + pw)
        << "\" y2=\"" << num(py(t)) << "\"/>\n";
  svg << "</g>\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double t : xticks)
    svg << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  for (double t : yticks)
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(t) + 4)
        << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  svg << "</g>\n";
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 20)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << xml_escape(spec.x_label) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 20 " << num(kTop + ph / 2)
      << ")\">" << xml_escape(spec.y_label) << "</text>\n";

  for (const auto& s : series) {
    svg << "<g>\n";
    if (s.style == ChartSeries::Style::Line) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!usable(s.x[i], s.y[i], spec.log_log)) continue;
        svg << (first ? "" : " ") << num(px(s.x[i])) << "," << num(py(s.y[i]));
        first = false;
      }
      svg << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!usable(s.x[i], s.y[i], spec.log_log)) continue;
        const double cx = px(s.x[i]), cy = py(s.y[i]);
        if (s.error && std::isfinite((*s.error)[i]) && (*s.error)[i] > 0) {
          const double e = (*s.error)[i];
          const double lo = spec.log_log && s.y[i] - e <= 0 ? s.y[i] : s.y[i] - e;
          svg << "<line x1=\"" << num(cx) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(cx)
              << "\" y2=\"" << num(py(s.y[i] + e)) << "\" stroke=\"" << s.color << "\"/>\n";
        }
        svg << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"3.5\" fill=\"" << s.color
            << "\"/>\n";
      }
    }
    svg << "</g>\n";
  }

  // Legend.
  double ly = kTop + 20;
  svg << "<g font-family=\"sans-serif\" font-size=\"13\">\n";
  for (const auto& s : series) {
    const double lx = kLeft + pw - 200;
    if (s.style == ChartSeries::Style::Line)
      svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 24)
          << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    else
      svg << "<circle cx=\"" << num(lx + 12) << "\" cy=\"" << num(ly - 4) << "\" r=\"3.5\" fill=\""
          << s.color << "\"/>\n";
    svg << "<text x=\"" << num(lx + 32) << "\" y=\"" << num(ly) << "\">" << xml_escape(s.label)
        << "</text>\n";
    ly += 20;
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace airycov
