#include "mhr/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mhr/cli/io.hpp"

namespace mhr::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 55;

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

std::string num(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

}  // namespace

std::vector<PlanePoint> step_polyline(double x0, double value0, const std::vector<double>& knots,
                                      const std::vector<double>& values, double x_end) {
  std::vector<PlanePoint> out{{x0, value0}};
  double current = value0;
  for (std::size_t k = 0; k < knots.size(); ++k) {
    out.push_back({knots[k], current});
    current = values[k];
    out.push_back({knots[k], current});
  }
  if (x_end > out.back().u) out.push_back({x_end, current});
  return out;
}

std::string render_svg(const SvgPlot& plot) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series) {
    for (const auto& p : s.points) {
      if (!std::isfinite(p.u) || !std::isfinite(p.v)) continue;
      xmin = std::min(xmin, p.u);
      xmax = std::max(xmax, p.u);
      ymin = std::min(ymin, p.v);
      ymax = std::max(ymax, p.v);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(plot.title) << "</text>\n"
    << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(xmin, xmax)) {
    o << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(sx(t)) << "\" y2=\""
      << num(kTop + ph + 5) << "\" stroke=\"black\"/>"
      << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
      << format_number(t) << "</text>\n";
  }
  for (double t : ticks(ymin, ymax)) {
    o << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << num(kLeft) << "\" y2=\""
      << num(sy(t)) << "\" stroke=\"black\"/>"
      << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">"
      << format_number(t) << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
    << escape(plot.x_label) << "</text>\n"
    << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(plot.y_label) << "</text>\n";

  double legend_y = kTop + 14;
  for (const auto& s : plot.series) {
    o << "<polyline fill=\"none\" stroke=\"" << escape(s.color) << "\" stroke-width=\"1.5\"";
    if (s.dashed) o << " stroke-dasharray=\"6 4\"";
    o << " points=\"";
    bool first = true;
    for (const auto& p : s.points) {
      if (!std::isfinite(p.u) || !std::isfinite(p.v)) continue;
      if (!first) o << ' ';
      o << num(sx(p.u)) << ',' << num(sy(p.v));
      first = false;
    }
    o << "\"/>\n";
    if (s.markers) {
      for (const auto& p : s.points) {
        if (!std::isfinite(p.u) || !std::isfinite(p.v)) continue;
        o << "<circle cx=\"" << num(sx(p.u)) << "\" cy=\"" << num(sy(p.v)) << "\" r=\"1.8\" fill=\""
          << escape(s.color) << "\"/>\n";
      }
    }
    if (!s.label.empty()) {
      o << "<line x1=\"" << num(kLeft + 10) << "\" y1=\"" << num(legend_y - 4) << "\" x2=\"" << num(kLeft + 34)
        << "\" y2=\"" << num(legend_y - 4) << "\" stroke=\"" << escape(s.color) << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>"
        << "<text x=\"" << num(kLeft + 40) << "\" y=\"" << num(legend_y) << "\">" << escape(s.label)
        << "</text>\n";
      legend_y += 16;
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace mhr::cli
