#pragma once

// Minimal SVG line plots: linear axes, ticks and polylines.

#include <string>
#include <vector>

#include "mhr/gcm.hpp"

namespace mhr::cli {

struct SvgSeries {
  std::vector<PlanePoint> points;
  std::string color = "#1f77b4";
  std::string label;
  bool dashed = false;
  bool markers = false;  // small circles at each point
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
};

std::string render_svg(const SvgPlot& plot);

/// Polyline of a right-continuous step function through (knots, values),
/// starting at (x0, value0) and extended to x_end.
std::vector<PlanePoint> step_polyline(double x0, double value0, const std::vector<double>& knots,
                                      const std::vector<double>& values, double x_end);

}  // namespace mhr::cli
