#pragma once

// Greatest convex minorants of finite point sets and of the composed
// cumulative-hazard step function.

#include <span>
#include <vector>

#include "mhr/survival.hpp"

namespace mhr {

struct PlanePoint {
  double u;
  double v;
  bool operator==(const PlanePoint&) const = default;
};

/// Piecewise-linear convex function through `vertices`; slopes[i] is the
/// slope on [vertices[i].u, vertices[i+1].u].
struct ConvexMinorantFit {
  std::vector<PlanePoint> vertices;
  std::vector<double> slopes;

  double lower() const { return vertices.front().u; }
  double upper() const { return vertices.back().u; }

  /// Linear interpolation of the vertices; DomainError outside [lower, upper].
  double value_at(double u) const;
};

/// Lower convex hull of `points` (at least one). Points sharing an abscissa
/// are reduced to the lowest. Points lying exactly on a hull segment are kept
/// as vertices, so collinear runs produce repeated slopes.
ConvexMinorantFit lower_convex_hull(std::span<const PlanePoint> points);

/// Left derivative of the hull at u, i.e. the slope of the segment (a, b]
/// containing u. DomainError unless lower < u <= upper.
double left_slope_at(const ConvexMinorantFit& fit, double u);

/// Point set {(0,0)} and (Lambda_T(t_j), Lambda_S(t_j)) for knots t_j of
/// lambda_T with Lambda_T(t_j) <= eta, plus the boundary point at eta when it
/// falls strictly inside a jump of lambda_T.
std::vector<PlanePoint> composed_hazard_points(const StepFunction& lambda_S,
                                               const StepFunction& lambda_T, double eta);

/// GCM on [0, eta] of the left-continuous step function
/// Lambda_S o Lambda_T^-; exact, via the hull of composed_hazard_points.
ConvexMinorantFit gcm_of_composed_hazards(const StepFunction& lambda_S,
                                          const StepFunction& lambda_T, double eta);

}  // namespace mhr
