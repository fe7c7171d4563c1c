#include "mhr/gcm.hpp"

#include <algorithm>
#include <cmath>

#include "mhr/error.hpp"

namespace mhr {

namespace {

// Negative exactly when a lies strictly above the chord o -> b (u ascending).
double cross(const PlanePoint& o, const PlanePoint& a, const PlanePoint& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

}  // namespace

double ConvexMinorantFit::value_at(double u) const {
  if (vertices.empty() || u < lower() || u > upper()) {
    throw DomainError("convex minorant: abscissa outside hull domain");
  }
  auto it = std::lower_bound(vertices.begin(), vertices.end(), u,
                             [](const PlanePoint& p, double x) { return p.u < x; });
  if (it->u == u) return it->v;
  const auto k = static_cast<std::size_t>(it - vertices.begin());
  const auto& a = vertices[k - 1];
  return a.v + slopes[k - 1] * (u - a.u);
}

ConvexMinorantFit lower_convex_hull(std::span<const PlanePoint> points) {
  if (points.empty()) throw InputError("lower_convex_hull: empty point set");

  std::vector<PlanePoint> pts(points.begin(), points.end());
  for (const auto& p : pts) {
    if (!std::isfinite(p.u) || !std::isfinite(p.v)) {
      throw InputError("lower_convex_hull: non-finite coordinate");
    }
  }
  auto by_u_then_v = [](const PlanePoint& a, const PlanePoint& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  };
  if (!std::is_sorted(pts.begin(), pts.end(), by_u_then_v)) {
    std::sort(pts.begin(), pts.end(), by_u_then_v);
  }
  // keep the lowest point per abscissa
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const PlanePoint& a, const PlanePoint& b) { return a.u == b.u; }),
            pts.end());

  std::vector<PlanePoint> hull;
  hull.reserve(pts.size());
  for (const auto& p : pts) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) < 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }

  ConvexMinorantFit fit;
  fit.slopes.reserve(hull.size() > 0 ? hull.size() - 1 : 0);
  for (std::size_t i = 1; i < hull.size(); ++i) {
    fit.slopes.push_back((hull[i].v - hull[i - 1].v) / (hull[i].u - hull[i - 1].u));
  }
  fit.vertices = std::move(hull);
  return fit;
}

double left_slope_at(const ConvexMinorantFit& fit, double u) {
  if (fit.vertices.size() < 2 || !(u > fit.lower()) || u > fit.upper()) {
    throw DomainError("left_slope_at: abscissa outside hull domain");
  }
  auto it = std::lower_bound(fit.vertices.begin(), fit.vertices.end(), u,
                             [](const PlanePoint& p, double x) { return p.u < x; });
  return fit.slopes[static_cast<std::size_t>(it - fit.vertices.begin()) - 1];
}

std::vector<PlanePoint> composed_hazard_points(const StepFunction& lambda_S,
                                               const StepFunction& lambda_T, double eta) {
  if (!(eta >= 0.0)) throw InputError("eta must be nonnegative");
  if (eta > lambda_T.sup()) throw DomainError("eta beyond support");

  std::vector<PlanePoint> pts;
  pts.reserve(lambda_T.size() + 2);
  pts.push_back({0.0, 0.0});
  const auto& knots = lambda_T.knots();
  const auto& values = lambda_T.values();
  std::size_t j = 0;
  for (; j < knots.size() && values[j] <= eta; ++j) {
    pts.push_back({values[j], lambda_S(knots[j])});
  }
  // On (Lambda_T(t_{j-1}), Lambda_T(t_j)] the composition equals
  // Lambda_S(t_j); a convex minorant is bounded there by its value at eta.
  if (j < knots.size() && eta > pts.back().u) {
    pts.push_back({eta, lambda_S(knots[j])});
  }
  return pts;
}

ConvexMinorantFit gcm_of_composed_hazards(const StepFunction& lambda_S,
                                          const StepFunction& lambda_T, double eta) {
  const auto pts = composed_hazard_points(lambda_S, lambda_T, eta);
  return lower_convex_hull(pts);
}

}  // namespace mhr
