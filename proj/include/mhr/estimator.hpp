#pragma once

// Monotone hazard-ratio estimator: the left derivative of the greatest convex
// minorant of Lambda_S o Lambda_T^- on [0, eta_n], composed with Lambda_T.

#include <cstddef>
#include <vector>

#include "mhr/gcm.hpp"
#include "mhr/survival.hpp"

namespace mhr {

/// How much of the upper tail of each arm is cut off before fitting.
struct TruncationPolicy {
  enum class Mode { recommended, fixed_fraction };
  Mode mode = Mode::recommended;
  double fraction = 0.05;  // used in fixed_fraction mode

  static TruncationPolicy recommended() { return {}; }
  static TruncationPolicy fixed(double r);
};

/// r_n: 0.05 below n = 1000, (log n)^2.1 / n from there on, or the fixed
/// fraction. Always in (0, 1).
double truncation_fraction(std::size_t n, const TruncationPolicy& policy);

/// Empirical quantile convention used for gamma_n: the order statistic with
/// 1-based index ceil(p * size), clamped to [1, size].
double empirical_quantile(std::vector<double> values, double p);

/// gamma_n = min over arms of the empirical (1 - r_n) quantile of observed
/// times (events and censorings pooled).
double gamma_n(const CensoredSample& sample, double r_n);

struct MhrFit {
  StepFunction theta;  // value_at_zero is the first hull slope
  double gamma_n = 0.0;
  double eta_n = 0.0;
  double r_n = 0.0;
  std::size_t n = 0;
  ConvexMinorantFit hull;
  StepFunction lambda_S_hat;
  StepFunction lambda_T_hat;
};

MhrFit fit_theta(const CensoredSample& sample, const TruncationPolicy& policy);

/// Fit with an explicit truncation time instead of the quantile rule.
/// `r_n` is only recorded.
MhrFit fit_theta_at_horizon(const CensoredSample& sample, double horizon, double r_n = 0.0);

/// theta_n(x) for 0 <= x <= gamma_n; DomainError beyond gamma_n.
double theta_at(const MhrFit& fit, double x);

/// Same, but x > gamma_n is answered with the last hull slope.
double theta_at_clamped(const MhrFit& fit, double x);

/// theta_n o Lambda_{T,n}^-(u) for u in [0, eta_n]: the hull's left slope,
/// and the first slope at u = 0.
double theta_on_hazard_scale(const MhrFit& fit, double u);

/// The cumulative-hazard curve (Lambda_T, Lambda_S) at control event times up
/// to gamma_n, anchored at the origin, with its convex minorant.
struct DiagnosticCurve {
  std::vector<PlanePoint> points;
  ConvexMinorantFit hull;

  /// Vertical distance from each point down to the hull.
  std::vector<double> gaps() const;
  double max_gap() const;
};

DiagnosticCurve diagnostic_curve(const CensoredSample& sample, const TruncationPolicy& policy);
DiagnosticCurve diagnostic_curve(const MhrFit& fit);

}  // namespace mhr
