#pragma once

// Comparison estimator: ratio of Epanechnikov-smoothed Nelson-Aalen hazard
// estimates with least-squares cross-validated bandwidths and a log-scale
// delta-method interval. No boundary correction is applied.

#include <span>
#include <vector>

#include "mhr/inference.hpp"
#include "mhr/survival.hpp"

namespace mhr {

/// (K * K)(s) for the Epanechnikov kernel K: 3/160 (2 - |s|)^3 (s^2 + 6|s| + 4)
/// on |s| <= 2.
double epanechnikov_self_convolution(double s);

class SmoothedHazard {
 public:
  SmoothedHazard(const CensoredSample& sample, Arm arm, double bandwidth);

  struct Value {
    double rate;
    bool empty_window;  // no event within one bandwidth of x
  };

  /// sum_u K_h(x - u) dLambda(u) over event times u.
  Value evaluate(double x) const;
  double operator()(double x) const { return evaluate(x).rate; }

  /// sum_u K_h(x - u)^2 dN(u) / Y(u)^2.
  double variance(double x) const;

  Arm arm() const { return arm_; }
  double bandwidth() const { return h_; }

 private:
  Arm arm_;
  double h_;
  std::vector<double> times_;
  std::vector<double> increments_;     // dN / Y
  std::vector<double> var_increments_;  // dN / Y^2
};

double smoothed_hazard(const CensoredSample& sample, Arm arm, double x, double bandwidth);

/// Least-squares CV criterion
/// int lambda_h^2 - 2 sum_i lambda_h^{(-i)}(Y_i) Delta_i / Y(Y_i).
double hazard_cv_criterion(const CensoredSample& sample, Arm arm, double bandwidth);

/// 20 geometric candidates from 1% to 50% of the event-time range of `arm`.
std::vector<double> default_hazard_bandwidth_grid(const CensoredSample& sample, Arm arm,
                                                  std::size_t count = 20);

/// Minimizer of hazard_cv_criterion over `candidates`; ties go to the
/// largest. DegenerateError with fewer than 3 events in the arm.
double cv_bandwidth_hazard(const CensoredSample& sample, Arm arm,
                           std::span<const double> candidates);

/// lambda_S / lambda_T from smoothed hazards, each with its own bandwidth.
class KernelRatioEstimator {
 public:
  /// Bandwidths chosen by cv_bandwidth_hazard on the default grids.
  explicit KernelRatioEstimator(const CensoredSample& sample);
  KernelRatioEstimator(const CensoredSample& sample, double bandwidth_S, double bandwidth_T);

  double ratio(double x) const;
  ConfidenceInterval ci(double x, double alpha) const;

  const SmoothedHazard& treatment() const { return hazard_S_; }
  const SmoothedHazard& control() const { return hazard_T_; }

 private:
  SmoothedHazard hazard_S_;
  SmoothedHazard hazard_T_;
};

ConfidenceInterval smooth_hr_ci(const CensoredSample& sample, double x, double alpha);

}  // namespace mhr
