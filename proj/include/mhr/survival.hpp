#pragma once

// Censored two-arm samples, right-continuous step functions and the classical
// product-limit / cumulative-hazard estimators built on them.

#include <cstddef>
#include <span>
#include <vector>

namespace mhr {

enum class Arm : int { control = 0, treatment = 1 };

struct Observation {
  double time = 0.0;
  bool event = false;  // false: right-censored at `time`
  Arm arm = Arm::control;
};

/// Validated collection of (time, status, arm) records.
class CensoredSample {
 public:
  CensoredSample() = default;
  explicit CensoredSample(std::vector<Observation> observations);

  const std::vector<Observation>& observations() const { return obs_; }
  std::size_t size() const { return obs_.size(); }
  std::size_t arm_size(Arm arm) const;
  std::size_t event_count(Arm arm) const;

  /// Empirical treatment fraction pi_n.
  double treated_fraction() const;

  /// Observed times in `arm`, in input order.
  std::vector<double> times(Arm arm) const;

  CensoredSample with_status_flipped() const;
  CensoredSample with_arms_swapped() const;

 private:
  std::vector<Observation> obs_;
};

/// Right-continuous, non-decreasing, piecewise-constant function on [0, inf).
/// Takes `value_at_zero` before the first knot and `values[i]` on
/// [knots[i], knots[i+1]).
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> knots, std::vector<double> values,
               double value_at_zero = 0.0);

  double operator()(double t) const;
  double left_limit(double t) const;

  /// inf{t >= 0 : f(t) >= u}. Returns 0 for u <= value_at_zero and throws
  /// DomainError ("above range") for u > sup f.
  double generalized_inverse(double u) const;

  double sup() const { return values_.empty() ? value_at_zero_ : values_.back(); }
  double value_at_zero() const { return value_at_zero_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return knots_.size(); }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  double value_at_zero_ = 0.0;
};

double eval(const StepFunction& f, double t);
double generalized_inverse(const StepFunction& f, double u);

/// Right-continuous non-increasing survival curve, 1 before the first knot.
class SurvivalCurve {
 public:
  SurvivalCurve() = default;
  SurvivalCurve(std::vector<double> knots, std::vector<double> survival);

  double operator()(double t) const;
  double left_limit(double t) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& survival() const { return surv_; }

  /// The distribution function 1 - S as a StepFunction.
  StepFunction distribution() const;

 private:
  std::vector<double> knots_;
  std::vector<double> surv_;
};

/// One row per distinct event time in a stratum.
struct RiskSetRow {
  double time;
  std::size_t events;
  std::size_t at_risk;
};

/// Distinct event times of `arm` with event and at-risk counts. At-risk is
/// {Y_i >= t}, so censorings tied with events are still at risk.
std::vector<RiskSetRow> risk_table(const CensoredSample& sample, Arm arm);

StepFunction nelson_aalen(const CensoredSample& sample, Arm arm);
SurvivalCurve kaplan_meier(const CensoredSample& sample, Arm arm);

/// Kaplan-Meier of the censoring distribution (status flipped).
SurvivalCurve reverse_kaplan_meier(const CensoredSample& sample, Arm arm);

}  // namespace mhr
