#include "mhr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mhr/error.hpp"

namespace mhr {

double epanechnikov_self_convolution(double s) {
  const double a = std::abs(s);
  if (a >= 2.0) return 0.0;
  const double r = 2.0 - a;
  return 3.0 / 160.0 * r * r * r * (a * a + 6.0 * a + 4.0);
}

SmoothedHazard::SmoothedHazard(const CensoredSample& sample, Arm arm, double bandwidth)
    : arm_(arm), h_(bandwidth) {
  if (!(bandwidth > 0.0)) throw InputError("bandwidth must be positive");
  for (const auto& row : risk_table(sample, arm)) {
    const double y = static_cast<double>(row.at_risk);
    const double d = static_cast<double>(row.events);
    times_.push_back(row.time);
    increments_.push_back(d / y);
    var_increments_.push_back(d / (y * y));
  }
}

SmoothedHazard::Value SmoothedHazard::evaluate(double x) const {
  const auto lo = std::upper_bound(times_.begin(), times_.end(), x - h_) - times_.begin();
  const auto hi = std::lower_bound(times_.begin(), times_.end(), x + h_) - times_.begin();
  double rate = 0.0;
  bool any = false;
  for (auto j = lo; j < hi; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const double w = epanechnikov((x - times_[k]) / h_);
    if (w > 0.0) any = true;
    rate += w / h_ * increments_[k];
  }
  return {rate, !any};
}

double SmoothedHazard::variance(double x) const {
  const auto lo = std::upper_bound(times_.begin(), times_.end(), x - h_) - times_.begin();
  const auto hi = std::lower_bound(times_.begin(), times_.end(), x + h_) - times_.begin();
  double v = 0.0;
  for (auto j = lo; j < hi; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const double w = epanechnikov((x - times_[k]) / h_) / h_;
    v += w * w * var_increments_[k];
  }
  return v;
}

double smoothed_hazard(const CensoredSample& sample, Arm arm, double x, double bandwidth) {
  return SmoothedHazard(sample, arm, bandwidth)(x);
}

double hazard_cv_criterion(const CensoredSample& sample, Arm arm, double bandwidth) {
  if (!(bandwidth > 0.0)) throw InputError("bandwidth must be positive");
  const auto rows = risk_table(sample, arm);
  const SmoothedHazard smooth(sample, arm, bandwidth);
  const double h = bandwidth;

  double integral = 0.0;
  double loo = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const double wj = static_cast<double>(rows[j].events) / static_cast<double>(rows[j].at_risk);
    // diagonal plus twice the upper triangle of the double sum
    integral += wj * wj * epanechnikov_self_convolution(0.0) / h;
    for (std::size_t k = j + 1; k < rows.size() && rows[k].time - rows[j].time < 2.0 * h; ++k) {
      const double wk = static_cast<double>(rows[k].events) / static_cast<double>(rows[k].at_risk);
      integral += 2.0 * wj * wk * epanechnikov_self_convolution((rows[k].time - rows[j].time) / h) / h;
    }
    const double self = epanechnikov(0.0) / h / static_cast<double>(rows[j].at_risk);
    loo += wj * (smooth(rows[j].time) - self);
  }
  return integral - 2.0 * loo;
}

std::vector<double> default_hazard_bandwidth_grid(const CensoredSample& sample, Arm arm,
                                                  std::size_t count) {
  const auto rows = risk_table(sample, arm);
  if (rows.size() < 2) throw DegenerateError("bandwidth grid: fewer than two event times");
  const double range = rows.back().time - rows.front().time;
  const double lo = 0.01 * range;
  const double hi = 0.5 * range;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double f = count == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    grid[k] = lo * std::pow(hi / lo, f);
  }
  return grid;
}

double cv_bandwidth_hazard(const CensoredSample& sample, Arm arm,
                           std::span<const double> candidates) {
  if (sample.event_count(arm) < 3) throw DegenerateError("cv_bandwidth_hazard: fewer than 3 events");
  if (candidates.empty()) throw InputError("cv_bandwidth_hazard: empty candidate grid");
  double best_h = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double h : candidates) {
    const double c = hazard_cv_criterion(sample, arm, h);
    if (c < best || (c == best && h > best_h)) {
      best = c;
      best_h = h;
    }
  }
  return best_h;
}

// ---------------------------------------------------------------------------

namespace {

double cv_default(const CensoredSample& sample, Arm arm) {
  const auto grid = default_hazard_bandwidth_grid(sample, arm);
  return cv_bandwidth_hazard(sample, arm, grid);
}

}  // namespace

KernelRatioEstimator::KernelRatioEstimator(const CensoredSample& sample)
    : KernelRatioEstimator(sample, cv_default(sample, Arm::treatment),
                           cv_default(sample, Arm::control)) {}

KernelRatioEstimator::KernelRatioEstimator(const CensoredSample& sample, double bandwidth_S,
                                           double bandwidth_T)
    : hazard_S_(sample, Arm::treatment, bandwidth_S), hazard_T_(sample, Arm::control, bandwidth_T) {}

double KernelRatioEstimator::ratio(double x) const {
  const double den = hazard_T_(x);
  if (!(den > 0.0)) throw DegenerateError("smoothed control hazard is zero at x");
  return hazard_S_(x) / den;
}

ConfidenceInterval KernelRatioEstimator::ci(double x, double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  const double ls = hazard_S_(x);
  const double lt = hazard_T_(x);
  if (!(ls > 0.0 && lt > 0.0)) throw DegenerateError("smoothed hazard is zero at x");
  const double log_ratio = std::log(ls) - std::log(lt);
  const double se = std::sqrt(hazard_S_.variance(x) / (ls * ls) + hazard_T_.variance(x) / (lt * lt));
  const double z = normal_quantile(1.0 - alpha / 2.0);
  return {x, std::exp(log_ratio), std::exp(log_ratio - z * se), std::exp(log_ratio + z * se), 1.0 - alpha,
          CiMethod::kernel};
}

ConfidenceInterval smooth_hr_ci(const CensoredSample& sample, double x, double alpha) {
  return KernelRatioEstimator(sample).ci(x, alpha);
}

}  // namespace mhr
