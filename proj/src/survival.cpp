#include "mhr/survival.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mhr/error.hpp"

namespace mhr {

CensoredSample::CensoredSample(std::vector<Observation> observations)
    : obs_(std::move(observations)) {
  if (obs_.empty()) throw InputError("empty sample");
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    const auto& o = obs_[i];
    if (!std::isfinite(o.time) || o.time < 0.0) {
      throw InputError("observation " + std::to_string(i) +
                       ": time must be finite and nonnegative");
    }
    if (o.arm != Arm::control && o.arm != Arm::treatment) {
      throw InputError("observation " + std::to_string(i) + ": arm must be 0 or 1");
    }
  }
}

std::size_t CensoredSample::arm_size(Arm arm) const {
  return static_cast<std::size_t>(
      std::count_if(obs_.begin(), obs_.end(), [arm](const Observation& o) { return o.arm == arm; }));
}

std::size_t CensoredSample::event_count(Arm arm) const {
  return static_cast<std::size_t>(std::count_if(
      obs_.begin(), obs_.end(), [arm](const Observation& o) { return o.arm == arm && o.event; }));
}

double CensoredSample::treated_fraction() const {
  if (obs_.empty()) throw InputError("empty sample");
  return static_cast<double>(arm_size(Arm::treatment)) / static_cast<double>(obs_.size());
}

std::vector<double> CensoredSample::times(Arm arm) const {
  std::vector<double> out;
  for (const auto& o : obs_) {
    if (o.arm == arm) out.push_back(o.time);
  }
  return out;
}

CensoredSample CensoredSample::with_status_flipped() const {
  auto flipped = obs_;
  for (auto& o : flipped) o.event = !o.event;
  return CensoredSample(std::move(flipped));
}

CensoredSample CensoredSample::with_arms_swapped() const {
  auto swapped = obs_;
  for (auto& o : swapped) o.arm = o.arm == Arm::control ? Arm::treatment : Arm::control;
  return CensoredSample(std::move(swapped));
}

// ---------------------------------------------------------------------------

StepFunction::StepFunction(std::vector<double> knots, std::vector<double> values,
                           double value_at_zero)
    : knots_(std::move(knots)), values_(std::move(values)), value_at_zero_(value_at_zero) {
  if (knots_.size() != values_.size()) {
    throw InputError("step function: knots and values differ in length");
  }
  double prev = value_at_zero_;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (i > 0 && !(knots_[i] > knots_[i - 1])) {
      throw InputError("step function: knots must be strictly increasing");
    }
    if (values_[i] < prev) throw InputError("step function: values must be nondecreasing");
    prev = values_[i];
  }
}

double StepFunction::operator()(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return value_at_zero_;
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return value_at_zero_;
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double StepFunction::generalized_inverse(double u) const {
  if (u <= value_at_zero_) return 0.0;
  if (u > sup()) throw DomainError("generalized inverse: above range");
  auto it = std::lower_bound(values_.begin(), values_.end(), u);
  return knots_[static_cast<std::size_t>(it - values_.begin())];
}

double eval(const StepFunction& f, double t) { return f(t); }

double generalized_inverse(const StepFunction& f, double u) { return f.generalized_inverse(u); }

// ---------------------------------------------------------------------------

SurvivalCurve::SurvivalCurve(std::vector<double> knots, std::vector<double> survival)
    : knots_(std::move(knots)), surv_(std::move(survival)) {
  if (knots_.size() != surv_.size()) {
    throw InputError("survival curve: knots and values differ in length");
  }
  double prev = 1.0;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (i > 0 && !(knots_[i] > knots_[i - 1])) {
      throw InputError("survival curve: knots must be strictly increasing");
    }
    if (surv_[i] > prev || surv_[i] < 0.0) {
      throw InputError("survival curve: values must be non-increasing in [0, 1]");
    }
    prev = surv_[i];
  }
}

double SurvivalCurve::operator()(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return 1.0;
  return surv_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double SurvivalCurve::left_limit(double t) const {
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return 1.0;
  return surv_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

StepFunction SurvivalCurve::distribution() const {
  std::vector<double> f(surv_.size());
  std::transform(surv_.begin(), surv_.end(), f.begin(), [](double s) { return 1.0 - s; });
  return StepFunction(knots_, std::move(f), 0.0);
}

// ---------------------------------------------------------------------------

namespace {

void require_arm(const CensoredSample& sample, Arm arm) {
  if (sample.arm_size(arm) == 0) {
    throw DegenerateError("empty stratum: arm " + std::to_string(static_cast<int>(arm)));
  }
}

}  // namespace

std::vector<RiskSetRow> risk_table(const CensoredSample& sample, Arm arm) {
  require_arm(sample, arm);
  std::vector<std::pair<double, bool>> recs;
  for (const auto& o : sample.observations()) {
    if (o.arm == arm) recs.emplace_back(o.time, o.event);
  }
  std::sort(recs.begin(), recs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<RiskSetRow> rows;
  std::size_t at_risk = recs.size();
  std::size_t i = 0;
  while (i < recs.size()) {
    const double t = recs[i].first;
    std::size_t j = i;
    std::size_t events = 0;
    while (j < recs.size() && recs[j].first == t) {
      if (recs[j].second) ++events;
      ++j;
    }
    if (events > 0) rows.push_back({t, events, at_risk});
    at_risk -= j - i;
    i = j;
  }
  return rows;
}

StepFunction nelson_aalen(const CensoredSample& sample, Arm arm) {
  const auto rows = risk_table(sample, arm);
  std::vector<double> knots;
  std::vector<double> values;
  knots.reserve(rows.size());
  values.reserve(rows.size());
  double cum = 0.0;
  for (const auto& r : rows) {
    cum += static_cast<double>(r.events) / static_cast<double>(r.at_risk);
    knots.push_back(r.time);
    values.push_back(cum);
  }
  return StepFunction(std::move(knots), std::move(values), 0.0);
}

SurvivalCurve kaplan_meier(const CensoredSample& sample, Arm arm) {
  const auto rows = risk_table(sample, arm);
  std::vector<double> knots;
  std::vector<double> surv;
  knots.reserve(rows.size());
  surv.reserve(rows.size());
  double s = 1.0;
  for (const auto& r : rows) {
    s *= 1.0 - static_cast<double>(r.events) / static_cast<double>(r.at_risk);
    knots.push_back(r.time);
    surv.push_back(s);
  }
  return SurvivalCurve(std::move(knots), std::move(surv));
}

SurvivalCurve reverse_kaplan_meier(const CensoredSample& sample, Arm arm) {
  return kaplan_meier(sample.with_status_flipped(), arm);
}

}  // namespace mhr
