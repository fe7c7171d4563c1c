#include "mhr/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mhr/error.hpp"

namespace mhr {

TruncationPolicy TruncationPolicy::fixed(double r) {
  if (!(r > 0.0 && r < 1.0)) throw InputError("truncation fraction must lie in (0, 1)");
  return {Mode::fixed_fraction, r};
}

double truncation_fraction(std::size_t n, const TruncationPolicy& policy) {
  if (n == 0) throw InputError("truncation_fraction: n must be positive");
  if (policy.mode == TruncationPolicy::Mode::fixed_fraction) {
    if (!(policy.fraction > 0.0 && policy.fraction < 1.0)) {
      throw InputError("truncation fraction must lie in (0, 1)");
    }
    return policy.fraction;
  }
  if (n < 1000) return 0.05;
  const double dn = static_cast<double>(n);
  return std::pow(std::log(dn), 2.1) / dn;
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DegenerateError("empirical quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double size = static_cast<double>(values.size());
  // guard against p * size landing one ulp above an integer
  double idx = std::ceil(p * size - 1e-9);
  idx = std::clamp(idx, 1.0, size);
  return values[static_cast<std::size_t>(idx) - 1];
}

double gamma_n(const CensoredSample& sample, double r_n) {
  if (!(r_n > 0.0 && r_n < 1.0)) throw InputError("r_n must lie in (0, 1)");
  const auto t0 = sample.times(Arm::control);
  const auto t1 = sample.times(Arm::treatment);
  if (t0.empty() || t1.empty()) throw DegenerateError("empty stratum");
  return std::min(empirical_quantile(t0, 1.0 - r_n), empirical_quantile(t1, 1.0 - r_n));
}

MhrFit fit_theta_at_horizon(const CensoredSample& sample, double horizon, double r_n) {
  MhrFit fit;
  fit.lambda_S_hat = nelson_aalen(sample, Arm::treatment);
  fit.lambda_T_hat = nelson_aalen(sample, Arm::control);
  fit.gamma_n = horizon;
  fit.r_n = r_n;
  fit.n = sample.size();

  const auto& kS = fit.lambda_S_hat.knots();
  const auto& kT = fit.lambda_T_hat.knots();
  if (kS.empty() || kS.front() > horizon || kT.empty() || kT.front() > horizon) {
    throw DegenerateError("degenerate fit: an arm has no events before the truncation time");
  }

  fit.eta_n = fit.lambda_T_hat(horizon);
  fit.hull = gcm_of_composed_hazards(fit.lambda_S_hat, fit.lambda_T_hat, fit.eta_n);

  std::vector<double> knots;
  std::vector<double> values;
  for (std::size_t j = 0; j < kT.size() && kT[j] <= horizon; ++j) {
    knots.push_back(kT[j]);
    values.push_back(left_slope_at(fit.hull, fit.lambda_T_hat.values()[j]));
  }
  fit.theta = StepFunction(std::move(knots), std::move(values), fit.hull.slopes.front());
  return fit;
}

MhrFit fit_theta(const CensoredSample& sample, const TruncationPolicy& policy) {
  const double r = truncation_fraction(sample.size(), policy);
  return fit_theta_at_horizon(sample, gamma_n(sample, r), r);
}

double theta_at(const MhrFit& fit, double x) {
  if (x < 0.0) throw DomainError("theta_at: negative time");
  if (x > fit.gamma_n) {
    throw DomainError("beyond truncation time: x = " + std::to_string(x) +
                      " > gamma_n = " + std::to_string(fit.gamma_n));
  }
  return fit.theta(x);
}

double theta_at_clamped(const MhrFit& fit, double x) {
  if (x < 0.0) throw DomainError("theta_at: negative time");
  return fit.theta(std::min(x, fit.gamma_n));
}

double theta_on_hazard_scale(const MhrFit& fit, double u) {
  if (u < 0.0 || u > fit.eta_n) throw DomainError("hazard-scale abscissa outside [0, eta_n]");
  if (u == 0.0) return fit.hull.slopes.front();
  return left_slope_at(fit.hull, u);
}

// ---------------------------------------------------------------------------

std::vector<double> DiagnosticCurve::gaps() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.v - hull.value_at(p.u));
  return out;
}

double DiagnosticCurve::max_gap() const {
  const auto g = gaps();
  return g.empty() ? 0.0 : *std::max_element(g.begin(), g.end());
}

DiagnosticCurve diagnostic_curve(const MhrFit& fit) {
  DiagnosticCurve curve;
  curve.points = composed_hazard_points(fit.lambda_S_hat, fit.lambda_T_hat, fit.eta_n);
  curve.hull = fit.hull;
  return curve;
}

DiagnosticCurve diagnostic_curve(const CensoredSample& sample, const TruncationPolicy& policy) {
  return diagnostic_curve(fit_theta(sample, policy));
}

}  // namespace mhr
