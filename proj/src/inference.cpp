#include "mhr/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "mhr/error.hpp"
#include "mhr/rng.hpp"

namespace mhr {

const char* to_string(CiMethod method) {
  switch (method) {
    case CiMethod::plugin: return "plugin";
    case CiMethod::split: return "split";
    case CiMethod::kernel: return "kernel";
  }
  return "unknown";
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double student_t_quantile(double p, double degrees_of_freedom) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("student_t_quantile: p must lie in (0, 1)");
  if (!(degrees_of_freedom > 0.0)) throw InputError("student_t_quantile: dof must be positive");
  return boost::math::quantile(boost::math::students_t_distribution<double>(degrees_of_freedom),
                               p);
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

struct WeightedLine {
  double slope;
  double intercept_at_u0;
};

// Weighted least squares over points[lo, hi), leaving out those with
// response `skip_v` when given.
std::optional<WeightedLine> weighted_line(std::span<const PlanePoint> pts, std::size_t lo,
                                          std::size_t hi, std::optional<double> skip_v, double u0,
                                          double h) {
  double sw = 0.0, su = 0.0, sv = 0.0;
  std::size_t used = 0;
  for (std::size_t j = lo; j < hi; ++j) {
    if (skip_v && pts[j].v == *skip_v) continue;
    const double w = epanechnikov((pts[j].u - u0) / h);
    if (w <= 0.0) continue;
    sw += w;
    su += w * pts[j].u;
    sv += w * pts[j].v;
    ++used;
  }
  if (used < 2) return std::nullopt;
  const double ubar = su / sw;
  const double vbar = sv / sw;
  double suu = 0.0, suv = 0.0;
  for (std::size_t j = lo; j < hi; ++j) {
    if (skip_v && pts[j].v == *skip_v) continue;
    const double w = epanechnikov((pts[j].u - u0) / h);
    if (w <= 0.0) continue;
    suu += w * (pts[j].u - ubar) * (pts[j].u - ubar);
    suv += w * (pts[j].u - ubar) * (pts[j].v - vbar);
  }
  if (!(suu > 0.0)) return std::nullopt;
  const double slope = suv / suu;
  return WeightedLine{slope, vbar + slope * (u0 - ubar)};
}

std::vector<PlanePoint> sorted_points(std::span<const PlanePoint> points) {
  std::vector<PlanePoint> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const PlanePoint& a, const PlanePoint& b) { return a.u < b.u; });
  return pts;
}

}  // namespace

double epanechnikov(double z) { return std::abs(z) < 1.0 ? 0.75 * (1.0 - z * z) : 0.0; }

double local_linear_slope(std::span<const PlanePoint> points, double u0, double bandwidth) {
  if (!(bandwidth > 0.0)) throw InputError("bandwidth must be positive");
  const auto line = weighted_line(points, 0, points.size(), std::nullopt, u0, bandwidth);
  if (!line) throw DegenerateError("bandwidth too small");
  return line->slope;
}

std::optional<double> local_linear_cv_error(std::span<const PlanePoint> points, double bandwidth) {
  const auto pts = sorted_points(points);
  const auto by_u = [](const PlanePoint& p, double x) { return p.u < x; };
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double u0 = pts[i].u;
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(pts.begin(), pts.end(), u0 - bandwidth, by_u) - pts.begin());
    const auto hi = static_cast<std::size_t>(
        std::lower_bound(pts.begin(), pts.end(), u0 + bandwidth, by_u) - pts.begin());
    const auto line = weighted_line(pts, lo, hi, pts[i].v, u0, bandwidth);
    if (!line) return std::nullopt;
    const double r = pts[i].v - line->intercept_at_u0;
    total += r * r;
  }
  return total / static_cast<double>(pts.size());
}

std::vector<double> default_bandwidth_grid(std::span<const PlanePoint> points, std::size_t count) {
  if (points.size() < 3) throw InputError("bandwidth grid: need at least 3 points");
  const auto [mn, mx] = std::minmax_element(points.begin(), points.end(),
                                            [](const PlanePoint& a, const PlanePoint& b) { return a.u < b.u; });
  const double range = mx->u - mn->u;
  if (!(range > 0.0)) throw DegenerateError("bandwidth grid: points share one abscissa");
  const double lo = std::min(4.0 * range / static_cast<double>(points.size()), range / 2.0);
  const double hi = range / 2.0;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double f = count == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    grid[k] = lo * std::pow(hi / lo, f);
  }
  return grid;
}

double cv_bandwidth(std::span<const PlanePoint> points, std::span<const double> candidates) {
  if (points.size() < 3) throw InputError("cv_bandwidth: need at least 3 points");
  if (candidates.empty()) throw InputError("cv_bandwidth: empty candidate grid");
  double scale = 0.0;
  for (const auto& p : points) scale += p.v * p.v;
  scale /= static_cast<double>(points.size());
  const double tie = 1e-9 * scale + std::numeric_limits<double>::min();

  std::vector<std::pair<double, double>> scored;  // (bandwidth, error)
  for (double h : candidates) {
    if (!(h > 0.0)) throw InputError("cv_bandwidth: candidates must be positive");
    if (auto err = local_linear_cv_error(points, h)) scored.emplace_back(h, *err);
  }
  if (scored.empty()) throw DegenerateError("cv_bandwidth: every candidate bandwidth is infeasible");
  double best = scored.front().second;
  for (const auto& s : scored) best = std::min(best, s.second);
  double chosen = 0.0;
  for (const auto& [h, err] : scored) {
    if (err <= best + tie) chosen = std::max(chosen, h);
  }
  return chosen;
}

// ---------------------------------------------------------------------------

double tau_from_components(const ScaleComponents& c) {
  const double bracket = c.theta / (c.pi * c.surv_S * c.cens_U_left) +
                         c.theta * c.theta / ((1.0 - c.pi) * c.surv_T * c.cens_V_left);
  // the target derivative is non-negative; a negative local slope means flat
  return std::cbrt(4.0 * std::max(c.derivative, 0.0) * bracket);
}

std::size_t derivative_grid_size(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 2.0 / 3.0) - 1e-9));
}

ScaleEstimator::ScaleEstimator(const MhrFit& fit, const CensoredSample& sample)
    : fit_(fit),
      pi_(sample.treated_fraction()),
      km_S_(kaplan_meier(sample, Arm::treatment)),
      km_T_(kaplan_meier(sample, Arm::control)),
      cens_U_(reverse_kaplan_meier(sample, Arm::treatment)),
      cens_V_(reverse_kaplan_meier(sample, Arm::control)) {
  const std::size_t m = std::max<std::size_t>(derivative_grid_size(sample.size()), 3);
  grid_.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = k + 1 == m ? fit.eta_n
                                : fit.eta_n * static_cast<double>(k) / static_cast<double>(m - 1);
    grid_.push_back({u, theta_on_hazard_scale(fit, u)});
  }
  const auto candidates = default_bandwidth_grid(grid_);
  try {
    bandwidth_ = cv_bandwidth(grid_, candidates);
  } catch (const DegenerateError&) {
    // long flat runs leave no candidate able to predict every held-out run
    bandwidth_ = candidates.back();
  }
}

ScaleComponents ScaleEstimator::components(double x) const {
  if (!(x > 0.0 && x < fit_.gamma_n)) {
    throw DomainError("scale estimate requires 0 < x < gamma_n");
  }
  ScaleComponents c{};
  c.derivative = local_linear_slope(grid_, fit_.lambda_T_hat(x), bandwidth_);
  c.theta = theta_at(fit_, x);
  c.pi = pi_;
  c.surv_S = km_S_(x);
  c.cens_U_left = cens_U_.left_limit(x);
  c.surv_T = km_T_(x);
  c.cens_V_left = cens_V_.left_limit(x);
  if (!(c.surv_S > 0.0 && c.cens_U_left > 0.0 && c.surv_T > 0.0 && c.cens_V_left > 0.0) ||
      !(c.pi > 0.0 && c.pi < 1.0)) {
    throw DegenerateError("scale undefined at x = " + std::to_string(x));
  }
  return c;
}

double ScaleEstimator::tau(double x) const { return tau_from_components(components(x)); }

double estimate_tau(const MhrFit& fit, const CensoredSample& sample, double x) {
  return ScaleEstimator(fit, sample).tau(x);
}

double plugin_half_width(double tau, double chernoff_q, std::size_t n) {
  return tau * chernoff_q / std::cbrt(static_cast<double>(n));
}

ConfidenceInterval plugin_ci(const ScaleEstimator& scale, double x, double alpha,
                             const ChernoffTable& chernoff) {
  check_alpha(alpha);
  const double tau = scale.tau(x);
  const double q = chernoff.quantile(1.0 - alpha / 2.0);
  const double est = theta_at(scale.fit(), x);
  const double half = plugin_half_width(tau, q, scale.fit().n);
  return {x, est, est - half, est + half, 1.0 - alpha, CiMethod::plugin};
}

ConfidenceInterval plugin_ci(const MhrFit& fit, const CensoredSample& sample, double x,
                             double alpha, const ChernoffTable& chernoff) {
  return plugin_ci(ScaleEstimator(fit, sample), x, alpha, chernoff);
}

// ---------------------------------------------------------------------------

SplitEstimate summarize_splits(std::span<const double> estimates) {
  if (estimates.size() < 2) throw InputError("need at least two split estimates");
  SplitEstimate s;
  s.estimates.assign(estimates.begin(), estimates.end());
  const double m = static_cast<double>(estimates.size());
  s.pooled = std::accumulate(estimates.begin(), estimates.end(), 0.0) / m;
  const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
  if (*lo == *hi) {
    s.pooled = *lo;  // no rounding residue from the mean
    s.sd = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double e : estimates) ss += (e - s.pooled) * (e - s.pooled);
  s.sd = std::sqrt(ss / (m - 1.0));
  return s;
}

SplitFit::SplitFit(std::vector<MhrFit> fits) : fits_(std::move(fits)) {
  if (fits_.size() < 2) throw InputError("sample splitting needs m >= 2");
}

SplitEstimate SplitFit::at(double x) const {
  std::vector<double> est;
  for (const auto& f : fits_) {
    if (x >= 0.0 && x <= f.gamma_n) est.push_back(theta_at(f, x));
  }
  if (est.size() < 2) {
    SplitEstimate s;
    s.estimates = std::move(est);
    s.pooled = s.estimates.empty() ? std::numeric_limits<double>::quiet_NaN() : s.estimates[0];
    s.sd = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  return summarize_splits(est);
}

SplitFit split_fit(const CensoredSample& sample, std::size_t m, const TruncationPolicy& policy,
                   std::uint64_t seed) {
  if (m < 2) throw InputError("sample splitting needs m >= 2");
  if (m > sample.size()) throw DegenerateError("split degenerate; reduce m");
  std::vector<std::size_t> idx(sample.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  std::vector<std::vector<Observation>> parts(m);
  const auto& obs = sample.observations();
  for (std::size_t k = 0; k < idx.size(); ++k) parts[k % m].push_back(obs[idx[k]]);

  std::vector<MhrFit> fits;
  fits.reserve(m);
  for (auto& part : parts) {
    try {
      fits.push_back(fit_theta(CensoredSample(std::move(part)), policy));
    } catch (const DegenerateError&) {
      throw DegenerateError("split degenerate; reduce m");
    }
  }
  return SplitFit(std::move(fits));
}

ConfidenceInterval split_ci(const SplitEstimate& est, double x, double alpha) {
  check_alpha(alpha);
  const double m = static_cast<double>(est.estimates.size());
  if (est.estimates.size() < 2) throw InputError("split_ci needs at least two estimates");
  const double half = student_t_quantile(1.0 - alpha / 2.0, m - 1.0) * est.sd / std::sqrt(m);
  return {x, est.pooled, est.pooled - half, est.pooled + half, 1.0 - alpha, CiMethod::split};
}

ConfidenceInterval split_ci(const SplitFit& fit, double x, double alpha) {
  const auto est = fit.at(x);
  if (est.estimates.size() != fit.m()) {
    throw DomainError("x beyond the truncation time of " +
                      std::to_string(fit.m() - est.estimates.size()) + " of " +
                      std::to_string(fit.m()) + " splits");
  }
  return split_ci(est, x, alpha);
}

}  // namespace mhr
