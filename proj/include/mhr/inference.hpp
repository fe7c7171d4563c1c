#pragma once

// Pointwise confidence intervals for theta(x): the Chernoff plug-in interval
// theta_n(x) +- tau_n(x) q_{1-alpha/2} n^{-1/3}, and the sample-splitting
// t-interval.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mhr/chernoff.hpp"
#include "mhr/estimator.hpp"
#include "mhr/gcm.hpp"
#include "mhr/survival.hpp"

namespace mhr {

enum class CiMethod { plugin, split, kernel };

const char* to_string(CiMethod method);

struct ConfidenceInterval {
  double x = 0.0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  CiMethod method = CiMethod::plugin;

  bool contains(double value) const { return lower <= value && value <= upper; }
};

double normal_quantile(double p);
double student_t_quantile(double p, double degrees_of_freedom);

// --- local linear derivative -------------------------------------------------

/// Epanechnikov kernel 0.75 (1 - z^2) on |z| < 1.
double epanechnikov(double z);

/// Slope of the Epanechnikov-weighted least-squares line through `points`
/// around u0. DegenerateError ("bandwidth too small") with fewer than two
/// distinct abscissae carrying positive weight.
double local_linear_slope(std::span<const PlanePoint> points, double u0, double bandwidth);

/// Leave-one-cluster-out squared prediction error of the local linear fit,
/// averaged over points. Points sharing a response value form one cluster, so
/// flat runs of a step function are held out together; with distinct
/// responses this is ordinary leave-one-out. nullopt when some held-out point
/// cannot be predicted.
std::optional<double> local_linear_cv_error(std::span<const PlanePoint> points, double bandwidth);

/// 20 geometric candidates from 4 * range / m to range / 2, for m points
/// spanning `range` on the u axis.
std::vector<double> default_bandwidth_grid(std::span<const PlanePoint> points,
                                           std::size_t count = 20);

/// Candidate minimizing the leave-one-out error; near-ties (relative 1e-9 of
/// the mean squared response) go to the largest bandwidth.
double cv_bandwidth(std::span<const PlanePoint> points, std::span<const double> candidates);

// --- plug-in scale ---------------------------------------------------------------

/// Ingredients of tau(x).
struct ScaleComponents {
  double derivative;   // (theta o Lambda_T^-)' at Lambda_T(x)
  double theta;        // theta(x)
  double pi;           // treatment fraction
  double surv_S;       // survival of treatment events at x
  double cens_U_left;  // treatment censoring survival at x-
  double surv_T;       // survival of control events at x
  double cens_V_left;  // control censoring survival at x-
};

/// {4 d [theta / (pi S_S U_-) + theta^2 / ((1 - pi) S_T V_-)]}^{1/3}, with a
/// negative derivative estimate treated as zero.
double tau_from_components(const ScaleComponents& c);

/// Precomputes the derivative grid, CV bandwidth and survival fits of one
/// sample so that tau_n can be evaluated at many x. Falls back to the widest
/// candidate bandwidth when cross-validation has no feasible candidate.
class ScaleEstimator {
 public:
  ScaleEstimator(const MhrFit& fit, const CensoredSample& sample);

  /// Points (u_k, theta_n o Lambda_T^-(u_k)) on the uniform grid of
  /// ceil(n^{2/3}) points over [0, eta_n].
  const std::vector<PlanePoint>& derivative_grid() const { return grid_; }
  double bandwidth() const { return bandwidth_; }

  ScaleComponents components(double x) const;
  double tau(double x) const;
  const MhrFit& fit() const { return fit_; }

 private:
  MhrFit fit_;
  double pi_;
  SurvivalCurve km_S_, km_T_, cens_U_, cens_V_;
  std::vector<PlanePoint> grid_;
  double bandwidth_ = 0.0;
};

std::size_t derivative_grid_size(std::size_t n);

double estimate_tau(const MhrFit& fit, const CensoredSample& sample, double x);

double plugin_half_width(double tau, double chernoff_q, std::size_t n);

ConfidenceInterval plugin_ci(const ScaleEstimator& scale, double x, double alpha,
                             const ChernoffTable& chernoff);
ConfidenceInterval plugin_ci(const MhrFit& fit, const CensoredSample& sample, double x,
                             double alpha, const ChernoffTable& chernoff);

// --- sample splitting --------------------------------------------------------

struct SplitEstimate {
  std::vector<double> estimates;
  double pooled = 0.0;
  double sd = 0.0;  // sample standard deviation (divisor m - 1)
};

SplitEstimate summarize_splits(std::span<const double> estimates);

class SplitFit {
 public:
  explicit SplitFit(std::vector<MhrFit> fits);

  std::size_t m() const { return fits_.size(); }
  const std::vector<MhrFit>& fits() const { return fits_; }

  /// Per-split estimates at x over splits whose gamma covers x.
  SplitEstimate at(double x) const;

 private:
  std::vector<MhrFit> fits_;
};

/// Random partition into m near-equal parts (seeded), fitted separately with
/// the truncation policy applied at each part's own size.
SplitFit split_fit(const CensoredSample& sample, std::size_t m, const TruncationPolicy& policy,
                   std::uint64_t seed);

ConfidenceInterval split_ci(const SplitEstimate& est, double x, double alpha);

/// DomainError unless every split defines theta at x.
ConfidenceInterval split_ci(const SplitFit& fit, double x, double alpha);

}  // namespace mhr
