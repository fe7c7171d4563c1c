#pragma once

// Data generators for the oscillating-hazard scenarios and the Monte Carlo
// harness that scores estimators by scaled bias, variance, MSE and coverage.
//
// Base hazard lambda(x) = 0.25 + sin^2(6 pi x). Arm hazards:
//   linear   lambda_S = x lambda,   lambda_T = lambda          theta(x) = x
//   convex   lambda_S = x^2 lambda, lambda_T = lambda          theta(x) = x^2
//   concave  lambda_S = x lambda,   lambda_T = sqrt(x) lambda  theta(x) = sqrt(x)
// Both arms are censored by the same mixed law supported on (0, 2].

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mhr/chernoff.hpp"
#include "mhr/estimator.hpp"
#include "mhr/inference.hpp"
#include "mhr/rng.hpp"
#include "mhr/survival.hpp"

namespace mhr {

enum class Shape { linear, convex, concave };

const char* to_string(Shape shape);
/// InputError on unknown names.
Shape parse_shape(const std::string& name);

class Scenario {
 public:
  explicit Scenario(Shape shape) : shape_(shape) {}

  Shape shape() const { return shape_; }
  double theta(double x) const;
  double hazard(Arm arm, double x) const;
  /// Exact closed forms, except the concave control arm which is integrated
  /// numerically to about 1e-13.
  double cumulative_hazard(Arm arm, double x) const;

 private:
  Shape shape_;
};

double base_hazard(double x);

double true_cumulative_hazard(const Scenario& scenario, Arm arm, double x);

/// Lambda^{-1}(E) for E ~ Exp(1), solved to 1e-10 by safeguarded Newton.
double sample_event_time(const Scenario& scenario, Arm arm, Rng& rng);

/// Inverse of the cumulative hazard; exposed for tests.
double inverse_cumulative_hazard(const Scenario& scenario, Arm arm, double target);

/// Censoring CDF: 1 - exp(-0.1 t) on [0, 1), 1 - exp(-0.15 t) on [1, 2), 1 from 2.
double censoring_cdf(double t);
double sample_censoring(Rng& rng);

/// n observations; arm is treatment with probability `pi`.
CensoredSample generate_dataset(const Scenario& scenario, std::size_t n, double pi,
                                std::uint64_t seed);

// --- study harness ----------------------------------------------------------

/// One method's answer at one grid point; nullopt cells count as excluded.
struct PointEstimate {
  double estimate = 0.0;
  std::optional<ConfidenceInterval> ci;
};

using MethodFn = std::function<std::vector<std::optional<PointEstimate>>(
    const CensoredSample& sample, std::span<const double> grid, std::uint64_t seed)>;

struct StudyMethod {
  enum class Kind { monotone, split, kernel, custom };
  Kind kind = Kind::monotone;
  std::string name = "monotone";
  std::size_t splits = 5;  // split only
  MethodFn custom;         // custom only

  static StudyMethod monotone();
  static StudyMethod split(std::size_t m);
  static StudyMethod kernel();
  static StudyMethod custom_method(std::string name, MethodFn fn);
};

struct StudyConfig {
  Shape shape = Shape::linear;
  std::size_t n = 1000;
  std::size_t replications = 100;
  std::vector<double> grid{0.5, 1.0, 1.5};
  double alpha = 0.05;
  std::vector<StudyMethod> methods{StudyMethod::monotone()};
  std::uint64_t seed = 1;
  double pi = 0.5;
  TruncationPolicy policy;
  std::optional<ChernoffTable> chernoff;  // required by the monotone method

  /// InputError on n < 2, zero replications, grid outside (0, 2), or a
  /// missing Chernoff table.
  void validate() const;
};

struct CellMetrics {
  std::string method;
  double x = 0.0;
  std::size_t n = 0;
  double theta = 0.0;
  std::size_t used = 0;      // replications with an estimate
  std::size_t excluded = 0;  // replications without one (x beyond truncation, or failure)
  std::size_t with_ci = 0;
  double bias = 0.0;
  double scaled_bias = 0.0;  // n^{1/3} |bias|
  double variance = 0.0;     // divisor `used`
  double scaled_var = 0.0;   // n^{2/3} variance
  double mse = 0.0;
  double coverage = 0.0;     // NaN when no interval was produced
};

struct StudyMetrics {
  Shape shape = Shape::linear;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<CellMetrics> cells;  // method-major, grid order
  /// Per method, fraction of replications whose estimates decrease somewhere
  /// along the grid.
  std::vector<std::pair<std::string, double>> monotonicity_violation_rate;

  const CellMetrics& cell(const std::string& method, double x) const;
};

/// Replication r simulates from derive_seed(config.seed, r); results are
/// reduced in replication order so the output is independent of `threads`.
StudyMetrics run_study(const StudyConfig& config, unsigned threads = 1);

std::string metrics_csv(const StudyMetrics& metrics);
nlohmann::json to_json(const StudyMetrics& metrics);

}  // namespace mhr
