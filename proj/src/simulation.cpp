#include "mhr/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "mhr/error.hpp"
#include "mhr/kernel.hpp"
#include "mhr/parallel.hpp"

namespace mhr {

namespace {

constexpr double kOmega = 12.0 * std::numbers::pi;  // angular frequency of cos in lambda
constexpr double kCell = 1.0 / 12.0;                 // half a period of cos(kOmega x)
constexpr std::size_t kTabulatedCells = 12 * 64;

// integral of sqrt(s) cos(kOmega s) over [a, b], through s = t^2 so the
// integrand is smooth at the origin.
double sqrt_cos_integral(double a, double b) {
  auto f = [](double t) { return 2.0 * t * t * std::cos(kOmega * t * t); };
  return boost::math::quadrature::gauss<double, 30>::integrate(f, std::sqrt(a), std::sqrt(b));
}

const std::vector<double>& sqrt_cos_table() {
  static const std::vector<double> table = [] {
    std::vector<double> cum(kTabulatedCells + 1, 0.0);
    for (std::size_t k = 0; k < kTabulatedCells; ++k)
      cum[k + 1] = cum[k] + sqrt_cos_integral(kCell * static_cast<double>(k), kCell * static_cast<double>(k + 1));
    return cum;
  }();
  return table;
}

// C(x) = integral_0^x sqrt(s) cos(kOmega s) ds.
double sqrt_cos_cumulative(double x) {
  const auto& table = sqrt_cos_table();
  auto k = static_cast<std::size_t>(std::floor(x / kCell));
  double c = 0.0;
  if (k <= kTabulatedCells) {
    c = table[k];
  } else {
    c = table.back();
    for (std::size_t j = kTabulatedCells; j < k; ++j)
      c += sqrt_cos_integral(kCell * static_cast<double>(j), kCell * static_cast<double>(j + 1));
  }
  const double start = kCell * static_cast<double>(k);
  if (x > start) c += sqrt_cos_integral(start, x);
  return c;
}

// Antiderivatives of x^p (0.75 - cos(kOmega x) / 2) vanishing at 0.
double cum_weight0(double x) { return 0.75 * x - std::sin(kOmega * x) / (2.0 * kOmega); }

double cum_weight1(double x) {
  const double w = kOmega;
  return 0.375 * x * x - 0.5 * (x * std::sin(w * x) / w + (std::cos(w * x) - 1.0) / (w * w));
}

double cum_weight2(double x) {
  const double w = kOmega;
  return 0.25 * x * x * x -
         0.5 * (x * x * std::sin(w * x) / w + 2.0 * x * std::cos(w * x) / (w * w) -
                2.0 * std::sin(w * x) / (w * w * w));
}

double cum_weight_half(double x) { return 0.5 * x * std::sqrt(x) - 0.5 * sqrt_cos_cumulative(x); }

}  // namespace

const char* to_string(Shape shape) {
  switch (shape) {
    case Shape::linear: return "linear";
    case Shape::convex: return "convex";
    case Shape::concave: return "concave";
  }
  return "?";
}

Shape parse_shape(const std::string& name) {
  if (name == "linear") return Shape::linear;
  if (name == "convex") return Shape::convex;
  if (name == "concave") return Shape::concave;
  throw InputError("unknown scenario '" + name + "'");
}

double base_hazard(double x) {
  const double s = std::sin(6.0 * std::numbers::pi * x);
  return 0.25 + s * s;
}

double Scenario::theta(double x) const {
  switch (shape_) {
    case Shape::linear: return x;
    case Shape::convex: return x * x;
    case Shape::concave: return std::sqrt(x);
  }
  return 0.0;
}

double Scenario::hazard(Arm arm, double x) const {
  const double base = base_hazard(x);
  if (arm == Arm::treatment) return (shape_ == Shape::convex ? x * x : x) * base;
  return (shape_ == Shape::concave ? std::sqrt(x) : 1.0) * base;
}

double Scenario::cumulative_hazard(Arm arm, double x) const {
  if (x <= 0.0) return 0.0;
  if (arm == Arm::treatment) return shape_ == Shape::convex ? cum_weight2(x) : cum_weight1(x);
  return shape_ == Shape::concave ? cum_weight_half(x) : cum_weight0(x);
}

double true_cumulative_hazard(const Scenario& scenario, Arm arm, double x) {
  return scenario.cumulative_hazard(arm, x);
}

double inverse_cumulative_hazard(const Scenario& scenario, Arm arm, double target) {
  if (!(target > 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (scenario.cumulative_hazard(arm, hi) < target) {
    lo = hi;
    hi *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = scenario.cumulative_hazard(arm, x) - target;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    const double slope = scenario.hazard(arm, x);
    double next = slope > 0.0 ? x - f / slope : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-13 * std::max(1.0, x) || hi - lo < 1e-13) return next;
    x = next;
  }
  return x;
}

double sample_event_time(const Scenario& scenario, Arm arm, Rng& rng) {
  return inverse_cumulative_hazard(scenario, arm, -std::log(open_uniform(rng)));
}

double censoring_cdf(double t) {
  if (t < 0.0) return 0.0;
  if (t < 1.0) return 1.0 - std::exp(-0.1 * t);
  if (t < 2.0) return 1.0 - std::exp(-0.15 * t);
  return 1.0;
}

double sample_censoring(Rng& rng) {
  const double u = open_uniform(rng);
  if (u < 1.0 - std::exp(-0.1)) return -std::log1p(-u) / 0.1;
  if (u <= 1.0 - std::exp(-0.15)) return 1.0;
  if (u < 1.0 - std::exp(-0.3)) return -std::log1p(-u) / 0.15;
  return 2.0;
}

CensoredSample generate_dataset(const Scenario& scenario, std::size_t n, double pi,
                                std::uint64_t seed) {
  if (n < 2) throw InputError("generate_dataset: n must be at least 2");
  if (!(pi >= 0.0 && pi <= 1.0)) throw InputError("generate_dataset: pi must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Observation> obs;
  obs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Arm arm = open_uniform(rng) < pi ? Arm::treatment : Arm::control;
    const double event = sample_event_time(scenario, arm, rng);
    const double censor = sample_censoring(rng);
    obs.push_back({std::min(event, censor), event <= censor, arm});
  }
  return CensoredSample(std::move(obs));
}

// ---------------------------------------------------------------------------

StudyMethod StudyMethod::monotone() { return {}; }

StudyMethod StudyMethod::split(std::size_t m) {
  StudyMethod s;
  s.kind = Kind::split;
  s.name = "split";
  s.splits = m;
  return s;
}

StudyMethod StudyMethod::kernel() {
  StudyMethod s;
  s.kind = Kind::kernel;
  s.name = "kernel";
  return s;
}

StudyMethod StudyMethod::custom_method(std::string name, MethodFn fn) {
  StudyMethod s;
  s.kind = Kind::custom;
  s.name = std::move(name);
  s.custom = std::move(fn);
  return s;
}

void StudyConfig::validate() const {
  if (n < 2) throw InputError("study: n must be at least 2");
  if (replications == 0) throw InputError("study: replications must be positive");
  if (grid.empty()) throw InputError("study: empty evaluation grid");
  for (double x : grid)
    if (!(x > 0.0 && x < 2.0)) throw InputError("study: grid points must lie in (0, 2)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("study: alpha must lie in (0, 1)");
  if (!(pi > 0.0 && pi < 1.0)) throw InputError("study: pi must lie in (0, 1)");
  if (methods.empty()) throw InputError("study: no methods");
  for (const auto& m : methods) {
    if (m.kind == StudyMethod::Kind::monotone && !chernoff)
      throw InputError("study: the monotone method needs a Chernoff table");
    if (m.kind == StudyMethod::Kind::split && m.splits < 2) throw InputError("study: split needs m >= 2");
    if (m.kind == StudyMethod::Kind::custom && !m.custom) throw InputError("study: custom method without body");
  }
}

const CellMetrics& StudyMetrics::cell(const std::string& method, double x) const {
  for (const auto& c : cells)
    if (c.method == method && c.x == x) return c;
  throw InputError("no metrics cell for " + method);
}

namespace {

using Cells = std::vector<std::optional<PointEstimate>>;

Cells monotone_cells(const CensoredSample& sample, const StudyConfig& config) {
  const MhrFit fit = fit_theta(sample, config.policy);
  std::optional<ScaleEstimator> scale;
  try {
    scale.emplace(fit, sample);
  } catch (const DegenerateError&) {
  }
  Cells out(config.grid.size());
  for (std::size_t k = 0; k < config.grid.size(); ++k) {
    const double x = config.grid[k];
    if (x > fit.gamma_n) continue;
    PointEstimate pe{theta_at(fit, x), std::nullopt};
    if (scale) {
      try {
        pe.ci = plugin_ci(*scale, x, config.alpha, *config.chernoff);
      } catch (const DegenerateError&) {
      } catch (const DomainError&) {
      }
    }
    out[k] = pe;
  }
  return out;
}

Cells split_cells(const CensoredSample& sample, const StudyConfig& config, std::size_t m,
                  std::uint64_t seed) {
  const SplitFit fit = split_fit(sample, m, config.policy, seed);
  Cells out(config.grid.size());
  for (std::size_t k = 0; k < config.grid.size(); ++k) {
    try {
      const auto ci = split_ci(fit, config.grid[k], config.alpha);
      out[k] = PointEstimate{ci.estimate, ci};
    } catch (const DomainError&) {
    }
  }
  return out;
}

Cells kernel_cells(const CensoredSample& sample, const StudyConfig& config) {
  const KernelRatioEstimator est(sample);
  Cells out(config.grid.size());
  for (std::size_t k = 0; k < config.grid.size(); ++k) {
    const double x = config.grid[k];
    try {
      const auto ci = est.ci(x, config.alpha);
      out[k] = PointEstimate{ci.estimate, ci};
    } catch (const DegenerateError&) {
      try {
        out[k] = PointEstimate{est.ratio(x), std::nullopt};
      } catch (const DegenerateError&) {
      }
    }
  }
  return out;
}

struct ReplicationResult {
  std::vector<Cells> per_method;
  std::vector<bool> failed;
};

ReplicationResult run_replication(const StudyConfig& config, const Scenario& scenario,
                                  std::uint64_t seed) {
  ReplicationResult res;
  res.per_method.assign(config.methods.size(), Cells(config.grid.size()));
  res.failed.assign(config.methods.size(), false);
  const CensoredSample sample = generate_dataset(scenario, config.n, config.pi, seed);
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    const auto& method = config.methods[m];
    const std::uint64_t method_seed = derive_seed(seed, m + 1);
    try {
      switch (method.kind) {
        case StudyMethod::Kind::monotone: res.per_method[m] = monotone_cells(sample, config); break;
        case StudyMethod::Kind::split:
          res.per_method[m] = split_cells(sample, config, method.splits, method_seed);
          break;
        case StudyMethod::Kind::kernel: res.per_method[m] = kernel_cells(sample, config); break;
        case StudyMethod::Kind::custom: {
          auto cells = method.custom(sample, config.grid, method_seed);
          if (cells.size() != config.grid.size()) throw InputError("custom method returned wrong size");
          res.per_method[m] = std::move(cells);
          break;
        }
      }
    } catch (const DegenerateError&) {
      res.failed[m] = true;
    } catch (const DomainError&) {
      res.failed[m] = true;
    }
  }
  return res;
}

bool decreases_along_grid(const Cells& cells, const std::vector<std::size_t>& order) {
  std::optional<double> prev;
  for (std::size_t k : order) {
    if (!cells[k]) continue;
    const double v = cells[k]->estimate;
    if (prev && v < *prev - 1e-12 * std::max(1.0, std::abs(*prev))) return true;
    prev = v;
  }
  return false;
}

}  // namespace

StudyMetrics run_study(const StudyConfig& config, unsigned threads) {
  config.validate();
  const Scenario scenario(config.shape);
  std::vector<ReplicationResult> results(config.replications);
  parallel_for(config.replications, threads, [&](std::size_t r) {
    results[r] = run_replication(config, scenario, derive_seed(config.seed, r));
  });

  StudyMetrics metrics;
  metrics.shape = config.shape;
  metrics.n = config.n;
  metrics.replications = config.replications;
  metrics.seed = config.seed;

  std::vector<std::size_t> order(config.grid.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return config.grid[a] < config.grid[b]; });

  const double nd = static_cast<double>(config.n);
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    for (std::size_t k = 0; k < config.grid.size(); ++k) {
      CellMetrics c;
      c.method = config.methods[m].name;
      c.x = config.grid[k];
      c.n = config.n;
      c.theta = scenario.theta(c.x);
      // Deviations from the truth keep the oracle's bias exactly zero.
      double dev_sum = 0.0;
      std::size_t covered = 0;
      for (const auto& rep : results) {
        const auto& pe = rep.per_method[m][k];
        if (!pe) continue;
        ++c.used;
        dev_sum += pe->estimate - c.theta;
        if (pe->ci) {
          ++c.with_ci;
          if (pe->ci->contains(c.theta)) ++covered;
        }
      }
      c.excluded = config.replications - c.used;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      if (c.used == 0) {
        c.bias = c.scaled_bias = c.variance = c.scaled_var = c.mse = nan;
      } else {
        const double used = static_cast<double>(c.used);
        c.bias = dev_sum / used;
        double ss = 0.0;
        double sq = 0.0;
        for (const auto& rep : results) {
          const auto& pe = rep.per_method[m][k];
          if (!pe) continue;
          const double d = pe->estimate - c.theta;
          ss += (d - c.bias) * (d - c.bias);
          sq += d * d;
        }
        c.variance = ss / used;
        c.mse = sq / used;
        c.scaled_bias = std::cbrt(nd) * std::abs(c.bias);
        c.scaled_var = std::pow(nd, 2.0 / 3.0) * c.variance;
      }
      c.coverage = c.with_ci == 0 ? nan : static_cast<double>(covered) / static_cast<double>(c.with_ci);
      metrics.cells.push_back(c);
    }
    std::size_t ran = 0;
    std::size_t violated = 0;
    for (const auto& rep : results) {
      if (rep.failed[m]) continue;
      ++ran;
      if (decreases_along_grid(rep.per_method[m], order)) ++violated;
    }
    metrics.monotonicity_violation_rate.emplace_back(
        config.methods[m].name, ran == 0 ? std::numeric_limits<double>::quiet_NaN()
                                         : static_cast<double>(violated) / static_cast<double>(ran));
  }
  return metrics;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string metrics_csv(const StudyMetrics& metrics) {
  std::ostringstream out;
  out << "method,x,n,scaled_bias,scaled_var,mse,coverage,n_excluded\n";
  for (const auto& c : metrics.cells) {
    out << c.method << ',' << fmt(c.x) << ',' << c.n << ',' << fmt(c.scaled_bias) << ','
        << fmt(c.scaled_var) << ',' << fmt(c.mse) << ',' << fmt(c.coverage) << ',' << c.excluded << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const StudyMetrics& metrics) {
  nlohmann::json j;
  j["scenario"] = to_string(metrics.shape);
  j["n"] = metrics.n;
  j["replications"] = metrics.replications;
  j["seed"] = metrics.seed;
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& c : metrics.cells) {
    cells.push_back({{"method", c.method},
                     {"x", c.x},
                     {"n", c.n},
                     {"theta", c.theta},
                     {"used", c.used},
                     {"n_excluded", c.excluded},
                     {"with_ci", c.with_ci},
                     {"bias", c.bias},
                     {"scaled_bias", c.scaled_bias},
                     {"variance", c.variance},
                     {"scaled_var", c.scaled_var},
                     {"mse", c.mse},
                     {"coverage", c.coverage}});
  }
  auto& rates = j["monotonicity_violation_rate"] = nlohmann::json::object();
  for (const auto& [name, rate] : metrics.monotonicity_violation_rate) rates[name] = rate;
  return j;
}

}  // namespace mhr
