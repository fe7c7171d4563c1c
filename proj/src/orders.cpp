#include "mhr/orders.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/beta.hpp>

#include "mhr/error.hpp"

namespace mhr {

namespace {

bool approx_le(double a, double b) {
  return a <= b + kOrderTolerance * std::max(std::abs(a), std::abs(b));
}

// Per-point quantities of one law on a common evaluation grid.
struct LawTrace {
  std::vector<double> density;
  std::vector<double> survival;  // P(X > t_j)
  std::vector<double> hazard;
};

// Ratios num/den (num, den >= 0, not both 0) must be non-decreasing.
OrderVerdict ratio_nondecreasing(const std::vector<double>& num, const std::vector<double>& den) {
  for (std::size_t j = 0; j + 1 < num.size(); ++j) {
    if (!approx_le(num[j] * den[j + 1], num[j + 1] * den[j])) return {false, j + 1};
  }
  return {};
}

OrderReport compare_traces(const LawTrace& S, const LawTrace& T) {
  OrderReport report;
  report.verdicts[static_cast<int>(OrderKind::mhr)] = ratio_nondecreasing(S.hazard, T.hazard);

  // Survival ratio T/S must not increase; both survivals are 1 below the grid.
  {
    OrderVerdict v;
    double prev_S = 1.0;
    double prev_T = 1.0;
    for (std::size_t j = 0; j < S.survival.size(); ++j) {
      if (!approx_le(T.survival[j] * prev_S, prev_T * S.survival[j])) {
        v = {false, j};
        break;
      }
      prev_S = S.survival[j];
      prev_T = T.survival[j];
    }
    report.verdicts[static_cast<int>(OrderKind::hr)] = v;
  }

  {
    OrderVerdict v;
    for (std::size_t j = 0; j < S.survival.size(); ++j) {
      if (!approx_le(T.survival[j], S.survival[j])) {
        v = {false, j};
        break;
      }
    }
    report.verdicts[static_cast<int>(OrderKind::st)] = v;
  }

  report.verdicts[static_cast<int>(OrderKind::lr)] = ratio_nondecreasing(S.density, T.density);
  return report;
}

LawTrace trace_on(const std::vector<double>& mass) {
  const std::size_t k = mass.size();
  LawTrace t;
  t.density = mass;
  t.survival.assign(k, 0.0);
  t.hazard.assign(k, 0.0);
  double tail = 0.0;
  for (std::size_t j = k; j-- > 0;) {
    t.survival[j] = tail;
    tail += mass[j];
    t.hazard[j] = tail > 0.0 ? mass[j] / tail : 0.0;
  }
  return t;
}

// Masses of S and T on the union of their supports; points carrying no mass
// in either law are not part of it.
std::pair<std::vector<double>, std::vector<double>> on_union(const DiscreteDistribution& S,
                                                             const DiscreteDistribution& T) {
  std::map<double, std::pair<double, double>> merged;
  for (std::size_t j = 0; j < S.size(); ++j) merged[S.support()[j]].first = S.mass()[j];
  for (std::size_t j = 0; j < T.size(); ++j) merged[T.support()[j]].second = T.mass()[j];
  std::vector<double> fs, ft;
  for (const auto& [t, m] : merged) {
    if (m.first == 0.0 && m.second == 0.0) continue;
    fs.push_back(m.first);
    ft.push_back(m.second);
  }
  return {fs, ft};
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> support, std::vector<double> mass,
                                           double tolerance)
    : support_(std::move(support)), mass_(std::move(mass)) {
  if (support_.empty()) throw InputError("distribution: empty support");
  if (support_.size() != mass_.size()) throw InputError("distribution: support and mass differ in length");
  for (std::size_t j = 0; j < support_.size(); ++j) {
    if (!std::isfinite(support_[j])) throw InputError("distribution: non-finite support point");
    if (j > 0 && !(support_[j] > support_[j - 1]))
      throw InputError("distribution: support must be strictly increasing");
    if (!(mass_[j] >= 0.0) || !std::isfinite(mass_[j])) throw InputError("distribution: negative mass");
  }
  const double total = std::accumulate(mass_.begin(), mass_.end(), 0.0);
  if (std::abs(total - 1.0) > tolerance) throw InputError("distribution: masses do not sum to 1");

  tail_.assign(mass_.size() + 1, 0.0);
  for (std::size_t j = mass_.size(); j-- > 0;) tail_[j] = tail_[j + 1] + mass_[j];
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t k) {
  if (k == 0) throw InputError("uniform: k must be positive");
  std::vector<double> support(k), mass(k, 1.0 / static_cast<double>(k));
  std::iota(support.begin(), support.end(), 1.0);
  return {std::move(support), std::move(mass)};
}

DiscreteDistribution DiscreteDistribution::geometric_truncated(double p, std::size_t k) {
  if (!(p > 0.0 && p <= 1.0)) throw InputError("geometric: p must lie in (0, 1]");
  if (k == 0) throw InputError("geometric: k must be positive");
  std::vector<double> support(k), mass(k);
  std::iota(support.begin(), support.end(), 1.0);
  double remaining = 1.0;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    mass[j] = p * remaining;
    remaining *= 1.0 - p;
  }
  mass[k - 1] = remaining;
  return {std::move(support), std::move(mass)};
}

double DiscreteDistribution::survival_after(std::size_t j) const { return tail_.at(j + 1); }

double DiscreteDistribution::survival_before(std::size_t j) const { return tail_.at(j); }

DiscreteDistribution DiscreteDistribution::relabelled(std::span<const double> new_support) const {
  return {std::vector<double>(new_support.begin(), new_support.end()), mass_, 1e-9};
}

std::vector<double> discrete_hazard(const DiscreteDistribution& d) {
  return trace_on(d.mass()).hazard;
}

const char* to_string(OrderKind kind) {
  switch (kind) {
    case OrderKind::mhr: return "MHR";
    case OrderKind::hr: return "HR";
    case OrderKind::st: return "ST";
    case OrderKind::lr: return "LR";
  }
  return "?";
}

OrderReport check_orders(const DiscreteDistribution& S, const DiscreteDistribution& T) {
  const auto [fs, ft] = on_union(S, T);
  return compare_traces(trace_on(fs), trace_on(ft));
}

OrderVerdict check_order(const DiscreteDistribution& S, const DiscreteDistribution& T,
                         OrderKind kind) {
  return check_orders(S, T)[kind];
}

// ---------------------------------------------------------------------------

namespace {

void require_grid(std::span<const double> grid) {
  if (grid.empty()) throw InputError("parametric: empty grid");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] > 0.0) || !std::isfinite(grid[j])) throw InputError("parametric: grid must be positive");
    if (j > 0 && !(grid[j] > grid[j - 1])) throw InputError("parametric: grid must be increasing");
  }
}

struct TracePair {
  LawTrace S, T;
};

TracePair traces(const WeibullPair& w, std::span<const double> grid) {
  if (!(w.shape_S > 0 && w.scale_S > 0 && w.shape_T > 0 && w.scale_T > 0))
    throw InputError("weibull: parameters must be positive");
  auto fill = [&](double k, double s) {
    LawTrace t;
    for (double x : grid) {
      const double h = k / s * std::pow(x / s, k - 1.0);
      const double sf = std::exp(-std::pow(x / s, k));
      t.hazard.push_back(h);
      t.survival.push_back(sf);
      t.density.push_back(h * sf);
    }
    return t;
  };
  return {fill(w.shape_S, w.scale_S), fill(w.shape_T, w.scale_T)};
}

TracePair traces(const BetaPair& b, std::span<const double> grid) {
  if (!(b.alpha > 0 && b.beta_S > 0 && b.beta_T > 0)) throw InputError("beta: parameters must be positive");
  if (grid.back() >= 1.0) throw InputError("beta: grid must lie inside (0, 1)");
  auto fill = [&](double beta) {
    const boost::math::beta_distribution<double> law(b.alpha, beta);
    LawTrace t;
    for (double x : grid) {
      const double f = boost::math::pdf(law, x);
      const double sf = boost::math::cdf(boost::math::complement(law, x));
      t.density.push_back(f);
      t.survival.push_back(sf);
      t.hazard.push_back(f / sf);
    }
    return t;
  };
  return {fill(b.beta_S), fill(b.beta_T)};
}

TracePair traces(const GeometricPair& g, std::span<const double> grid) {
  if (!(g.p_S > 0 && g.p_S < 1 && g.p_T > 0 && g.p_T < 1)) throw InputError("geometric: p must lie in (0, 1)");
  for (double x : grid)
    if (x != std::floor(x)) throw InputError("geometric: grid must be positive integers");
  auto fill = [&](double p) {
    LawTrace t;
    for (double k : grid) {
      t.hazard.push_back(p);
      t.survival.push_back(std::pow(1.0 - p, k));
      t.density.push_back(p * std::pow(1.0 - p, k - 1.0));
    }
    return t;
  };
  return {fill(g.p_S), fill(g.p_T)};
}

TracePair traces(const ParametricPair& pair, std::span<const double> grid) {
  require_grid(grid);
  return std::visit([&](const auto& p) { return traces(p, grid); }, pair);
}

}  // namespace

std::vector<double> parametric_hazard_ratio(const ParametricPair& pair, std::span<const double> grid) {
  if (const auto* w = std::get_if<WeibullPair>(&pair)) {
    require_grid(grid);
    traces(*w, grid.first(1));  // parameter validation
    // Grouped so that equal shapes give an exactly constant ratio.
    const double constant = (w->shape_S / w->shape_T) * std::pow(w->scale_S, -w->shape_S) *
                            std::pow(w->scale_T, w->shape_T);
    std::vector<double> out;
    for (double x : grid) out.push_back(constant * std::pow(x, w->shape_S - w->shape_T));
    return out;
  }
  const auto tp = traces(pair, grid);
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = tp.S.hazard[j] / tp.T.hazard[j];
  return out;
}

OrderReport parametric_orders(const ParametricPair& pair, std::span<const double> grid) {
  const auto tp = traces(pair, grid);
  return compare_traces(tp.S, tp.T);
}

DiscreteDistribution nonincreasing_counterexample() {
  return {{1, 2, 3, 4, 5}, {0.27, 0.27, 0.26, 0.19, 0.01}};
}

std::vector<OrderExample> figure1_suite() {
  std::vector<double> weibull_grid, beta_grid, geometric_grid;
  for (int k = 1; k <= 500; ++k) weibull_grid.push_back(0.01 * k);
  for (int k = 1; k <= 200; ++k) beta_grid.push_back(0.99 * k / 200.0);
  for (int k = 1; k <= 40; ++k) geometric_grid.push_back(k);

  std::vector<OrderExample> out;
  out.push_back({"weibull", "S ~ Weibull(0.8, 1.2), T ~ Weibull(0.5, 1.5)",
                 parametric_orders(WeibullPair{0.8, 1.2, 0.5, 1.5}, weibull_grid)});
  out.push_back({"geometric", "S ~ Geometric(0.8), T ~ Geometric(0.5) on k = 1..40",
                 parametric_orders(GeometricPair{0.8, 0.5}, geometric_grid)});
  out.push_back({"beta", "S ~ Beta(0.3, 1), T ~ Beta(0.3, 6)",
                 parametric_orders(BetaPair{0.3, 1.0, 6.0}, beta_grid)});
  out.push_back({"uniform_vs_nonincreasing", "S ~ Uniform{1..5}, T non-increasing on {1..5}",
                 check_orders(DiscreteDistribution::uniform(5), nonincreasing_counterexample())});
  return out;
}

}  // namespace mhr
