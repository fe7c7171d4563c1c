#pragma once

// Hazard algebra for discrete distributions and checkers for four stochastic
// orders of S relative to T:
//   MHR  lambda_S / lambda_T non-decreasing on the union of the supports
//   HR   survival_T / survival_S non-increasing
//   ST   F_S <= F_T everywhere
//   LR   f_S / f_T non-decreasing
// Ratios are compared by cross-multiplication, so the 0 and +inf conventions
// of the hazard ratio need no special casing.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mhr {

class DiscreteDistribution {
 public:
  /// Support strictly increasing, masses >= 0 summing to 1 within `tolerance`.
  DiscreteDistribution(std::vector<double> support, std::vector<double> mass,
                       double tolerance = 1e-12);

  static DiscreteDistribution uniform(std::size_t k);
  /// Geometric(p) on {1, ..., k} with the tail mass (1-p)^(k-1) placed on k.
  static DiscreteDistribution geometric_truncated(double p, std::size_t k);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t size() const { return support_.size(); }

  /// P(X > support[j]), as a tail sum.
  double survival_after(std::size_t j) const;
  /// P(X >= support[j]).
  double survival_before(std::size_t j) const;

  /// Same masses on a relabelled support (must stay strictly increasing).
  DiscreteDistribution relabelled(std::span<const double> new_support) const;

 private:
  std::vector<double> support_;
  std::vector<double> mass_;
  std::vector<double> tail_;  // tail_[j] = sum_{i >= j} mass_[i]
};

/// lambda(t_j) = f(t_j) / P(X >= t_j); zero where the remaining mass is zero.
std::vector<double> discrete_hazard(const DiscreteDistribution& d);

enum class OrderKind { mhr = 0, hr = 1, st = 2, lr = 3 };

const char* to_string(OrderKind kind);

struct OrderVerdict {
  bool holds = true;
  std::optional<std::size_t> witness;  // first evaluation point with a violation
};

struct OrderReport {
  std::array<OrderVerdict, 4> verdicts;

  const OrderVerdict& operator[](OrderKind k) const { return verdicts[static_cast<int>(k)]; }
  bool mhr() const { return (*this)[OrderKind::mhr].holds; }
  bool hr() const { return (*this)[OrderKind::hr].holds; }
  bool st() const { return (*this)[OrderKind::st].holds; }
  bool lr() const { return (*this)[OrderKind::lr].holds; }
};

/// Relative slack for floating comparisons a <= b.
inline constexpr double kOrderTolerance = 1e-10;

/// Verdict for "S >= T" in the given order, evaluated on the union support.
/// Witness indices refer to positions in the union support.
OrderVerdict check_order(const DiscreteDistribution& S, const DiscreteDistribution& T,
                         OrderKind kind);
OrderReport check_orders(const DiscreteDistribution& S, const DiscreteDistribution& T);

// --- parametric families ----------------------------------------------------

struct WeibullPair {
  double shape_S, scale_S, shape_T, scale_T;
};
struct BetaPair {
  double alpha, beta_S, beta_T;
};
/// Untruncated geometric laws on {1, 2, ...}; grids are support points.
struct GeometricPair {
  double p_S, p_T;
};
using ParametricPair = std::variant<WeibullPair, BetaPair, GeometricPair>;

/// lambda_S / lambda_T on `grid`: closed form for Weibull and geometric,
/// density over regularized incomplete beta for Beta.
std::vector<double> parametric_hazard_ratio(const ParametricPair& pair,
                                            std::span<const double> grid);

/// Order verdicts from the sign of successive differences on `grid`.
OrderReport parametric_orders(const ParametricPair& pair, std::span<const double> grid);

// --- reference instances -------------------------------------------------------

/// Non-increasing mass function on {1, ..., 5} against which Uniform{1..5}
/// is likelihood-ratio larger but not MHR larger.
DiscreteDistribution nonincreasing_counterexample();

struct OrderExample {
  std::string name;
  std::string description;
  OrderReport report;
};

/// The four order-relationship examples: Weibull, geometric, Beta and
/// uniform-versus-non-increasing pairs.
std::vector<OrderExample> figure1_suite();

}  // namespace mhr
