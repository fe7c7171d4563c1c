#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mhr/error.hpp"
#include "mhr/estimator.hpp"
#include "support.hpp"

using namespace mhr;
using Catch::Approx;

namespace {

// Treatment events {1, 3}, control events {2, 4}, nothing censored.
CensoredSample toy() { return testing::make_sample({1, 3, 2, 4}, {1, 1, 1, 1}, {1, 1, 0, 0}); }

CensoredSample transformed(const CensoredSample& s) {
  std::vector<Observation> obs = s.observations();
  for (auto& o : obs) o.time = o.time * o.time * o.time;
  return CensoredSample(std::move(obs));
}

}  // namespace

TEST_CASE("truncation fraction", "[estimator]") {
  const auto rec = TruncationPolicy::recommended();
  CHECK(truncation_fraction(500, rec) == 0.05);
  CHECK(truncation_fraction(999, rec) == 0.05);
  CHECK(truncation_fraction(1000, rec) == Approx(0.0579).margin(5e-5));
  CHECK(truncation_fraction(1000000, rec) == Approx(2.48e-4).margin(5e-7));
  CHECK(truncation_fraction(10, TruncationPolicy::fixed(0.2)) == 0.2);
  CHECK_THROWS_AS(TruncationPolicy::fixed(0.0), InputError);
  CHECK_THROWS_AS(TruncationPolicy::fixed(1.0), InputError);
}

TEST_CASE("truncation time uses the ceiling-index quantile", "[estimator]") {
  std::vector<double> times;
  std::vector<int> status, arms;
  for (int k = 1; k <= 10; ++k) {
    times.push_back(k);
    times.push_back(2 * k);
    status.insert(status.end(), {1, 1});
    arms.insert(arms.end(), {0, 1});
  }
  const auto s = testing::make_sample(times, status, arms);
  CHECK(gamma_n(s, 0.2) == 8.0);
  CHECK(empirical_quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.8) == 8.0);
  CHECK(empirical_quantile({2, 4, 6, 8, 10, 12, 14, 16, 18, 20}, 0.8) == 16.0);
  CHECK(gamma_n(s, 1e-6) == 10.0);
}

TEST_CASE("toy fit has unit hazard ratio", "[estimator]") {
  const auto fit = fit_theta(toy(), TruncationPolicy::recommended());
  CHECK(fit.gamma_n == 3.0);  // min of the arm maxima
  CHECK(fit.eta_n == Approx(0.5));

  const auto forced = fit_theta_at_horizon(toy(), 4.0);
  CHECK(forced.eta_n == Approx(1.5));
  for (double x : {0.0, 1.0, 2.0, 3.0, 4.0}) CHECK(theta_at(forced, x) == Approx(1.0));
  CHECK(theta_at(forced, 4.0) == forced.hull.slopes.back());
  CHECK_THROWS_AS(theta_at(forced, 5.0), DomainError);
  CHECK(theta_at_clamped(forced, 5.0) == forced.hull.slopes.back());

  const auto curve = diagnostic_curve(forced);
  CHECK(curve.points == std::vector<PlanePoint>{{0, 0}, {0.5, 0.5}, {1.5, 1.5}});
  CHECK(curve.max_gap() == Approx(0.0).margin(1e-15));
}

TEST_CASE("late treatment events give a flat start", "[estimator]") {
  const auto s = testing::make_sample({1, 2, 3, 5, 6, 7}, {1, 1, 1, 1, 1, 1}, {0, 0, 0, 1, 1, 1});
  // every treatment event lies beyond the horizon
  CHECK_THROWS_AS(fit_theta_at_horizon(s, 3.0), DegenerateError);

  const auto s2 = testing::make_sample({1, 2, 3, 2.5, 6, 7}, {1, 1, 1, 1, 1, 1}, {0, 0, 0, 1, 1, 1});
  const auto fit2 = fit_theta_at_horizon(s2, 3.0);
  CHECK(theta_at(fit2, 0.5) == 0.0);
  CHECK(theta_at(fit2, 1.0) == 0.0);
}

TEST_CASE("single control event gives one hull segment", "[estimator]") {
  const auto s = testing::make_sample({1, 2, 0.5}, {1, 0, 1}, {0, 0, 1});
  const auto fit = fit_theta_at_horizon(s, 2.0);
  const auto curve = diagnostic_curve(fit);
  CHECK(curve.points.size() == 2);
  CHECK(curve.hull.slopes.size() == 1);
}

TEST_CASE("estimate is non-decreasing and non-negative", "[estimator][property]") {
  std::mt19937_64 rng(17);
  int fitted = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto s = testing::random_sample(rng, 20 + rep % 80, rep % 4 == 0);
    MhrFit fit;
    try {
      fit = fit_theta(s, TruncationPolicy::recommended());
    } catch (const DegenerateError&) {
      continue;
    }
    ++fitted;
    double prev = fit.theta.value_at_zero();
    CHECK(prev >= 0.0);
    for (double v : fit.theta.values()) {
      CHECK(v >= prev);
      prev = v;
    }
  }
  CHECK(fitted > 900);
}

TEST_CASE("estimate is equivariant under increasing time maps", "[estimator][property]") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = testing::random_sample(rng, 30 + rep, rep % 3 == 0);
    MhrFit fit;
    try {
      fit = fit_theta(s, TruncationPolicy::recommended());
    } catch (const DegenerateError&) {
      continue;
    }
    const auto fit_psi = fit_theta(transformed(s), TruncationPolicy::recommended());
    CHECK(fit_psi.gamma_n == fit.gamma_n * fit.gamma_n * fit.gamma_n);
    for (double x : fit.theta.knots()) CHECK(theta_at(fit_psi, x * x * x) == theta_at(fit, x));
  }
}

TEST_CASE("swapping arms reflects the diagnostic curve", "[estimator][property]") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = testing::random_sample(rng, 40, false, 0.0);
    const double horizon = 0.5;
    MhrFit a, b;
    try {
      a = fit_theta_at_horizon(s, horizon);
      b = fit_theta_at_horizon(s.with_arms_swapped(), horizon);
    } catch (const DegenerateError&) {
      continue;
    }
    // (Lambda_T, Lambda_S) at control times against (Lambda_S, Lambda_T) at treatment times:
    // both are samples of the same curve in the plane, with axes exchanged.
    const auto pa = diagnostic_curve(a).points;
    const auto pb = diagnostic_curve(b).points;
    for (const auto& p : pb) {
      // every reflected point lies on the step curve of the first fit
      const double t = a.lambda_S_hat.generalized_inverse(p.u);
      CHECK(a.lambda_T_hat(t) == Approx(p.v));
    }
    CHECK(pa.front() == pb.front());
  }
}
