#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "mhr/error.hpp"
#include "mhr/inference.hpp"
#include "support.hpp"

using namespace mhr;
using Catch::Approx;

namespace {

std::vector<PlanePoint> line_points(std::size_t m, double slope, double intercept) {
  std::vector<PlanePoint> pts;
  for (std::size_t k = 0; k < m; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(m - 1);
    pts.push_back({u, intercept + slope * u});
  }
  return pts;
}

// Held-out error by brute force: refit without every point sharing the
// response of point i.
std::optional<double> brute_cv(const std::vector<PlanePoint>& pts, double h) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<PlanePoint> rest;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (pts[j].v != pts[i].v) rest.push_back(pts[j]);
    double sw = 0, su = 0, sv = 0;
    for (const auto& p : rest) {
      const double w = epanechnikov((p.u - pts[i].u) / h);
      sw += w;
      su += w * p.u;
      sv += w * p.v;
    }
    if (!(sw > 0)) return std::nullopt;
    const double ub = su / sw, vb = sv / sw;
    double suu = 0, suv = 0;
    int used = 0;
    for (const auto& p : rest) {
      const double w = epanechnikov((p.u - pts[i].u) / h);
      if (w > 0) ++used;
      suu += w * (p.u - ub) * (p.u - ub);
      suv += w * (p.u - ub) * (p.v - vb);
    }
    if (used < 2 || !(suu > 0)) return std::nullopt;
    const double b = suv / suu;
    const double pred = vb + b * (pts[i].u - ub);
    total += (pts[i].v - pred) * (pts[i].v - pred);
  }
  return total / static_cast<double>(pts.size());
}

}  // namespace

TEST_CASE("quantiles of the reference distributions", "[inference]") {
  CHECK(normal_quantile(0.975) == Approx(1.959963985).epsilon(1e-9));
  CHECK(normal_quantile(0.5) == Approx(0.0).margin(1e-15));
  CHECK(student_t_quantile(0.975, 4) == Approx(2.776445105).epsilon(1e-9));
  CHECK(student_t_quantile(0.975, 1) == Approx(12.70620474).epsilon(1e-9));
  CHECK_THROWS_AS(normal_quantile(1.0), InputError);
  CHECK_THROWS_AS(student_t_quantile(0.9, 0.0), InputError);
}

TEST_CASE("Epanechnikov kernel", "[inference]") {
  CHECK(epanechnikov(0.0) == 0.75);
  CHECK(epanechnikov(0.5) == Approx(0.5625));
  CHECK(epanechnikov(1.0) == 0.0);
  CHECK(epanechnikov(-1.5) == 0.0);
}

TEST_CASE("local linear slope reproduces straight lines", "[inference]") {
  const auto pts = line_points(30, 2.5, -1.0);
  for (double u0 : {0.0, 0.3, 0.77, 1.0})
    for (double h : {0.1, 0.4, 2.0}) CHECK(local_linear_slope(pts, u0, h) == Approx(2.5).epsilon(1e-10));
  CHECK_THROWS_AS(local_linear_slope(pts, 0.5, 0.001), DegenerateError);
  CHECK_THROWS_AS(local_linear_slope(pts, 0.5, 0.0), InputError);
}

TEST_CASE("leave-one-out error is zero on a line", "[inference]") {
  const auto pts = line_points(25, -0.7, 3.0);
  const auto err = local_linear_cv_error(pts, 0.3);
  REQUIRE(err);
  CHECK(*err == Approx(0.0).margin(1e-20));
  CHECK_FALSE(local_linear_cv_error(pts, 0.01));
}

TEST_CASE("held-out error matches brute force", "[inference][property]") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.2);
  for (int rep = 0; rep < 50; ++rep) {
    auto pts = line_points(15 + rep % 10, 1.0, 0.0);
    for (auto& p : pts) p.v = std::sin(3 * p.u) + noise(rng);
    for (double h : {0.15, 0.3, 0.6}) {
      const auto fast = local_linear_cv_error(pts, h);
      const auto slow = brute_cv(pts, h);
      REQUIRE(fast.has_value() == slow.has_value());
      if (fast) CHECK(*fast == Approx(*slow).epsilon(1e-10));
    }
  }
}

TEST_CASE("CV bandwidth is the exhaustive argmin", "[inference][property]") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int rep = 0; rep < 30; ++rep) {
    auto pts = line_points(40, 1.0, 0.0);
    for (auto& p : pts) p.v = p.u * p.u * 4 + noise(rng);
    const auto grid = default_bandwidth_grid(pts);
    REQUIRE(grid.size() == 20);
    CHECK(grid.front() == Approx(0.1));
    CHECK(grid.back() == Approx(0.5));
    const double chosen = cv_bandwidth(pts, grid);
    double best = 1e300;
    for (double h : grid)
      if (auto e = local_linear_cv_error(pts, h)) best = std::min(best, *e);
    const auto at = local_linear_cv_error(pts, chosen);
    REQUIRE(at);
    CHECK(*at <= best * (1 + 1e-9) + 1e-300);
  }
}

TEST_CASE("flat runs are held out together", "[inference]") {
  // staircase v = floor(8u) / 8 sampled on 81 points: every run has 10 points
  std::vector<PlanePoint> pts;
  for (int k = 0; k <= 80; ++k) {
    const double u = k / 80.0;
    pts.push_back({u, std::floor(8 * u) / 8});
  }
  // leaving out one point at a time would fit each run exactly at small h
  CHECK_FALSE(local_linear_cv_error(pts, 0.05));
  const auto grid = default_bandwidth_grid(pts);
  const double h = cv_bandwidth(pts, grid);
  CHECK(h > 0.125);
  CHECK(local_linear_slope(pts, 0.5, h) == Approx(1.0).margin(0.15));
}

TEST_CASE("CV ties go to the widest bandwidth", "[inference]") {
  const auto pts = line_points(20, 1.0, 0.0);
  const std::vector<double> grid{0.2, 0.3, 0.5};
  CHECK(cv_bandwidth(pts, grid) == 0.5);
  const std::vector<double> tiny{1e-4};
  CHECK_THROWS_AS(cv_bandwidth(pts, tiny), DegenerateError);
}

TEST_CASE("scale formula", "[inference]") {
  ScaleComponents c{};
  c.derivative = 0.5;
  c.theta = 2.0;
  c.pi = 0.5;
  c.surv_S = 0.5;
  c.cens_U_left = 1.0;
  c.surv_T = 0.25;
  c.cens_V_left = 0.5;
  // 4 * 0.5 * (2 / 0.25 + 4 / 0.0625) = 2 * 72 = 144
  CHECK(tau_from_components(c) == Approx(std::cbrt(144.0)));
  c.derivative = 0.0;
  CHECK(tau_from_components(c) == 0.0);
  c.derivative = -0.3;
  CHECK(tau_from_components(c) == 0.0);
  CHECK(plugin_half_width(2.0, 1.0, 1000) == Approx(0.2));
  CHECK(derivative_grid_size(1000) == 100);
  CHECK(derivative_grid_size(27) == 9);
}

TEST_CASE("split summaries and t intervals", "[inference]") {
  const std::vector<double> est{1.0, 2.0, 3.0, 4.0, 5.0};
  const auto s = summarize_splits(est);
  CHECK(s.pooled == 3.0);
  CHECK(s.sd == Approx(std::sqrt(2.5)));
  const auto ci = split_ci(s, 1.0, 0.05);
  const double half = 2.776445105 * std::sqrt(2.5) / std::sqrt(5.0);
  CHECK(ci.lower == Approx(3.0 - half));
  CHECK(ci.upper == Approx(3.0 + half));
  CHECK(ci.method == CiMethod::split);
  CHECK(ci.contains(3.0));
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(summarize_splits(one), InputError);
  CHECK_THROWS_AS(split_ci(s, 1.0, 1.5), InputError);
}

TEST_CASE("split fits partition the sample", "[inference]") {
  std::mt19937_64 rng(21);
  const auto s = testing::random_sample(rng, 400, false, 0.2);
  const auto fit = split_fit(s, 4, TruncationPolicy::recommended(), 9);
  REQUIRE(fit.m() == 4);
  std::size_t total = 0;
  for (const auto& f : fit.fits()) total += f.n;
  CHECK(total == 400);

  const auto again = split_fit(s, 4, TruncationPolicy::recommended(), 9);
  for (std::size_t k = 0; k < 4; ++k) CHECK(again.fits()[k].gamma_n == fit.fits()[k].gamma_n);

  double min_gamma = 1e300, max_gamma = 0;
  for (const auto& f : fit.fits()) {
    min_gamma = std::min(min_gamma, f.gamma_n);
    max_gamma = std::max(max_gamma, f.gamma_n);
  }
  CHECK_NOTHROW(split_ci(fit, 0.5 * min_gamma, 0.05));
  CHECK_THROWS_AS(split_ci(fit, max_gamma * 1.01, 0.05), DomainError);

  CHECK_THROWS_AS(split_fit(s, 1, TruncationPolicy::recommended(), 1), InputError);
  CHECK_THROWS_AS(split_fit(s, 401, TruncationPolicy::recommended(), 1), DegenerateError);
}

TEST_CASE("plug-in interval is centred on the estimate", "[inference]") {
  std::mt19937_64 rng(33);
  const auto s = testing::random_sample(rng, 600, false, 0.2);
  const auto fit = fit_theta(s, TruncationPolicy::recommended());
  ChernoffTable table;
  table.probabilities = {0.025, 0.5, 0.975};
  table.quantiles = {-1.0, 0.0, 1.0};
  const ScaleEstimator scale(fit, s);
  CHECK(scale.derivative_grid().size() == derivative_grid_size(600));
  CHECK(scale.bandwidth() > 0.0);
  const double x = 0.5 * fit.gamma_n;
  const auto ci = plugin_ci(scale, x, 0.05, table);
  CHECK(ci.estimate == theta_at(fit, x));
  CHECK(ci.upper - ci.estimate == Approx(ci.estimate - ci.lower));
  CHECK(ci.upper - ci.lower == Approx(2 * scale.tau(x) / std::cbrt(600.0)));
  CHECK_THROWS_AS(scale.components(fit.gamma_n * 1.5), DomainError);
}

TEST_CASE("local slope on smooth curves", "[inference][property]") {
  std::vector<PlanePoint> sq, flat, wave;
  for (int k = 0; k <= 2000; ++k) {
    const double u = k / 2000.0;
    sq.push_back({u, u * u});
    flat.push_back({u, 3.0});
    wave.push_back({u, std::sin(4 * u)});
  }
  CHECK(local_linear_slope(sq, 0.5, 0.05) == Approx(1.0).margin(1e-6));
  CHECK(local_linear_slope(flat, 0.4, 0.1) == Approx(0.0).margin(1e-12));
  // error against the centred difference shrinks like h^2
  for (double h : {0.02, 0.05, 0.1}) {
    const double u0 = 0.5;
    const double centred = (std::sin(4 * (u0 + h)) - std::sin(4 * (u0 - h))) / (2 * h);
    CHECK(std::abs(local_linear_slope(wave, u0, h) - centred) <= 16 * h * h);
  }
}

TEST_CASE("scale examples", "[inference]") {
  ScaleComponents c{};
  c.derivative = 2.0;
  c.theta = 1.0;
  c.pi = 0.5;
  c.surv_S = 0.8;
  c.cens_U_left = 1.0;
  c.surv_T = 1.0;
  c.cens_V_left = 0.8;
  CHECK(tau_from_components(c) == Approx(std::cbrt(40.0)));
  const double base = tau_from_components(c);
  c.cens_U_left = 2.0;  // products doubled
  c.surv_T = 2.0;
  CHECK(tau_from_components(c) == Approx(base * std::cbrt(0.5)));

  // theta 1, tau 3.42, n 1000, q 0.998
  const double half = plugin_half_width(3.42, 0.998, 1000);
  CHECK(1.0 - half == Approx(0.659).margin(5e-4));
  CHECK(1.0 + half == Approx(1.341).margin(5e-4));
  CHECK(plugin_half_width(3.0, 1.0, 8000) == Approx(plugin_half_width(3.0, 1.0, 1000) / 2));
}

TEST_CASE("split interval examples", "[inference]") {
  const std::vector<double> est{1.0, 1.2, 0.8, 1.1, 0.9};
  const auto s = summarize_splits(est);
  CHECK(s.pooled == Approx(1.0));
  CHECK(s.sd == Approx(0.1581).margin(1e-4));
  const auto ci = split_ci(s, 1.0, 0.05);
  CHECK(ci.lower == Approx(0.804).margin(5e-4));
  CHECK(ci.upper == Approx(1.196).margin(5e-4));
  CHECK(split_ci(s, 1.0, 0.2).upper < ci.upper);

  const std::vector<double> same{0.7, 0.7, 0.7};
  const auto z = split_ci(summarize_splits(same), 1.0, 0.05);
  CHECK(z.lower == z.estimate);
  CHECK(z.upper == z.estimate);
  CHECK(z.estimate == Approx(0.7));
}

TEST_CASE("scale estimate ignores subject order", "[inference][property]") {
  std::mt19937_64 rng(44);
  for (int rep = 0; rep < 10; ++rep) {
    const auto s = testing::random_sample(rng, 300, false, 0.2);
    auto obs = s.observations();
    std::shuffle(obs.begin(), obs.end(), rng);
    const CensoredSample shuffled(std::move(obs));
    const auto fit = fit_theta(s, TruncationPolicy::recommended());
    const auto fit2 = fit_theta(shuffled, TruncationPolicy::recommended());
    const double x = 0.4 * fit.gamma_n;
    double a = 0, b = 0;
    try {
      a = estimate_tau(fit, s, x);
    } catch (const DegenerateError&) {
      continue;
    }
    b = estimate_tau(fit2, shuffled, x);
    CHECK(a == b);
  }
}

TEST_CASE("plug-in intervals contain the estimate", "[inference][property]") {
  std::mt19937_64 rng(45);
  ChernoffTable table;
  table.probabilities = {0.5, 0.975};
  table.quantiles = {0.0, 1.0};
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = testing::random_sample(rng, 200 + 10 * rep, rep % 2 == 0, 0.2);
    MhrFit fit;
    try {
      fit = fit_theta(s, TruncationPolicy::recommended());
    } catch (const DegenerateError&) {
      continue;
    }
    const ScaleEstimator scale(fit, s);
    for (int k = 1; k < 10; ++k) {
      const double x = fit.gamma_n * k / 10.0;
      try {
        const auto ci = plugin_ci(scale, x, 0.05, table);
        CHECK(ci.lower <= ci.estimate);
        CHECK(ci.estimate <= ci.upper);
      } catch (const DegenerateError&) {
      }
    }
  }
}
