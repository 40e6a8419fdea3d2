#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "karlin/geometry.hpp"
#include "karlin/rng.hpp"
#include "karlin/smalljump.hpp"
#include "karlin/verify.hpp"
#include "oracles.hpp"

using karlin::RngStream;
namespace geometry = karlin::geometry;
namespace smalljump = karlin::smalljump;
namespace verify = karlin::verify;
using geometry::Geometry;

namespace {

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("smalljump");

TEST_CASE("covariance kernel closed forms") {
  const double beta = 0.7;
  const Geometry hl{geometry::HalfLine{{0.1, 0.2, 0.4, 0.5, 0.8, 1.0}}};
  const smalljump::CovarianceKernel k(hl, beta);
  CHECK(k.hurst() == doctest::Approx(0.35));
  CHECK(k(5, 5) == doctest::Approx(1.0));  // s = t = 1
  // (1/2)(s^b + t^b - |s-t|^b) at s = 0.5, t = 1.
  CHECK(k(3, 5) == doctest::Approx(
                       0.5 * (std::pow(0.5, beta) + 1.0 - std::pow(0.5, beta))));
  // Self-similarity: cov(2s, 2t) = 2^beta cov(s, t) with (s,t) = (0.1, 0.2).
  CHECK(k(1, 2) == doctest::Approx(std::pow(2.0, beta) * k(0, 1)));

  const Geometry rect{geometry::Rectangle{{0.5, 1.0}, {0.5, 1.0}}};
  const smalljump::CovarianceKernel kr(rect, beta);
  CHECK(kr(3, 3) == doctest::Approx(1.0));  // t = (1,1)

  geometry::Sphere sph{8, 5, true};  // hemisphere mode: rotationally stationary
  const smalljump::CovarianceKernel ks(Geometry{sph}, beta);
  const double two_h = beta;
  CHECK(ks(2, 2) == doctest::Approx(std::pow(2.0 * oracles::kPi, two_h)));
  // Stationary closed form (2pi)^{2H} (1 - (1/2)(2/pi)^{2H} d^{2H}).
  const double d = oracles::kPi / 2.0;  // pole (index 0) to equator (index 2)
  const double target = std::pow(2.0 * oracles::kPi, two_h) *
                        (1.0 - 0.5 * std::pow(2.0 / oracles::kPi, two_h) *
                                   std::pow(d, two_h));
  CHECK(ks(0, 2) == doctest::Approx(target).epsilon(1e-12));
}

TEST_CASE("circulant fBm: pinned origin, variance and covariance") {
  const auto grid = uniform_grid(8);
  RngStream rng(61, 0);
  const double beta = 0.8;
  const std::int64_t n = 10000;
  std::vector<double> b_half(n), b_one(n);
  for (std::int64_t i = 0; i < n; ++i) {
    RngStream sub = rng.substream(i);
    const auto path = smalljump::simulate_fbm_halfline(grid, beta, sub);
    REQUIRE(path.values.size() == 8);
    b_half[i] = path.values[3];  // t = 0.5
    b_one[i] = path.values[7];   // t = 1
  }
  // Var B(1) = 1; Cov(B(0.5), B(1)) = (0.5^b + 1 - 0.5^b)/2 = 0.5.
  CHECK(oracles::variance(b_one) ==
        doctest::Approx(1.0).epsilon(3.0 * std::sqrt(2.0 / static_cast<double>(n))));
  CHECK(oracles::covariance(b_half, b_one) == doctest::Approx(0.5).epsilon(0.05));
  // Increment stationarity: Var(B(1) - B(0.5)) = 0.5^beta.
  std::vector<double> incr(n);
  for (std::int64_t i = 0; i < n; ++i) incr[i] = b_one[i] - b_half[i];
  CHECK(oracles::variance(incr) == doctest::Approx(std::pow(0.5, beta)).epsilon(0.06));
  CHECK_THROWS_AS(
      smalljump::simulate_fbm_halfline({0.1, 0.3, 0.35}, beta, rng),
      std::invalid_argument);
}

TEST_CASE("aggregation plan sizes") {
  CHECK(smalljump::plan_aggregation(0.8, 1.0, 0.02).m == 2500);
  CHECK(smalljump::plan_aggregation(0.8, 1.0, 1.0).m == 1);
  CHECK(smalljump::plan_aggregation(0.8, 1.0, 0.1).m == 100);
  const auto plan = smalljump::plan_aggregation(0.6, 2.0, 0.05);
  CHECK(plan.m == 400);
  CHECK(plan.scale ==
        doctest::Approx(std::sqrt(std::pow(2.0, 0.4) * std::pow(2.0, 0.6) / 400.0)));
}

TEST_CASE("aggregation with m = 1 takes at most two values") {
  const Geometry hl{geometry::HalfLine{uniform_grid(6)}};
  smalljump::AggregationPlan plan{1, 0.7};
  RngStream rng(62, 0);
  for (int rep = 0; rep < 200; ++rep) {
    RngStream sub = rng.substream(rep);
    const auto f = smalljump::simulate_gaussian_aggregation(hl, 0.5, plan, sub);
    double weight = 0.0;
    for (double v : f.values) {
      if (v != 0.0) {
        if (weight == 0.0) weight = v;
        CHECK(v == weight);  // scale * eps_1 * D with D in {0,1}
      }
    }
  }
}

TEST_CASE("aggregation reproduces the kernel covariance") {
  RngStream rng(63, 0);
  const Geometry rect = geometry::make_geometry("rectangle", 3, 3);
  const auto report = verify::check_gaussian_covariance(
      rect, 0.8, verify::GaussianBackend::aggregation, 4000, rng);
  INFO(report.detail);
  CHECK(report.pass);
}

TEST_CASE("exact eigen-decomposition backend on small grids") {
  const Geometry hl{geometry::HalfLine{uniform_grid(5)}};
  const double beta = 0.8;
  const smalljump::CovarianceKernel kernel(hl, beta);

  // Scalar case: t = 1 alone is standard normal.
  RngStream rng(64, 0);
  const std::int64_t n = 20000;
  std::vector<double> scalar(n);
  for (std::int64_t i = 0; i < n; ++i) {
    RngStream sub = rng.substream(i);
    scalar[i] = smalljump::simulate_gaussian_cholesky(hl, beta, {4}, sub)[0];
  }
  CHECK(oracles::variance(scalar) ==
        doctest::Approx(1.0).epsilon(3.0 * std::sqrt(2.0 / static_cast<double>(n))));

  // 5-point grid: sample covariance vs the kernel, 3 SE entrywise.
  std::vector<std::size_t> subset{0, 1, 2, 3, 4};
  std::vector<std::vector<double>> draws(5, std::vector<double>(n));
  RngStream rng2(64, 1);
  for (std::int64_t i = 0; i < n; ++i) {
    RngStream sub = rng2.substream(i);
    const auto x = smalljump::simulate_gaussian_cholesky(hl, beta, subset, sub);
    for (std::size_t j = 0; j < 5; ++j) draws[j][i] = x[j];
  }
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = a; b < 5; ++b) {
      const double target = kernel(a, b);
      const double est = oracles::covariance(draws[a], draws[b]);
      const double se = std::sqrt((kernel(a, a) * kernel(b, b) + target * target) /
                                  static_cast<double>(n));
      CHECK(std::fabs(est - target) < 3.0 * se);
    }
  CHECK_THROWS_AS(smalljump::simulate_gaussian_cholesky(
                      hl, beta, std::vector<std::size_t>(5000, 0), rng2),
                  std::invalid_argument);
}

TEST_CASE("circulant and exact backends agree in distribution") {
  const auto grid = uniform_grid(8);
  const Geometry hl{geometry::HalfLine{grid}};
  std::vector<std::size_t> all{0, 1, 2, 3, 4, 5, 6, 7};
  const double beta = 0.6;
  const std::int64_t n = 4000;
  // Two linear functionals: the endpoint and the path sum.
  std::vector<double> f1_end(n), f1_sum(n), f2_end(n), f2_sum(n);
  RngStream r1(65, 0), r2(65, 1);
  for (std::int64_t i = 0; i < n; ++i) {
    RngStream s1 = r1.substream(i), s2 = r2.substream(i);
    const auto a = smalljump::simulate_fbm_halfline(grid, beta, s1);
    const auto b = smalljump::simulate_gaussian_cholesky(hl, beta, all, s2);
    f1_end[i] = a.values[7];
    f2_end[i] = b[7];
    double sa = 0.0, sb = 0.0;
    for (std::size_t j = 0; j < 8; ++j) {
      sa += a.values[j];
      sb += b[j];
    }
    f1_sum[i] = sa;
    f2_sum[i] = sb;
  }
  const double n_eff = static_cast<double>(n) / 2.0;
  const double d_end = oracles::ks_two_sample(f1_end, f2_end);
  const double d_sum = oracles::ks_two_sample(f1_sum, f2_sum);
  CHECK(oracles::ks_pvalue(d_end, n_eff) > 0.001);
  CHECK(oracles::ks_pvalue(d_sum, n_eff) > 0.001);
}

TEST_CASE("aggregation CLT: Kolmogorov distance shrinks with m") {
  // Standardized marginal at t = (1,1) on the 1x1 rectangle grid; the
  // aggregated variance is exactly 1 there.
  const Geometry rect{geometry::Rectangle{{1.0}, {1.0}}};
  const double beta = 0.8;
  const std::int64_t paths = 4000;
  std::vector<double> distance;
  for (std::int64_t m : {25, 400, 2500}) {
    smalljump::AggregationPlan plan{
        m, std::sqrt(std::pow(2.0, 1.0 - beta) / static_cast<double>(m))};
    RngStream rng(66, static_cast<std::uint64_t>(m));
    std::vector<double> draws(paths);
    for (std::int64_t i = 0; i < paths; ++i) {
      RngStream sub = rng.substream(i);
      draws[i] = smalljump::simulate_gaussian_aggregation(rect, beta, plan, sub)
                     .values[0];
    }
    const double d = oracles::ks_statistic(draws, oracles::std_normal_cdf);
    // Berry-Esseen bound 3.3/sqrt(m) plus Monte Carlo slack.
    CHECK(d <= 3.3 / std::sqrt(static_cast<double>(m)) +
                   1.63 / std::sqrt(static_cast<double>(paths)));
    distance.push_back(d);
  }
  CHECK(distance[2] <= distance[0] + 0.02);  // decreasing trend, MC wiggle
}

TEST_SUITE_END();
