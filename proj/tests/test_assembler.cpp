#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "karlin/assembler.hpp"
#include "karlin/geometry.hpp"
#include "karlin/largejump.hpp"
#include "karlin/rng.hpp"
#include "karlin/stats.hpp"
#include "karlin/verify.hpp"
#include "oracles.hpp"

using karlin::RngStream;
namespace assembler = karlin::assembler;
namespace geometry = karlin::geometry;
namespace stats = karlin::stats;
namespace verify = karlin::verify;
using geometry::Geometry;

TEST_SUITE_BEGIN("assembler");

TEST_CASE("epsilon selection: closed form, oracle, scaling, domain") {
  // alpha = 1, tol = 0.01: (0.01 * 2 * sqrt(2/pi))^2 = 8e-4 / pi.
  const double eps1 = assembler::choose_epsilon(1.0, 0.01);
  CHECK(eps1 == doctest::Approx(8e-4 / oracles::kPi).epsilon(1e-12));
  CHECK(eps1 == doctest::Approx(2.546e-4).epsilon(2e-4));

  for (double alpha : {1.0, 1.2, 1.5, 1.8, 1.95}) {
    const double eps = assembler::choose_epsilon(alpha, 0.01);
    // Bisection on the monotone Berry-Esseen map as an independent oracle.
    CHECK(eps == doctest::Approx(oracles::choose_epsilon(alpha, 0.01)).epsilon(1e-9));
    // The defining equation holds to 1e-12.
    const double residual =
        std::pow(2.0 - alpha, 1.5) /
            ((3.0 - alpha) * std::sqrt(alpha * stats::c_alpha(alpha))) *
            std::pow(eps, alpha / 2.0) -
        0.01;
    CHECK(std::fabs(residual) < 1e-12);
    // Doubling the tolerance multiplies epsilon by 2^{2/alpha}.
    CHECK(assembler::choose_epsilon(alpha, 0.02) ==
          doctest::Approx(eps * std::pow(2.0, 2.0 / alpha)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(assembler::choose_epsilon(0.9, 0.01), std::domain_error);
  CHECK_THROWS_AS(assembler::choose_epsilon(2.0, 0.01), std::domain_error);
  CHECK_THROWS_AS(assembler::choose_epsilon(1.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(assembler::choose_epsilon(1.5, 1.0), std::domain_error);
}

TEST_CASE("alpha = 2 routes to the pure Gaussian backend") {
  const Geometry hl = geometry::make_geometry("halfline", 16, 0);
  assembler::SimParams params;
  params.alpha = 2.0;
  params.beta = 0.8;
  RngStream stream(71, 0);
  const auto r = assembler::assemble(hl, params, stream);
  CHECK(r.jump_count == 0);
  CHECK(r.sigma == 1.0);
  for (double v : r.large.values) CHECK(v == 0.0);
  CHECK(r.combined.values == r.small.values);
  CHECK(r.combined.component == karlin::Component::combined);

  assembler::SimParams bad = params;
  bad.epsilon = 0.1;
  RngStream stream2(71, 1);
  CHECK_THROWS_AS(assembler::assemble(hl, bad, stream2), std::invalid_argument);
}

TEST_CASE("alpha < 1 auto policy: eps = 1e-4 and no Gaussian term") {
  const Geometry hl = geometry::make_geometry("halfline", 4, 0);
  assembler::SimParams params;
  params.alpha = 0.5;
  params.beta = 0.8;
  RngStream stream(72, 0);
  const auto r = assembler::assemble(hl, params, stream);
  CHECK(r.epsilon == doctest::Approx(1e-4));
  CHECK(r.gaussian_skipped);
  CHECK(r.sigma == 0.0);
  for (double v : r.small.values) CHECK(v == 0.0);
  CHECK(r.combined.values == r.large.values);
}

TEST_CASE("auto epsilon matches choose_epsilon for alpha in [1,2)") {
  const Geometry hl = geometry::make_geometry("halfline", 4, 0);
  assembler::SimParams params;
  params.alpha = 1.2;
  params.beta = 0.8;
  params.marginal_tolerance = 0.01;
  RngStream stream(73, 0);
  const auto r = assembler::assemble(hl, params, stream);
  CHECK(r.epsilon == doctest::Approx(assembler::choose_epsilon(1.2, 0.01)));
  CHECK_FALSE(r.gaussian_skipped);
  CHECK(r.sigma == doctest::Approx(stats::sigma_alpha(1.2, r.epsilon)));
  // combined = large + sigma * small, entrywise.
  for (std::size_t i = 0; i < r.combined.values.size(); ++i)
    CHECK(r.combined.values[i] ==
          doctest::Approx(r.large.values[i] + r.sigma * r.small.values[i]));
}

TEST_CASE("large component comes from a disjoint, order-independent substream") {
  const Geometry rect = geometry::make_geometry("rectangle", 5, 5);
  assembler::SimParams params;
  params.alpha = 1.3;
  params.beta = 0.7;
  params.epsilon = 0.2;
  RngStream stream(74, 0);
  const auto r = assembler::assemble(rect, params, stream);

  // The large part must equal a standalone large-jump draw from substream(1).
  RngStream stream_b(74, 0);
  RngStream large_rng = stream_b.substream(1);
  const auto lj = karlin::largejump::simulate_large_jump(rect, 1.3, 0.7, 0.2, large_rng);
  CHECK(r.large.values == lj.field.values);
  CHECK(r.jump_count == lj.jump_count);

  // Determinism of the whole assembly.
  RngStream stream_c(74, 0);
  const auto r2 = assembler::assemble(rect, params, stream_c);
  CHECK(r2.combined.values == r.combined.values);
}

TEST_CASE("pin-down: vanishes at the origin, shift invariant") {
  karlin::FieldGrid f;
  f.values = {1.5, 2.0, -0.5, 3.0};
  f.shape = {4};
  const auto pinned = assembler::pin_down_sphere(f, 1);
  CHECK(pinned.values[1] == 0.0);
  CHECK(pinned.values[0] == doctest::Approx(-0.5));
  karlin::FieldGrid shifted = f;
  for (double& v : shifted.values) v += 7.25;
  const auto pinned2 = assembler::pin_down_sphere(shifted, 1);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(pinned2.values[i] == doctest::Approx(pinned.values[i]));
  CHECK_THROWS_AS(assembler::pin_down_sphere(f, 9), std::out_of_range);
}

TEST_CASE("sphere assembly pins the output at the pole") {
  const Geometry sph = geometry::make_geometry("sphere", 8, 5);
  assembler::SimParams params;
  params.alpha = 1.8;
  params.beta = 0.8;
  params.aggregation_tolerance = 0.2;  // m = 25, keep the test quick
  RngStream stream(75, 0);
  const auto r = assembler::assemble(sph, params, stream);
  // Flat index 0 is a pole node; every phi column repeats it.
  CHECK(r.combined.values[0] == 0.0);
  CHECK(r.small.values[0] == 0.0);
  CHECK(r.large.values[0] == 0.0);
}

TEST_CASE("scale normalization: alpha = 2 variance equals mu^beta(A_t)") {
  // This pins the Chentsov global scale: Var Y(t) = (2 ||t||)^beta.
  const Geometry ch{geometry::Chentsov2D{{0.5, 1.0}, {0.5, 1.0}}};
  assembler::SimParams params;
  params.alpha = 2.0;
  params.beta = 0.8;
  params.aggregation_tolerance = 0.05;  // m = 400
  const std::int64_t n = 3000;
  RngStream stream(76, 0);
  std::vector<double> draws(n);
  for (std::int64_t i = 0; i < n; ++i) {
    RngStream sub = stream.substream(i);
    draws[i] = assembler::assemble(ch, params, sub).combined.values[3];  // t=(1,1)
  }
  const double target = std::pow(2.0 * std::sqrt(2.0), 0.8);
  const double se = target * std::sqrt(2.0 / static_cast<double>(n));
  CHECK(std::fabs(oracles::variance(draws) - target) <
        3.0 * se + 2.0 * target * 0.05);
}

TEST_CASE("marginal characteristic function at alpha = 2 (exact case)") {
  const Geometry hl = geometry::make_geometry("halfline", 4, 0);
  assembler::SimParams params;
  params.alpha = 2.0;
  params.beta = 0.8;
  RngStream stream(77, 0);
  const auto report =
      verify::check_marginal_cf(hl, params, {0.5, 1.0, 2.0}, 5000, stream, 0.05);
  INFO(report.detail);
  CHECK(report.pass);
}

TEST_SUITE_END();
