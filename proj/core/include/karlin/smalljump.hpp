#pragma once

#include <cstdint>
#include <vector>

#include "karlin/field.hpp"
#include "karlin/geometry.hpp"
#include "karlin/rng.hpp"

namespace karlin::smalljump {

/// Closed-form covariance of the set-indexed fractional Brownian motion on a
/// geometry's index family, (1/2)(mu^b(A1) + mu^b(A2) - mu^b(A1 dA2)) with
/// b = 2H = beta. Hurst index H = beta/2 in (0, 1/2).
struct CovarianceKernel {
  geometry::Geometry geom;
  double beta;

  CovarianceKernel(geometry::Geometry g, double b);
  double hurst() const { return beta / 2.0; }
  double operator()(std::size_t index_a, std::size_t index_b) const;
};

/// Exact fractional Brownian motion with covariance
/// (1/2)(s^b + t^b - |s-t|^b) on a uniform grid {d, 2d, ..., nd}, via
/// circulant embedding of fractional Gaussian noise. B(0) = 0.
FieldGrid simulate_fbm_halfline(const std::vector<double>& grid, double beta,
                                RngStream& rng);

/// Aggregation recipe: m occupancy draws, scale (2^{1-b} mu^b(E0) / m)^{1/2}.
struct AggregationPlan {
  std::int64_t m;
  double scale;
};

/// m = ceil(tolerance^-2) so the CLT error proxy m^{-1/2} <= tolerance.
AggregationPlan plan_aggregation(double beta, double mu_e0, double tolerance);

/// CLT synthesis: scale * sum_j eps_j D_j over m odd-occupancy replicates
/// with i.i.d. standard normal weights; approximates the set-indexed
/// fractional Brownian motion on the geometry's index family.
FieldGrid simulate_gaussian_aggregation(const geometry::Geometry& geom,
                                        double beta,
                                        const AggregationPlan& plan,
                                        RngStream& rng,
                                        std::int64_t q_cap = 100000000);

/// Exact multivariate normal draw with the kernel covariance restricted to
/// `grid_subset` (flat indices; at most 4096 of them), via symmetric
/// eigendecomposition with eigenvalue clipping at 0 for entries in
/// [-1e-8 * trace, 0). Validation oracle for the approximate backends.
std::vector<double> simulate_gaussian_cholesky(
    const geometry::Geometry& geom, double beta,
    const std::vector<std::size_t>& grid_subset, RngStream& rng);

}  // namespace karlin::smalljump
