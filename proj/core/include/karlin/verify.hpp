#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "karlin/assembler.hpp"
#include "karlin/geometry.hpp"
#include "karlin/rng.hpp"

namespace karlin::verify {

/// Machine-readable outcome of one statistical check. Deterministic given
/// (seed, configuration).
struct TestReport {
  std::string name;
  double statistic = 0.0;  // chi-square value or max absolute deviation
  double threshold = 0.0;  // significance level or deviation budget
  double p_value = -1.0;   // < 0 when the check is not p-value based
  std::int64_t n = 0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::string detail;
};

std::string format_report(const TestReport& report);

enum class SamplerChoice { automatic, generic, fast };
enum class GaussianBackend { circulant, aggregation, cholesky };

/// Chi-square GOF of sample_sibuya against the pmf on bins k = 1..50 plus a
/// tail bin. `pmf_beta` defaults to the sampling beta; setting it differently
/// is the deliberate misspecification control.
TestReport check_sibuya_gof(double beta, std::int64_t n_samples,
                            RngStream& stream, double significance = 0.001,
                            double pmf_beta = -1.0);

/// Empirical E[D_t] and pairwise P(D_s = D_t = 1) against the closed forms at
/// >= 3 indices / pairs; pass within 3 standard errors.
TestReport check_occupancy_moments(const geometry::Geometry& geom, double beta,
                                   SamplerChoice sampler,
                                   std::int64_t n_replicates, RngStream& stream);

/// Two-sample chi-square of the joint odd-occupancy pmf, fast vs generic, on
/// a grid of at most 4 indices. `p_distortion` != 1 corrupts the fast path's
/// cell probabilities (power control).
TestReport check_sampler_equivalence(const geometry::Geometry& geom, double beta,
                                     std::int64_t n_replicates, RngStream& stream,
                                     double significance = 0.001,
                                     double p_distortion = 1.0);

/// Re of the empirical characteristic function of the combined field at the
/// grid's last index vs exp(-mu^beta(A_t) |theta|^alpha); max absolute
/// deviation over thetas against `tolerance`.
TestReport check_marginal_cf(const geometry::Geometry& geom,
                             const assembler::SimParams& params,
                             const std::vector<double>& thetas,
                             std::int64_t n_replicates, RngStream& stream,
                             double tolerance = 0.05);

/// Entrywise comparison of the sample covariance of a Gaussian backend
/// against the closed-form kernel on a small sub-grid; 3 SE plus an
/// m^{-1/2} slack for the aggregation backend.
TestReport check_gaussian_covariance(const geometry::Geometry& geom, double beta,
                                     GaussianBackend backend,
                                     std::int64_t n_paths, RngStream& stream);

/// The default battery run by the `verify` CLI subcommand.
std::vector<TestReport> run_default_suite(std::uint64_t seed);

}  // namespace karlin::verify
