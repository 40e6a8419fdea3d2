#pragma once

#include <cstdint>
#include <stdexcept>

#include "karlin/rng.hpp"

namespace karlin::stats {

/// Stability/occupancy parameter pair. alpha in (0,2], beta in (0,1).
struct StableParams {
  double alpha;
  double beta;

  StableParams(double a, double b) : alpha(a), beta(b) {
    if (!(a > 0.0 && a <= 2.0))
      throw std::domain_error("StableParams: alpha must lie in (0,2]");
    if (!(b > 0.0 && b < 1.0))
      throw std::domain_error("StableParams: beta must lie in (0,1)");
  }
};

/// Parameters of the compound-Poisson jump layer: the Poisson jump count has
/// mean 2^{1-beta} * mu(E0)^beta * C_alpha * eps^{-alpha}.
struct JumpLaw {
  double alpha;
  double epsilon;
  double e0_mass;
  double beta;

  JumpLaw(double a, double eps, double mass, double b)
      : alpha(a), epsilon(eps), e0_mass(mass), beta(b) {
    if (!(a > 0.0 && a < 2.0))
      throw std::domain_error("JumpLaw: alpha must lie in (0,2)");
    if (!(eps > 0.0)) throw std::domain_error("JumpLaw: epsilon must be > 0");
    if (!(mass > 0.0)) throw std::domain_error("JumpLaw: e0_mass must be > 0");
    if (!(b > 0.0 && b < 1.0))
      throw std::domain_error("JumpLaw: beta must lie in (0,1)");
  }

  double poisson_mean() const;
};

/// Normalizing constant of the SalphaS series representation,
/// (1-alpha) / (Gamma(2-alpha) cos(pi alpha / 2)), with value 2/pi at
/// alpha = 1 (removable singularity). Defined for alpha in (0,2).
double c_alpha(double alpha);

/// Standard deviation of the truncated small jumps,
/// sqrt(alpha C_alpha / (2-alpha)) * eps^{1 - alpha/2}. Returns 0 at eps = 0.
double sigma_alpha(double alpha, double epsilon);

/// Standard normal via Box-Muller (one value per call, deterministic).
double sample_normal(RngStream& rng);

/// Gamma(shape, 1). Marsaglia-Tsang for shape >= 1; the shape+1 power trick
/// covers shape in (0,1).
double sample_gamma(double shape, RngStream& rng);

/// Exact Poisson draw: inversion below mean 30, transformed rejection (PTRS)
/// above. Throws std::overflow_error if mean exceeds `mean_cap`.
std::int64_t sample_poisson(double mean, RngStream& rng,
                            double mean_cap = 1e8);

/// Sibuya(beta) pmf P(Q = k) = (beta/Gamma(1-beta)) Gamma(k-beta)/Gamma(k+1),
/// computed in log space.
double sibuya_pmf(double beta, std::int64_t k);

/// Random Poisson parameter of the Sibuya identity, G1 * G_{1-beta} / G_beta.
double sample_sibuya_parameter(double beta, RngStream& rng);

/// Sibuya(beta) draw as 1 + Poisson(G1 * G_{1-beta} / G_beta); always >= 1.
std::int64_t sample_sibuya(double beta, RngStream& rng);

/// Poisson jump count with mean 2^{1-beta} mu(E0)^beta C_alpha eps^{-alpha}.
/// Fails with std::overflow_error when the mean exceeds `mean_cap`
/// (resolution too fine / epsilon too small).
std::int64_t sample_jump_count(const JumpLaw& law, RngStream& rng,
                               double mean_cap = 1e8);

/// Jump magnitude with density eps^alpha (alpha/2) |y|^{-alpha-1} 1{|y|>eps}:
/// V = sign * eps * U^{-1/alpha}. Always |V| > eps.
double sample_jump_magnitude(double alpha, double epsilon, RngStream& rng);

/// Regularized upper incomplete gamma Q(a, x); used for chi-square p-values.
double gamma_q(double a, double x);

/// Upper-tail chi-square p-value with `df` degrees of freedom.
double chi_square_pvalue(double statistic, double df);

}  // namespace karlin::stats
