#pragma once

#include <cstdint>
#include <optional>

#include "karlin/field.hpp"
#include "karlin/geometry.hpp"
#include "karlin/rng.hpp"

namespace karlin::assembler {

/// Full experiment configuration for one field draw.
struct SimParams {
  double alpha = 1.2;
  double beta = 0.8;
  std::optional<double> epsilon;        // nullopt = "auto"
  double marginal_tolerance = 0.01;     // Berry-Esseen target for auto epsilon
  double aggregation_tolerance = 0.02;  // m^{-1/2} target for the CLT backend
  std::optional<bool> skip_gaussian;    // nullopt = "auto" (skips iff alpha < 1)
  std::optional<double> lambda0;
  std::uint64_t seed = 0;
  std::int64_t q_cap = 100000000;
  double poisson_mean_cap = 1e8;
};

struct AssembleResult {
  FieldGrid large;
  FieldGrid small;     // unscaled Gaussian substitute (or the alpha=2 field)
  FieldGrid combined;  // large + sigma_alpha(eps) * small
  double epsilon = 0.0;
  double sigma = 0.0;
  bool gaussian_skipped = false;
  std::int64_t jump_count = 0;
  std::int64_t clamp_events = 0;
  std::int64_t aggregation_m = 0;
};

/// Solves (2-a)^{3/2} / ((3-a) sqrt(a C_a)) * eps^{a/2} = tol for eps in
/// closed form (mu-free convention; the per-index mu^{beta/2}(A_t) prefactor
/// is reported in metadata instead). Domain: alpha in [1,2).
double choose_epsilon(double alpha, double marginal_tolerance);

/// Epsilon used in place of the Gaussian substitute when alpha < 1.
inline constexpr double kLowAlphaEpsilon = 1e-4;

/// Composes the approximated field: compound-Poisson large jumps plus the
/// sigma-scaled Gaussian small-jump substitute; alpha = 2 routes entirely to
/// the Gaussian backend; alpha < 1 (auto policy) uses eps = 1e-4 and no
/// Gaussian term. The large and small components draw from disjoint
/// substreams of `stream`.
AssembleResult assemble(const geometry::Geometry& geom, const SimParams& params,
                        RngStream& stream);

/// Y(x) = Ytilde(x) - Ytilde(o): subtracts the origin value pointwise.
FieldGrid pin_down_sphere(const FieldGrid& field_tilde, std::size_t origin_index);

}  // namespace karlin::assembler
