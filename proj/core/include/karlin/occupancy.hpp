#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "karlin/geometry.hpp"
#include "karlin/rng.hpp"

namespace karlin::occupancy {

/// Raised when a heavy-tailed draw (Sibuya Q or its Poisson parameter)
/// exceeds the configured resource cap; the replicate is aborted, never
/// silently truncated.
struct HeavyTailOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One sample of the odd-occupancy indicator field D_t = 1{|R ∩ A_t| odd}.
struct OddOccupancy {
  enum class Sampler { generic, fast };

  std::vector<std::uint8_t> bits;   // row-major, matches the geometry grid
  std::vector<std::size_t> shape;
  Sampler sampler = Sampler::generic;
  double mixing_value = 0.0;        // Q (generic) or Lambda_beta (fast)
  bool clamped = false;             // lambda0 clamp hit
};

struct FastOptions {
  std::optional<double> lambda0;  // optional Poisson-parameter clamp
  double p_scale = 1.0;           // test-only distortion of the cell probabilities
};

/// Algorithm that works for any geometry: draw Q ~ Sibuya(beta), scatter Q
/// window points, accumulate per-index parity by XOR. Points are streamed,
/// never stored. Throws HeavyTailOverflow if Q exceeds q_cap.
OddOccupancy sample_occupancy_generic(const geometry::Geometry& geom,
                                      double beta, RngStream& rng,
                                      std::int64_t q_cap = 100000000);

/// Conditionally-independent-Bernoulli sampler for A_t = [0,t] on a sorted
/// grid: cell bits B_i ~ Ber((1 - exp(-2 w_i Lambda))/2) given
/// Lambda = G1 G_{1-beta}/G_beta, then a prefix parity plus the indicator
/// 1{U <= t_i}. Linear in the grid size.
OddOccupancy sample_occupancy_halfline(const std::vector<double>& grid,
                                       double beta, RngStream& rng,
                                       const FastOptions& opts = {});

/// Lattice analogue for A_t = [0,t1]x[0,t2]: cell bits with parameters
/// (1 - exp(-2 w1_i w2_j Lambda))/2 and a two-pass prefix parity scan.
OddOccupancy sample_occupancy_rectangle(const std::vector<double>& grid1,
                                        const std::vector<double>& grid2,
                                        double beta, RngStream& rng,
                                        const FastOptions& opts = {});

/// Fast path where the lattice structure allows it, generic otherwise.
OddOccupancy sample_occupancy(const geometry::Geometry& geom, double beta,
                              RngStream& rng, std::int64_t q_cap = 100000000,
                              const FastOptions& opts = {});

}  // namespace karlin::occupancy
