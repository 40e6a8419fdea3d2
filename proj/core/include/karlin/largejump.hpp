#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "karlin/field.hpp"
#include "karlin/geometry.hpp"
#include "karlin/occupancy.hpp"
#include "karlin/rng.hpp"
#include "karlin/stats.hpp"

namespace karlin::largejump {

struct Options {
  std::int64_t q_cap = 100000000;
  double poisson_mean_cap = 1e8;
  std::optional<double> lambda0;  // clamp for the fast occupancy paths
  bool keep_jumps = false;        // retain the per-jump provenance list
};

struct JumpRecord {
  double magnitude;
  double mixing_value;  // Lambda_beta or Q of the occupancy draw
  bool fast_path;
};

/// One draw of the compound-Poisson large-jump field: N ~ Poisson jumps, each
/// a magnitude V (|V| > eps) times an odd-occupancy indicator field.
struct LargeJumpSample {
  FieldGrid field;
  std::int64_t jump_count = 0;
  std::vector<JumpRecord> jumps;  // only populated when requested
  std::int64_t clamp_events = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Jumps are streamed and accumulated on the grid; each jump draws from its
/// own substream so the result does not depend on evaluation order.
LargeJumpSample simulate_large_jump(const geometry::Geometry& geom,
                                    double alpha, double beta, double epsilon,
                                    RngStream& stream,
                                    const Options& opts = {});

}  // namespace karlin::largejump
