#include "karlin/largejump.hpp"

#include <cmath>

namespace karlin::largejump {

using geometry::Geometry;

LargeJumpSample simulate_large_jump(const Geometry& geom, double alpha,
                                    double beta, double epsilon,
                                    RngStream& stream, const Options& opts) {
  geometry::validate(geom);
  const stats::JumpLaw law(alpha, epsilon, geometry::mu_window(geom), beta);

  LargeJumpSample out;
  out.seed = stream.seed();
  out.stream_id = stream.stream_id();
  out.field.shape = geometry::grid_shape(geom);
  out.field.component = Component::large;
  out.field.values.assign(geometry::grid_size(geom), 0.0);

  RngStream count_rng = stream.substream(0);
  out.jump_count = stats::sample_jump_count(law, count_rng, opts.poisson_mean_cap);

  occupancy::FastOptions fast_opts;
  fast_opts.lambda0 = opts.lambda0;

  for (std::int64_t j = 0; j < out.jump_count; ++j) {
    RngStream jump_rng = stream.substream(static_cast<std::uint64_t>(j) + 1);
    const double v = stats::sample_jump_magnitude(alpha, epsilon, jump_rng);
    const occupancy::OddOccupancy occ =
        occupancy::sample_occupancy(geom, beta, jump_rng, opts.q_cap, fast_opts);
    if (occ.clamped) ++out.clamp_events;
    for (std::size_t i = 0; i < occ.bits.size(); ++i)
      if (occ.bits[i]) out.field.values[i] += v;
    if (opts.keep_jumps)
      out.jumps.push_back(JumpRecord{
          v, occ.mixing_value, occ.sampler == occupancy::OddOccupancy::Sampler::fast});
  }
  return out;
}

}  // namespace karlin::largejump
