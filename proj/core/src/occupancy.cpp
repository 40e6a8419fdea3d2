#include "karlin/occupancy.hpp"

#include <cmath>
#include <limits>

#include "karlin/stats.hpp"

namespace karlin::occupancy {

using geometry::Geometry;
using geometry::Point;

namespace {

// Scatter Q points, XOR their membership into `bits`. Inner loops hoist the
// per-point trigonometry / dot products out of the grid sweep.
void scatter_points(const Geometry& geom, std::int64_t q, RngStream& rng,
                    std::vector<std::uint8_t>& bits) {
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, geometry::HalfLine>) {
          const auto& grid = g.grid;
          const std::size_t n = grid.size();
          for (std::int64_t p = 0; p < q; ++p) {
            const double u = rng.uniform();
            for (std::size_t i = 0; i < n; ++i) bits[i] ^= (u <= grid[i]);
          }
        } else if constexpr (std::is_same_v<T, geometry::Rectangle>) {
          const std::size_t n1 = g.grid1.size(), n2 = g.grid2.size();
          for (std::int64_t p = 0; p < q; ++p) {
            const double u1 = rng.uniform();
            const double u2 = rng.uniform();
            for (std::size_t i = 0; i < n1; ++i) {
              const bool row = u1 <= g.grid1[i];
              std::uint8_t* out = bits.data() + i * n2;
              for (std::size_t j = 0; j < n2; ++j)
                out[j] ^= (row && u2 <= g.grid2[j]);
            }
          }
        } else if constexpr (std::is_same_v<T, geometry::Chentsov2D>) {
          const std::size_t n1 = g.grid1.size(), n2 = g.grid2.size();
          for (std::int64_t p = 0; p < q; ++p) {
            const Point pt = geometry::sample_window_point(Geometry{g}, rng);
            const double c = std::cos(pt.coords[0]);
            const double s = std::sin(pt.coords[0]);
            const double r = pt.coords[1];
            for (std::size_t i = 0; i < n1; ++i) {
              const double base = c * g.grid1[i];
              std::uint8_t* out = bits.data() + i * n2;
              for (std::size_t j = 0; j < n2; ++j)
                out[j] ^= (r < base + s * g.grid2[j]);
            }
          }
        } else {
          // Sphere: cache the lattice unit vectors once.
          const std::size_t n = g.n_phi * g.n_theta;
          static thread_local std::vector<double> cache;
          static thread_local std::size_t cache_nphi = 0, cache_ntheta = 0;
          if (cache_nphi != g.n_phi || cache_ntheta != g.n_theta) {
            cache.resize(3 * n);
            for (std::size_t i = 0; i < n; ++i) {
              const Point x = geometry::sphere_grid_point(g, i);
              cache[3 * i] = x.coords[0];
              cache[3 * i + 1] = x.coords[1];
              cache[3 * i + 2] = x.coords[2];
            }
            cache_nphi = g.n_phi;
            cache_ntheta = g.n_theta;
          }
          for (std::int64_t p = 0; p < q; ++p) {
            const Point y = geometry::sample_window_point(Geometry{g}, rng);
            const bool in_ho = y.coords[2] > 0.0;
            for (std::size_t i = 0; i < n; ++i) {
              const double dot = cache[3 * i] * y.coords[0] +
                                 cache[3 * i + 1] * y.coords[1] +
                                 cache[3 * i + 2] * y.coords[2];
              const bool in_hx = dot > 0.0;
              bits[i] ^= g.hemisphere_index ? in_hx : (in_hx != in_ho);
            }
          }
        }
      },
      geom);
}

// Fast-path grids may contain zero-width (duplicate) cells, which get cell
// probability 0; they must still be sorted and inside the window.
void check_sorted_grid(const std::vector<double>& grid) {
  if (grid.empty())
    throw std::invalid_argument("occupancy: empty grid");
  double prev = 0.0;
  for (double t : grid) {
    if (!(t >= prev && t <= 1.0))
      throw std::invalid_argument(
          "occupancy: grid must be non-decreasing within [0,1]");
    prev = t;
  }
}

double clamped_lambda(double beta, RngStream& rng, const FastOptions& opts,
                      bool& clamped) {
  double lambda = stats::sample_sibuya_parameter(beta, rng);
  clamped = false;
  if (opts.lambda0 && lambda > *opts.lambda0) {
    lambda = *opts.lambda0;
    clamped = true;
  }
  return lambda;
}

}  // namespace

OddOccupancy sample_occupancy_generic(const Geometry& geom, double beta,
                                      RngStream& rng, std::int64_t q_cap) {
  const double lambda = stats::sample_sibuya_parameter(beta, rng);
  // For lambda far above the cap, Poisson(lambda) <= q_cap has vanishing
  // probability; abort before attempting the draw.
  if (lambda > 2.0 * static_cast<double>(q_cap) + 1e6)
    throw HeavyTailOverflow("odd-occupancy: Sibuya draw exceeds cap");
  const std::int64_t q =
      1 + stats::sample_poisson(lambda, rng,
                                std::numeric_limits<double>::infinity());
  if (q > q_cap)
    throw HeavyTailOverflow("odd-occupancy: Sibuya draw exceeds cap");

  OddOccupancy out;
  out.shape = geometry::grid_shape(geom);
  out.bits.assign(geometry::grid_size(geom), 0);
  out.sampler = OddOccupancy::Sampler::generic;
  out.mixing_value = static_cast<double>(q);
  scatter_points(geom, q, rng, out.bits);
  return out;
}

OddOccupancy sample_occupancy_halfline(const std::vector<double>& grid,
                                       double beta, RngStream& rng,
                                       const FastOptions& opts) {
  check_sorted_grid(grid);
  OddOccupancy out;
  out.shape = {grid.size()};
  out.bits.assign(grid.size(), 0);
  out.sampler = OddOccupancy::Sampler::fast;

  const double lambda = clamped_lambda(beta, rng, opts, out.clamped);
  out.mixing_value = lambda;

  std::uint8_t parity = 0;
  double prev = 0.0;
  const double u = rng.uniform_pos();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double p = 0.5 * (1.0 - std::exp(-2.0 * (grid[i] - prev) * lambda));
    p = std::min(1.0, p * opts.p_scale);
    parity ^= static_cast<std::uint8_t>(rng.uniform() < p);
    out.bits[i] = parity ^ static_cast<std::uint8_t>(u <= grid[i]);
    prev = grid[i];
  }
  return out;
}

OddOccupancy sample_occupancy_rectangle(const std::vector<double>& grid1,
                                        const std::vector<double>& grid2,
                                        double beta, RngStream& rng,
                                        const FastOptions& opts) {
  check_sorted_grid(grid1);
  check_sorted_grid(grid2);
  const std::size_t n1 = grid1.size(), n2 = grid2.size();
  OddOccupancy out;
  out.shape = {n1, n2};
  out.bits.assign(n1 * n2, 0);
  out.sampler = OddOccupancy::Sampler::fast;

  const double lambda = clamped_lambda(beta, rng, opts, out.clamped);
  out.mixing_value = lambda;

  const double u1 = rng.uniform_pos();
  const double u2 = rng.uniform_pos();

  double prev1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    const double w1 = grid1[i] - prev1;
    prev1 = grid1[i];
    double prev2 = 0.0;
    std::uint8_t* row = out.bits.data() + i * n2;
    for (std::size_t j = 0; j < n2; ++j) {
      const double w2 = grid2[j] - prev2;
      prev2 = grid2[j];
      double p = 0.5 * (1.0 - std::exp(-2.0 * w1 * w2 * lambda));
      p = std::min(1.0, p * opts.p_scale);
      row[j] = static_cast<std::uint8_t>(rng.uniform() < p);
    }
  }

  // Two-pass prefix parity scan, then the point-membership indicator.
  for (std::size_t i = 0; i < n1; ++i) {
    std::uint8_t* row = out.bits.data() + i * n2;
    for (std::size_t j = 1; j < n2; ++j) row[j] ^= row[j - 1];
  }
  for (std::size_t i = 1; i < n1; ++i) {
    std::uint8_t* row = out.bits.data() + i * n2;
    const std::uint8_t* above = out.bits.data() + (i - 1) * n2;
    for (std::size_t j = 0; j < n2; ++j) row[j] ^= above[j];
  }
  for (std::size_t i = 0; i < n1; ++i) {
    const bool m1 = u1 <= grid1[i];
    std::uint8_t* row = out.bits.data() + i * n2;
    for (std::size_t j = 0; j < n2; ++j)
      row[j] ^= static_cast<std::uint8_t>(m1 && u2 <= grid2[j]);
  }
  return out;
}

OddOccupancy sample_occupancy(const Geometry& geom, double beta, RngStream& rng,
                              std::int64_t q_cap, const FastOptions& opts) {
  if (const auto* h = std::get_if<geometry::HalfLine>(&geom))
    return sample_occupancy_halfline(h->grid, beta, rng, opts);
  if (const auto* r = std::get_if<geometry::Rectangle>(&geom))
    return sample_occupancy_rectangle(r->grid1, r->grid2, beta, rng, opts);
  return sample_occupancy_generic(geom, beta, rng, q_cap);
}

}  // namespace karlin::occupancy
