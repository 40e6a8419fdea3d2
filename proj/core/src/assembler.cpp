#include "karlin/assembler.hpp"

#include <cmath>
#include <stdexcept>

#include "karlin/largejump.hpp"
#include "karlin/smalljump.hpp"
#include "karlin/stats.hpp"

namespace karlin::assembler {

using geometry::Geometry;

double choose_epsilon(double alpha, double marginal_tolerance) {
  if (!(alpha >= 1.0 && alpha < 2.0))
    throw std::domain_error(
        "choose_epsilon: alpha must lie in [1,2); use the fixed-epsilon "
        "policy below 1");
  if (!(marginal_tolerance > 0.0 && marginal_tolerance < 1.0))
    throw std::domain_error("choose_epsilon: tolerance must lie in (0,1)");
  const double c = stats::c_alpha(alpha);
  const double base = marginal_tolerance * (3.0 - alpha) *
                      std::sqrt(alpha * c) / std::pow(2.0 - alpha, 1.5);
  return std::pow(base, 2.0 / alpha);
}

namespace {

bool grid_is_uniform(const std::vector<double>& grid) {
  const double delta = grid[0];
  if (!(delta > 0.0)) return false;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::fabs(grid[i] - delta * static_cast<double>(i + 1)) > 1e-9 * delta)
      return false;
  return true;
}

// Gaussian substitute with the covariance of the geometry's index family.
FieldGrid simulate_small(const Geometry& geom, const SimParams& params,
                         RngStream& rng, std::int64_t& m_out) {
  m_out = 0;
  if (const auto* h = std::get_if<geometry::HalfLine>(&geom)) {
    if (grid_is_uniform(h->grid))
      return smalljump::simulate_fbm_halfline(h->grid, params.beta, rng);
  }
  if (const auto* s = std::get_if<geometry::Sphere>(&geom)) {
    // Rotationally stationary hemisphere-indexed field, pinned at the pole.
    geometry::Sphere hemi = *s;
    hemi.hemisphere_index = true;
    const auto plan = smalljump::plan_aggregation(
        params.beta, geometry::mu_window(geom), params.aggregation_tolerance);
    m_out = plan.m;
    FieldGrid tilde = smalljump::simulate_gaussian_aggregation(
        Geometry{hemi}, params.beta, plan, rng, params.q_cap);
    return pin_down_sphere(tilde, 0);  // index 0 has polar angle 0
  }
  const auto plan = smalljump::plan_aggregation(
      params.beta, geometry::mu_window(geom), params.aggregation_tolerance);
  m_out = plan.m;
  return smalljump::simulate_gaussian_aggregation(geom, params.beta, plan, rng,
                                                  params.q_cap);
}

}  // namespace

AssembleResult assemble(const Geometry& geom, const SimParams& params,
                        RngStream& stream) {
  geometry::validate(geom);
  const double alpha = params.alpha;
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::domain_error("assemble: alpha must lie in (0,2]");

  AssembleResult out;
  const std::size_t n = geometry::grid_size(geom);

  if (alpha == 2.0) {
    if (params.epsilon)
      throw std::invalid_argument(
          "assemble: alpha = 2 has no jump part; epsilon must be auto");
    RngStream small_rng = stream.substream(2);
    out.small = simulate_small(geom, params, small_rng, out.aggregation_m);
    out.combined = out.small;
    out.combined.component = Component::combined;
    out.large.shape = out.small.shape;
    out.large.component = Component::large;
    out.large.values.assign(n, 0.0);
    out.gaussian_skipped = false;
    out.sigma = 1.0;
    return out;
  }

  out.gaussian_skipped =
      params.skip_gaussian ? *params.skip_gaussian : (alpha < 1.0);
  if (params.epsilon) {
    out.epsilon = *params.epsilon;
    if (!(out.epsilon > 0.0))
      throw std::domain_error("assemble: epsilon must be > 0");
  } else {
    out.epsilon =
        alpha < 1.0 ? kLowAlphaEpsilon
                    : choose_epsilon(alpha, params.marginal_tolerance);
  }

  largejump::Options lj_opts;
  lj_opts.q_cap = params.q_cap;
  lj_opts.poisson_mean_cap = params.poisson_mean_cap;
  lj_opts.lambda0 = params.lambda0;
  RngStream large_rng = stream.substream(1);
  auto lj = largejump::simulate_large_jump(geom, alpha, params.beta,
                                           out.epsilon, large_rng, lj_opts);
  out.jump_count = lj.jump_count;
  out.clamp_events = lj.clamp_events;
  out.large = std::move(lj.field);

  out.combined = out.large;
  out.combined.component = Component::combined;

  if (!out.gaussian_skipped) {
    RngStream small_rng = stream.substream(2);
    out.small = simulate_small(geom, params, small_rng, out.aggregation_m);
    out.sigma = stats::sigma_alpha(alpha, out.epsilon);
    for (std::size_t i = 0; i < n; ++i)
      out.combined.values[i] += out.sigma * out.small.values[i];
  } else {
    out.small.shape = out.large.shape;
    out.small.component = Component::small;
    out.small.values.assign(n, 0.0);
  }
  return out;
}

FieldGrid pin_down_sphere(const FieldGrid& field_tilde,
                          std::size_t origin_index) {
  if (origin_index >= field_tilde.values.size())
    throw std::out_of_range("pin_down_sphere: origin index out of range");
  FieldGrid out = field_tilde;
  const double origin = field_tilde.values[origin_index];
  for (double& v : out.values) v -= origin;
  return out;
}

}  // namespace karlin::assembler
