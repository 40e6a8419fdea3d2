#include "karlin/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "karlin/occupancy.hpp"
#include "karlin/smalljump.hpp"
#include "karlin/stats.hpp"

namespace karlin::verify {

using geometry::Geometry;

namespace {

std::vector<std::size_t> pick_indices(const Geometry& geom, std::size_t want) {
  const std::size_t n = geometry::grid_size(geom);
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k <= want; ++k) {
    std::size_t i = (n * k) / want - 1;
    // Skip indices with a null index set (their parity is identically 0 and
    // carries no information for a moment check).
    while (i + 1 < n && geometry::mu_index_set(geom, i) <= 0.0) ++i;
    while (i > 0 && geometry::mu_index_set(geom, i) <= 0.0) --i;
    idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

std::string fmt(const char* pattern, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

}  // namespace

std::string format_report(const TestReport& r) {
  char buf[256];
  if (r.p_value >= 0.0)
    std::snprintf(buf, sizeof(buf), "%-34s %s  stat=%.4g p=%.4g n=%lld %s",
                  r.name.c_str(), r.pass ? "pass" : "FAIL", r.statistic,
                  r.p_value, static_cast<long long>(r.n), r.detail.c_str());
  else
    std::snprintf(buf, sizeof(buf),
                  "%-34s %s  maxdev=%.4g budget=%.4g n=%lld %s", r.name.c_str(),
                  r.pass ? "pass" : "FAIL", r.statistic, r.threshold,
                  static_cast<long long>(r.n), r.detail.c_str());
  return buf;
}

TestReport check_sibuya_gof(double beta, std::int64_t n_samples,
                            RngStream& stream, double significance,
                            double pmf_beta) {
  if (pmf_beta < 0.0) pmf_beta = beta;
  constexpr int kBins = 50;
  std::vector<double> observed(kBins + 1, 0.0);
  RngStream rng = stream.substream(0);
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const std::int64_t q = stats::sample_sibuya(beta, rng);
    if (q <= kBins)
      observed[static_cast<std::size_t>(q - 1)] += 1.0;
    else
      observed[kBins] += 1.0;
  }
  std::vector<double> expected(kBins + 1, 0.0);
  double head = 0.0;
  for (int k = 1; k <= kBins; ++k) {
    expected[static_cast<std::size_t>(k - 1)] =
        stats::sibuya_pmf(pmf_beta, k) * static_cast<double>(n_samples);
    head += stats::sibuya_pmf(pmf_beta, k);
  }
  expected[kBins] = (1.0 - head) * static_cast<double>(n_samples);

  double stat = 0.0;
  int df = -1;
  for (std::size_t b = 0; b < expected.size(); ++b) {
    if (expected[b] < 5.0) continue;  // merge-or-drop sparse cells
    const double d = observed[b] - expected[b];
    stat += d * d / expected[b];
    ++df;
  }
  TestReport r;
  r.name = "sibuya-gof(beta=" + std::to_string(beta) + ")";
  r.statistic = stat;
  r.threshold = significance;
  r.p_value = stats::chi_square_pvalue(stat, df);
  r.n = n_samples;
  r.seed = stream.seed();
  r.pass = r.p_value >= significance;
  if (pmf_beta != beta) r.detail = "misspecified-control";
  return r;
}

TestReport check_occupancy_moments(const Geometry& geom, double beta,
                                   SamplerChoice sampler,
                                   std::int64_t n_replicates,
                                   RngStream& stream) {
  const auto indices = pick_indices(geom, 3);
  const std::size_t k = indices.size();
  const double mu_e0_b = std::pow(geometry::mu_window(geom), beta);
  const double marginal_scale = std::pow(2.0, beta - 1.0) / mu_e0_b;

  std::vector<double> mean(k, 0.0);
  std::vector<double> pair(k * k, 0.0);
  std::int64_t aborts = 0;
  std::int64_t kept = 0;
  for (std::int64_t rep = 0; rep < n_replicates; ++rep) {
    RngStream rng = stream.substream(static_cast<std::uint64_t>(rep));
    occupancy::OddOccupancy occ;
    try {
      switch (sampler) {
        case SamplerChoice::generic:
          occ = occupancy::sample_occupancy_generic(geom, beta, rng);
          break;
        case SamplerChoice::fast:
        case SamplerChoice::automatic:
          occ = occupancy::sample_occupancy(geom, beta, rng);
          break;
      }
    } catch (const occupancy::HeavyTailOverflow&) {
      ++aborts;
      continue;
    }
    ++kept;
    for (std::size_t a = 0; a < k; ++a) {
      if (!occ.bits[indices[a]]) continue;
      mean[a] += 1.0;
      for (std::size_t b = 0; b < k; ++b)
        if (occ.bits[indices[b]]) pair[a * k + b] += 1.0;
    }
  }

  TestReport r;
  r.name = "occupancy-moments(" + geometry::geometry_name(geom) +
           ",beta=" + std::to_string(beta) + ")";
  r.n = n_replicates;
  r.seed = stream.seed();
  r.threshold = 0.0;
  if (kept == 0 ||
      static_cast<double>(aborts) > 0.001 * static_cast<double>(n_replicates)) {
    r.pass = false;
    r.detail = "heavy-tail abort fraction above 0.1%";
    return r;
  }
  const double nn = static_cast<double>(kept);
  double worst = 0.0;  // in units of standard errors
  for (std::size_t a = 0; a < k; ++a) {
    const double emp = mean[a] / nn;
    const double expect =
        marginal_scale * std::pow(geometry::mu_index_set(geom, indices[a]), beta);
    const double se = std::sqrt(std::max(expect * (1.0 - expect), 1e-12) / nn);
    worst = std::max(worst, std::fabs(emp - expect) / se);
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      const double emp = pair[a * k + b] / nn;
      const double ma = std::pow(geometry::mu_index_set(geom, indices[a]), beta);
      const double mb = std::pow(geometry::mu_index_set(geom, indices[b]), beta);
      const double md = std::pow(
          geometry::mu_symmetric_difference(geom, indices[a], indices[b]), beta);
      const double expect =
          (std::pow(2.0, beta - 1.0) / mu_e0_b) * 0.5 * (ma + mb - md);
      const double se = std::sqrt(std::max(expect * (1.0 - expect), 1e-12) / nn);
      worst = std::max(worst, std::fabs(emp - expect) / se);
    }
  r.statistic = worst;
  r.threshold = 3.0;
  r.pass = worst <= 3.0;
  if (aborts > 0) r.detail = "aborts=" + std::to_string(aborts);
  return r;
}

TestReport check_sampler_equivalence(const Geometry& geom, double beta,
                                     std::int64_t n_replicates,
                                     RngStream& stream, double significance,
                                     double p_distortion) {
  const std::size_t n = geometry::grid_size(geom);
  if (n > 4)
    throw std::invalid_argument(
        "check_sampler_equivalence: grid must have at most 4 indices");
  const std::size_t outcomes = std::size_t{1} << n;
  std::vector<double> fast_counts(outcomes, 0.0), generic_counts(outcomes, 0.0);

  occupancy::FastOptions opts;
  opts.p_scale = p_distortion;
  for (std::int64_t rep = 0; rep < n_replicates; ++rep) {
    RngStream rng = stream.substream(static_cast<std::uint64_t>(2 * rep));
    const auto occ = occupancy::sample_occupancy(geom, beta, rng, 100000000, opts);
    std::size_t key = 0;
    for (std::size_t i = 0; i < n; ++i) key |= std::size_t{occ.bits[i]} << i;
    fast_counts[key] += 1.0;
  }
  std::int64_t kept = 0;
  for (std::int64_t rep = 0; rep < n_replicates; ++rep) {
    RngStream rng = stream.substream(static_cast<std::uint64_t>(2 * rep + 1));
    occupancy::OddOccupancy occ;
    try {
      occ = occupancy::sample_occupancy_generic(geom, beta, rng);
    } catch (const occupancy::HeavyTailOverflow&) {
      continue;
    }
    ++kept;
    std::size_t key = 0;
    for (std::size_t i = 0; i < n; ++i) key |= std::size_t{occ.bits[i]} << i;
    generic_counts[key] += 1.0;
  }

  const double n1 = static_cast<double>(n_replicates);
  const double n2 = static_cast<double>(kept);
  const double r1 = std::sqrt(n2 / n1), r2 = std::sqrt(n1 / n2);
  double stat = 0.0;
  int df = -1;
  for (std::size_t c = 0; c < outcomes; ++c) {
    const double tot = fast_counts[c] + generic_counts[c];
    if (tot < 5.0) continue;
    const double d = fast_counts[c] * r1 - generic_counts[c] * r2;
    stat += d * d / tot;
    ++df;
  }
  TestReport r;
  r.name = "sampler-equivalence(" + geometry::geometry_name(geom) +
           ",beta=" + std::to_string(beta) + ")";
  r.statistic = stat;
  r.threshold = significance;
  r.p_value = stats::chi_square_pvalue(stat, df);
  r.n = n_replicates;
  r.seed = stream.seed();
  r.pass = r.p_value >= significance;
  if (p_distortion != 1.0) r.detail = "misspecified-control";
  return r;
}

TestReport check_marginal_cf(const Geometry& geom,
                             const assembler::SimParams& params,
                             const std::vector<double>& thetas,
                             std::int64_t n_replicates, RngStream& stream,
                             double tolerance) {
  const std::size_t t_index = geometry::grid_size(geom) - 1;
  const double mu_b = std::pow(geometry::mu_index_set(geom, t_index), params.beta);

  std::vector<double> sums(thetas.size(), 0.0);
  for (std::int64_t rep = 0; rep < n_replicates; ++rep) {
    RngStream rng = stream.substream(static_cast<std::uint64_t>(rep));
    const auto result = assembler::assemble(geom, params, rng);
    const double y = result.combined.values[t_index];
    for (std::size_t i = 0; i < thetas.size(); ++i)
      sums[i] += std::cos(thetas[i] * y);
  }
  double worst = 0.0;
  std::string detail;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double emp = sums[i] / static_cast<double>(n_replicates);
    // alpha = 2 follows the Gaussian convention E cos(tY) = exp(-t^2 Var/2).
    const double target =
        params.alpha == 2.0
            ? std::exp(-0.5 * thetas[i] * thetas[i] * mu_b)
            : std::exp(-mu_b * std::pow(std::fabs(thetas[i]), params.alpha));
    const double dev = std::fabs(emp - target);
    if (dev > worst) {
      worst = dev;
      detail = fmt("theta=%.3g target=%.4g", thetas[i], target);
    }
  }
  TestReport r;
  r.name = "marginal-cf(" + geometry::geometry_name(geom) +
           ",alpha=" + std::to_string(params.alpha) + ")";
  r.statistic = worst;
  r.threshold = tolerance;
  r.n = n_replicates;
  r.seed = stream.seed();
  r.pass = worst <= tolerance;
  r.detail = detail;
  return r;
}

TestReport check_gaussian_covariance(const Geometry& geom, double beta,
                                     GaussianBackend backend,
                                     std::int64_t n_paths, RngStream& stream) {
  // The sphere's Gaussian substitute is the rotationally stationary
  // hemisphere-indexed field; switch the index family accordingly.
  Geometry working = geom;
  if (auto* s = std::get_if<geometry::Sphere>(&working))
    s->hemisphere_index = true;

  const std::size_t total = geometry::grid_size(working);
  std::vector<std::size_t> indices;
  if (total <= 9) {
    for (std::size_t i = 0; i < total; ++i) indices.push_back(i);
  } else {
    indices = pick_indices(working, 3);
  }
  const std::size_t k = indices.size();
  const smalljump::CovarianceKernel kernel(working, beta);

  double slack = 0.0;
  smalljump::AggregationPlan plan{1, 0.0};
  if (backend == GaussianBackend::aggregation) {
    plan = smalljump::plan_aggregation(beta, geometry::mu_window(working), 0.02);
    slack = 0.02;  // m^{-1/2} budget on top of Monte Carlo error
  }

  std::vector<double> sum(k, 0.0), sum2(k * k, 0.0);
  std::int64_t aborts = 0;
  for (std::int64_t p = 0; p < n_paths; ++p) {
    RngStream rng = stream.substream(static_cast<std::uint64_t>(p));
    std::vector<double> draw(k, 0.0);
    try {
    switch (backend) {
      case GaussianBackend::circulant: {
        const auto* h = std::get_if<geometry::HalfLine>(&working);
        if (!h)
          throw std::invalid_argument("circulant backend needs HalfLine");
        const FieldGrid f = smalljump::simulate_fbm_halfline(h->grid, beta, rng);
        for (std::size_t i = 0; i < k; ++i) draw[i] = f.values[indices[i]];
        break;
      }
      case GaussianBackend::aggregation: {
        const FieldGrid f =
            smalljump::simulate_gaussian_aggregation(working, beta, plan, rng);
        for (std::size_t i = 0; i < k; ++i) draw[i] = f.values[indices[i]];
        break;
      }
      case GaussianBackend::cholesky: {
        draw = smalljump::simulate_gaussian_cholesky(working, beta, indices, rng);
        break;
      }
    }
    } catch (const occupancy::HeavyTailOverflow&) {
      // Astronomically heavy mixing draw inside one aggregation term; drop
      // the path. The fraction of such paths must stay negligible.
      ++aborts;
      continue;
    }
    for (std::size_t i = 0; i < k; ++i) {
      sum[i] += draw[i];
      for (std::size_t j = 0; j < k; ++j) sum2[i * k + j] += draw[i] * draw[j];
    }
  }

  const double nn = static_cast<double>(n_paths - aborts);
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const double cij = sum2[i * k + j] / nn - (sum[i] / nn) * (sum[j] / nn);
      const double target = kernel(indices[i], indices[j]);
      const double vii = kernel(indices[i], indices[i]);
      const double vjj = kernel(indices[j], indices[j]);
      const double se = std::sqrt(std::max(vii * vjj + target * target, 1e-12) / nn);
      const double dev = std::fabs(cij - target);
      const double budget = 3.0 * se + slack * std::max(1.0, std::fabs(target));
      worst = std::max(worst, dev / budget * 3.0);  // normalized to 3-SE units
    }

  const char* backend_name = backend == GaussianBackend::circulant ? "circulant"
                             : backend == GaussianBackend::aggregation
                                 ? "aggregation"
                                 : "cholesky";
  TestReport r;
  r.name = "gaussian-covariance(" + geometry::geometry_name(geom) + "," +
           backend_name + ")";
  r.statistic = worst;
  r.threshold = 3.0;
  r.n = n_paths;
  r.seed = stream.seed();
  r.pass = worst <= 3.0 &&
           static_cast<double>(aborts) <= 0.01 * static_cast<double>(n_paths);
  if (aborts > 0) r.detail = "aborted paths: " + std::to_string(aborts);
  return r;
}

std::vector<TestReport> run_default_suite(std::uint64_t seed) {
  std::vector<TestReport> reports;
  auto stream_for = [seed](std::uint64_t id) { return RngStream(seed, id); };

  {
    RngStream s = stream_for(1);
    reports.push_back(check_sibuya_gof(0.5, 200000, s));
  }
  {
    RngStream s = stream_for(2);
    reports.push_back(check_sibuya_gof(0.2, 200000, s));
  }
  std::uint64_t id = 10;
  for (const char* name : {"halfline", "rectangle", "chentsov2d", "sphere"}) {
    RngStream s = stream_for(id++);
    const auto geom = geometry::make_geometry(name, 8, 8);
    reports.push_back(check_occupancy_moments(geom, 0.8, SamplerChoice::automatic,
                                              20000, s));
  }
  {
    RngStream s = stream_for(30);
    geometry::HalfLine grid{{0.25, 0.5, 0.75, 1.0}};
    reports.push_back(check_sampler_equivalence(Geometry{grid}, 0.5, 50000, s));
  }
  {
    RngStream s = stream_for(31);
    geometry::Rectangle grid{{0.5, 1.0}, {0.5, 1.0}};
    reports.push_back(check_sampler_equivalence(Geometry{grid}, 0.5, 50000, s));
  }
  {
    RngStream s = stream_for(40);
    const auto geom = geometry::make_geometry("halfline", 8, 0);
    reports.push_back(check_gaussian_covariance(geom, 0.8,
                                                GaussianBackend::circulant,
                                                10000, s));
  }
  {
    RngStream s = stream_for(41);
    const auto geom = geometry::make_geometry("rectangle", 3, 3);
    reports.push_back(check_gaussian_covariance(geom, 0.8,
                                                GaussianBackend::aggregation,
                                                4000, s));
  }
  {
    RngStream s = stream_for(50);
    assembler::SimParams params;
    params.alpha = 1.2;
    params.beta = 0.8;
    const auto geom = geometry::make_geometry("halfline", 1, 0);
    reports.push_back(
        check_marginal_cf(geom, params, {0.5, 1.0, 2.0}, 20000, s));
  }
  return reports;
}

}  // namespace karlin::verify
