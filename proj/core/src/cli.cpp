#include "karlin/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "karlin/assembler.hpp"
#include "karlin/geometry.hpp"
#include "karlin/grid_io.hpp"
#include "karlin/occupancy.hpp"
#include "karlin/stats.hpp"
#include "karlin/verify.hpp"

namespace karlin::cli {

namespace {

using nlohmann::json;

std::string extension(const std::string& format) {
  if (format == "csv") return ".csv";
  if (format == "bin") return ".ksf";
  if (format == "image") return ".ppm";
  throw std::invalid_argument("unknown format '" + format +
                              "' (expected csv, bin or image)");
}

void write_grid(const FieldGrid& field, const std::string& format,
                const std::string& path) {
  if (format == "csv")
    grid_io::write_csv(field, path);
  else if (format == "bin")
    grid_io::write_binary(field, path);
  else
    grid_io::write_image(field, path);
}

void write_sidecar(const json& meta, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << meta.dump(2) << '\n';
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Median over batches of the mean per-replicate wall time within a batch.
template <typename Fn>
double batch_median_seconds(std::int64_t batches, std::int64_t batch_size,
                            Fn&& replicate) {
  using clock = std::chrono::steady_clock;
  std::vector<double> per_rep;
  per_rep.reserve(static_cast<std::size_t>(batches));
  for (std::int64_t b = -1; b < batches; ++b) {  // batch -1 is an untimed warm-up
    const auto t0 = clock::now();
    for (std::int64_t r = 0; r < batch_size; ++r)
      replicate(b < 0 ? 0 : b, r);
    const double dt = std::chrono::duration<double>(clock::now() - t0).count();
    if (b >= 0) per_rep.push_back(dt / static_cast<double>(batch_size));
  }
  return median(std::move(per_rep));
}

}  // namespace

std::string config_to_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  j["geometry"] = c.geometry;
  j["grid_n"] = c.grid_n;
  j["grid_m"] = c.grid_m;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  if (c.epsilon)
    j["epsilon"] = *c.epsilon;
  else
    j["epsilon"] = "auto";
  j["eps_tol"] = c.eps_tol;
  j["m_tol"] = c.m_tol;
  if (c.lambda0) j["lambda0"] = *c.lambda0;
  if (c.seed) j["seed"] = *c.seed;
  j["component"] = c.component;
  j["output"] = c.output;
  j["format"] = c.format;
  j["threads"] = c.threads;
  j["sampler"] = c.sampler;
  j["replicates"] = c.replicates;
  j["check"] = c.check;
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text, const RunConfig& base) {
  RunConfig c = base;
  const json j = json::parse(text);
  if (j.contains("subcommand")) c.subcommand = j["subcommand"].get<std::string>();
  if (j.contains("geometry")) c.geometry = j["geometry"].get<std::string>();
  if (j.contains("grid_n")) c.grid_n = j["grid_n"].get<std::size_t>();
  if (j.contains("grid_m")) c.grid_m = j["grid_m"].get<std::size_t>();
  if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
  if (j.contains("beta")) c.beta = j["beta"].get<double>();
  if (j.contains("epsilon")) {
    if (j["epsilon"].is_string()) {
      if (j["epsilon"].get<std::string>() != "auto")
        throw std::invalid_argument("epsilon must be a number or \"auto\"");
      c.epsilon.reset();
    } else {
      c.epsilon = j["epsilon"].get<double>();
    }
  }
  if (j.contains("eps_tol")) c.eps_tol = j["eps_tol"].get<double>();
  if (j.contains("m_tol")) c.m_tol = j["m_tol"].get<double>();
  if (j.contains("lambda0")) c.lambda0 = j["lambda0"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("component")) c.component = j["component"].get<std::string>();
  if (j.contains("output")) c.output = j["output"].get<std::string>();
  if (j.contains("format")) c.format = j["format"].get<std::string>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  if (j.contains("sampler")) c.sampler = j["sampler"].get<std::string>();
  if (j.contains("replicates")) c.replicates = j["replicates"].get<std::int64_t>();
  if (j.contains("check")) c.check = j["check"].get<std::string>();
  return c;
}

std::uint64_t resolve_seed(const RunConfig& config) {
  if (config.seed) return *config.seed;
  if (const char* env = std::getenv("KSF_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

int run_simulate(const RunConfig& config, std::ostream& log) {
  const std::uint64_t seed = resolve_seed(config);
  const auto geom =
      geometry::make_geometry(config.geometry, config.grid_n, config.grid_m);

  assembler::SimParams params;
  params.alpha = config.alpha;
  params.beta = config.beta;
  params.epsilon = config.epsilon;
  params.marginal_tolerance = config.eps_tol;
  params.aggregation_tolerance = config.m_tol;
  params.lambda0 = config.lambda0;
  params.seed = seed;

  RngStream stream(seed, 0);
  auto result = assembler::assemble(geom, params, stream);

  std::vector<Component> components;
  if (config.component == "all")
    components = {Component::large, Component::small, Component::combined};
  else if (config.component == "large")
    components = {Component::large};
  else if (config.component == "small")
    components = {Component::small};
  else if (config.component == "combined")
    components = {Component::combined};
  else
    throw std::invalid_argument("unknown component '" + config.component + "'");

  const std::string stem =
      config.output.empty() ? "ksf_" + config.geometry : config.output;
  const std::string ext = extension(config.format);

  // Per-index marginal prefactor of the truncation-error bound, reported at
  // its largest value over the grid.
  double max_mu_pow = 0.0;
  for (std::size_t i = 0; i < geometry::grid_size(geom); ++i)
    max_mu_pow = std::max(
        max_mu_pow, std::pow(geometry::mu_index_set(geom, i), params.beta / 2.0));

  json meta;
  meta["geometry"] = config.geometry;
  meta["grid"] = geometry::grid_shape(geom);
  meta["alpha"] = params.alpha;
  meta["beta"] = params.beta;
  meta["epsilon"] = result.epsilon;
  meta["sigma"] = result.sigma;
  meta["c_alpha"] = params.alpha < 2.0 ? stats::c_alpha(params.alpha) : 0.0;
  meta["aggregation_m"] = result.aggregation_m;
  meta["gaussian_skipped"] = result.gaussian_skipped;
  meta["jump_count"] = result.jump_count;
  meta["clamp_events"] = result.clamp_events;
  meta["seed"] = seed;
  meta["eps_tol"] = config.eps_tol;
  meta["m_tol"] = config.m_tol;
  meta["max_mu_index_pow_beta_half"] = max_mu_pow;
  if (config.lambda0) meta["lambda0"] = *config.lambda0;
  meta["threads"] = config.threads;

  for (Component comp : components) {
    FieldGrid* field = comp == Component::large     ? &result.large
                       : comp == Component::small   ? &result.small
                                                    : &result.combined;
    field->meta["geometry"] = config.geometry;
    field->meta["alpha"] = std::to_string(params.alpha);
    field->meta["beta"] = std::to_string(params.beta);
    field->meta["epsilon"] = std::to_string(result.epsilon);
    field->meta["seed"] = std::to_string(seed);
    const std::string path =
        stem + "_" + std::string(component_name(comp)) + ext;
    write_grid(*field, config.format, path);
    meta["outputs"].push_back(path);
    log << "wrote " << path << '\n';
  }
  write_sidecar(meta, stem + "_meta.json");
  log << "wrote " << stem << "_meta.json (epsilon=" << result.epsilon
      << ", jumps=" << result.jump_count << ")\n";
  return 0;
}

int run_odd_occupancy(const RunConfig& config, std::ostream& log) {
  const std::uint64_t seed = resolve_seed(config);
  const auto geom =
      geometry::make_geometry(config.geometry, config.grid_n, config.grid_m);
  const std::size_t cells = geometry::grid_size(geom);

  const bool is_lattice = std::holds_alternative<geometry::HalfLine>(geom) ||
                          std::holds_alternative<geometry::Rectangle>(geom);
  if (config.sampler == "fast" && !is_lattice) {
    log << "error: the fast sampler supports only halfline and rectangle\n";
    return 2;
  }
  if (config.sampler != "auto" && config.sampler != "generic" &&
      config.sampler != "fast") {
    log << "error: unknown sampler '" << config.sampler << "'\n";
    return 2;
  }
  if (config.replicates < 1) {
    log << "error: replicates must be >= 1\n";
    return 2;
  }

  RngStream stream(seed, 0);
  FieldGrid out;
  out.component = Component::combined;
  const auto n_rep = static_cast<std::size_t>(config.replicates);
  if (n_rep == 1)
    out.shape = geometry::grid_shape(geom);
  else
    out.shape = {n_rep, cells};
  out.values.assign(n_rep * cells, 0.0);

  std::int64_t aborts = 0;
  std::string sampler_used;
  double first_mixing = 0.0;
  for (std::size_t r = 0; r < n_rep; ++r) {
    RngStream rng = stream.substream(r);
    try {
      occupancy::OddOccupancy d;
      if (config.sampler == "generic" || (config.sampler == "auto" && !is_lattice))
        d = occupancy::sample_occupancy_generic(geom, config.beta, rng);
      else
        d = occupancy::sample_occupancy(geom, config.beta, rng);
      for (std::size_t i = 0; i < cells; ++i)
        out.values[r * cells + i] = static_cast<double>(d.bits[i]);
      if (r == 0) {
        sampler_used =
            d.sampler == occupancy::OddOccupancy::Sampler::fast ? "fast"
                                                                : "generic";
        first_mixing = d.mixing_value;
      }
    } catch (const occupancy::HeavyTailOverflow&) {
      ++aborts;  // replicate left as zeros, counted in the sidecar
    }
  }

  const std::string stem =
      config.output.empty() ? "ksf_occupancy" : config.output;
  const std::string path = stem + extension(config.format);
  out.meta["sampler"] = sampler_used;
  out.meta["beta"] = std::to_string(config.beta);
  out.meta["seed"] = std::to_string(seed);
  write_grid(out, config.format, path);

  json meta;
  meta["geometry"] = config.geometry;
  meta["beta"] = config.beta;
  meta["sampler"] = sampler_used;
  meta["mixing_value_first_replicate"] = first_mixing;
  meta["replicates"] = config.replicates;
  meta["heavy_tail_aborts"] = aborts;
  meta["seed"] = seed;
  meta["outputs"].push_back(path);
  write_sidecar(meta, stem + "_meta.json");
  log << "wrote " << path << " (" << sampler_used << " sampler, " << aborts
      << " aborts)\n";
  return 0;
}

int run_verify(const RunConfig& config, std::ostream& log) {
  const std::uint64_t seed = resolve_seed(config);
  const auto reports = verify::run_default_suite(seed);
  bool all_pass = true;
  std::size_t matched = 0;
  std::ofstream csv;
  if (!config.output.empty()) {
    csv.open(config.output);
    if (!csv) throw std::runtime_error("cannot open " + config.output);
    csv << "name,statistic,threshold,p_value,n,pass\n";
  }
  for (const auto& report : reports) {
    if (!config.check.empty() &&
        report.name.find(config.check) == std::string::npos)
      continue;
    ++matched;
    all_pass = all_pass && report.pass;
    log << verify::format_report(report) << '\n';
    if (csv.is_open())
      csv << report.name << ',' << report.statistic << ',' << report.threshold
          << ',' << report.p_value << ',' << report.n << ','
          << (report.pass ? "pass" : "fail") << '\n';
  }
  if (matched == 0) {
    log << "error: no check matches '" << config.check << "'\n";
    return 2;
  }
  log << (all_pass ? "all checks passed" : "CHECK FAILURES PRESENT") << '\n';
  return all_pass ? 0 : 1;
}

BenchReport occupancy_bench(const BenchConfig& config) {
  if (config.geometry != "halfline" && config.geometry != "rectangle")
    throw std::invalid_argument(
        "occupancy_bench: geometry must be halfline or rectangle");
  BenchReport report;
  RngStream root(config.seed, 0);

  std::vector<double> log_n, log_t;
  std::uint64_t probe = 0;
  for (std::size_t n : config.grid_sizes) {
    const auto geom = geometry::make_geometry(config.geometry, n, 0);
    RngStream stream = root.substream(probe++);
    const double med = batch_median_seconds(
        config.batches, config.batch_size,
        [&](std::int64_t b, std::int64_t r) {
          RngStream rng = stream.substream(
              static_cast<std::uint64_t>(b) * 100003u + static_cast<std::uint64_t>(r));
          occupancy::sample_occupancy(geom, config.beta_scaling, rng);
        });
    report.points.push_back({n, med});
    log_n.push_back(std::log(static_cast<double>(geometry::grid_size(geom))));
    log_t.push_back(std::log(med));
  }

  // Least-squares slope of log(time) on log(grid size).
  const auto k = static_cast<double>(log_n.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    sx += log_n[i];
    sy += log_t[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_t[i];
  }
  report.fast_slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);

  const auto ratio_geom =
      geometry::make_geometry(config.geometry, config.ratio_n, 0);
  RngStream fast_stream = root.substream(probe++);
  report.fast_ratio_median_seconds = batch_median_seconds(
      config.batches, config.batch_size, [&](std::int64_t b, std::int64_t r) {
        RngStream rng = fast_stream.substream(
            static_cast<std::uint64_t>(b) * 100003u + static_cast<std::uint64_t>(r));
        occupancy::sample_occupancy(ratio_geom, config.beta_ratio, rng);
      });
  RngStream gen_stream = root.substream(probe++);
  report.generic_median_seconds = batch_median_seconds(
      config.batches, config.batch_size, [&](std::int64_t b, std::int64_t r) {
        RngStream rng = gen_stream.substream(
            static_cast<std::uint64_t>(b) * 100003u + static_cast<std::uint64_t>(r));
        try {
          occupancy::sample_occupancy_generic(ratio_geom, config.beta_ratio,
                                              rng, config.generic_q_cap);
        } catch (const occupancy::HeavyTailOverflow&) {
          ++report.generic_aborts;
        }
      });
  report.generic_fast_ratio =
      report.generic_median_seconds / report.fast_ratio_median_seconds;
  return report;
}

int run_bench(const RunConfig& config, std::ostream& log) {
  BenchConfig bench;
  bench.geometry = config.geometry;
  bench.beta_scaling = config.beta;
  bench.seed = resolve_seed(config);
  const auto report = occupancy_bench(bench);

  const std::string path =
      (config.output.empty() ? "ksf_bench" : config.output) + ".csv";
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot open " + path);
  csv << "grid_n,fast_median_seconds\n";
  for (const auto& p : report.points)
    csv << p.n << ',' << p.fast_median_seconds << '\n';
  csv << "# fast_slope," << report.fast_slope << '\n';
  csv << "# generic_median_seconds_beta0.3_n1000," << report.generic_median_seconds
      << '\n';
  csv << "# fast_median_seconds_beta0.3_n1000," << report.fast_ratio_median_seconds
      << '\n';
  csv << "# generic_fast_ratio," << report.generic_fast_ratio << '\n';
  csv << "# generic_aborts," << report.generic_aborts << '\n';

  log << "fast-path log-log slope: " << report.fast_slope << '\n'
      << "generic/fast median ratio (beta=" << bench.beta_ratio
      << ", n=" << bench.ratio_n << "): " << report.generic_fast_ratio << '\n'
      << "wrote " << path << '\n';
  return 0;
}

int run(const RunConfig& config, std::ostream& log) {
  try {
    if (config.subcommand == "simulate") return run_simulate(config, log);
    if (config.subcommand == "odd-occupancy") return run_odd_occupancy(config, log);
    if (config.subcommand == "verify") return run_verify(config, log);
    if (config.subcommand == "bench") return run_bench(config, log);
    log << "error: unknown subcommand '" << config.subcommand << "'\n";
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace karlin::cli
