#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace karlin::cli {

/// Parsed run configuration. Defaults here are the tool's defaults; a config
/// file overrides them and explicit command-line flags override both.
struct RunConfig {
  std::string subcommand = "simulate";  // simulate | odd-occupancy | verify | bench

  std::string geometry = "halfline";  // halfline | rectangle | chentsov2d | sphere
  std::size_t grid_n = 1000;
  std::size_t grid_m = 0;  // 0 = geometry-dependent default (square / 300x150)

  double alpha = 1.2;
  double beta = 0.8;
  std::optional<double> epsilon;  // nullopt = "auto"
  double eps_tol = 0.01;          // marginal tolerance driving auto-epsilon
  double m_tol = 0.02;            // tolerance driving the aggregation size m
  std::optional<double> lambda0;  // optional mixing-parameter clamp

  std::optional<std::uint64_t> seed;  // nullopt = KSF_SEED env var, else 0
  std::string component = "all";      // large | small | combined | all
  std::string output;                 // path stem; subcommand default if empty
  std::string format = "csv";         // csv | bin | image
  int threads = 0;                    // 0 = available parallelism

  std::string sampler = "auto";   // odd-occupancy: auto | generic | fast
  std::int64_t replicates = 1;    // odd-occupancy batch size
  std::string check;              // verify: substring filter; empty = full suite
};

/// JSON round-trip used by the config-file mechanism; from-string applies the
/// present keys on top of `base` (absent keys keep their base values).
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text, const RunConfig& base = {});

/// --seed flag if given, else the KSF_SEED environment variable, else 0.
std::uint64_t resolve_seed(const RunConfig& config);

/// Occupancy-sampler timing experiment: per-replicate wall time is estimated
/// per batch and the median over batches reported, so heavy-tailed generic
/// replicates show up in the location estimate instead of vanishing in it.
struct BenchConfig {
  std::vector<std::size_t> grid_sizes{100, 300, 1000, 3000};
  std::string geometry = "halfline";  // halfline | rectangle
  double beta_scaling = 0.8;          // beta for the fast-path scaling sweep
  double beta_ratio = 0.3;            // heavy-tailed beta for the ratio probe
  std::size_t ratio_n = 1000;
  std::int64_t batches = 12;
  std::int64_t batch_size = 25;
  std::int64_t generic_q_cap = 100000;  // bounds a single replicate's work
  std::uint64_t seed = 0;
};

struct BenchPoint {
  std::size_t n = 0;
  double fast_median_seconds = 0.0;
};

struct BenchReport {
  std::vector<BenchPoint> points;
  double fast_slope = 0.0;  // log-log least-squares slope of time vs n
  double generic_median_seconds = 0.0;  // at (beta_ratio, ratio_n)
  double fast_ratio_median_seconds = 0.0;
  double generic_fast_ratio = 0.0;
  std::int64_t generic_aborts = 0;  // q_cap hits during the ratio probe
};

BenchReport occupancy_bench(const BenchConfig& config);

/// Subcommand drivers; each returns a process exit status and logs
/// human-readable progress to `log`.
int run_simulate(const RunConfig& config, std::ostream& log);
int run_odd_occupancy(const RunConfig& config, std::ostream& log);
int run_verify(const RunConfig& config, std::ostream& log);
int run_bench(const RunConfig& config, std::ostream& log);

/// Dispatch on config.subcommand.
int run(const RunConfig& config, std::ostream& log);

}  // namespace karlin::cli
