// Command-line front end for the stable set-indexed field simulator.
//
// Subcommands: simulate, odd-occupancy, verify, bench. Flags override
// config-file entries, which override built-in defaults.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "karlin/cli.hpp"

namespace {

// Adds the flags shared by every subcommand, binding into `config`. CLI11
// only touches the bound fields when the flag is actually given, so values
// loaded from a config file survive as defaults.
void add_common_flags(CLI::App* cmd, karlin::cli::RunConfig& config,
                      std::string& epsilon_text, std::uint64_t& seed_value,
                      bool& seed_given) {
  cmd->add_option("--alpha", config.alpha, "stability index in (0,2]");
  cmd->add_option("--beta", config.beta, "occupancy exponent in (0,1)");
  cmd->add_option("--epsilon", epsilon_text,
                  "jump truncation level (number or 'auto')");
  cmd->add_option("--geometry", config.geometry,
                  "halfline | rectangle | chentsov2d | sphere");
  cmd->add_option_function<std::string>(
         "--grid",
         [&config](const std::string& text) {
           const auto x = text.find('x');
           config.grid_n = std::stoul(text.substr(0, x));
           config.grid_m =
               x == std::string::npos ? 0 : std::stoul(text.substr(x + 1));
         },
         "grid size N or NxM")
      ->type_name("N[xM]");
  cmd->add_option("--seed", seed_value, "RNG seed (fallback: KSF_SEED env)")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  cmd->add_option("--m-tol", config.m_tol,
                  "tolerance driving the Gaussian aggregation size");
  cmd->add_option("--eps-tol", config.eps_tol,
                  "marginal tolerance driving auto epsilon");
  cmd->add_option("--lambda0", [&config](auto& res) {
    config.lambda0 = std::stod(res[0]);
    return true;
  }, "optional mixing-parameter clamp");
  cmd->add_option("--component", config.component,
                  "large | small | combined | all");
  cmd->add_option("--output", config.output, "output path stem");
  cmd->add_option("--format", config.format, "csv | bin | image");
  cmd->add_option("--threads", config.threads,
                  "worker threads (0 = available parallelism)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable set-indexed random field simulator"};
  app.require_subcommand(1);

  karlin::cli::RunConfig config;
  std::string config_path;
  std::string epsilon_text = "auto";
  std::uint64_t seed_value = 0;
  bool seed_given = false;

  app.add_option("--config", config_path,
                 "JSON config file (flags override its entries)")
      ->check(CLI::ExistingFile);

  auto* simulate = app.add_subcommand("simulate", "draw a field and write grids");
  auto* occupancy =
      app.add_subcommand("odd-occupancy", "draw odd-occupancy indicator samples");
  auto* verify = app.add_subcommand("verify", "run the statistical check suite");
  auto* bench = app.add_subcommand("bench", "time fast vs generic occupancy");

  for (CLI::App* cmd : {simulate, occupancy, verify, bench})
    add_common_flags(cmd, config, epsilon_text, seed_value, seed_given);
  occupancy->add_option("--sampler", config.sampler, "auto | generic | fast");
  occupancy->add_option("--replicates", config.replicates, "batch size");
  verify->add_option("--check", config.check,
                     "run only checks whose name contains this substring");

  // Pre-scan for --config so file entries become defaults before the real
  // parse applies explicit flags on top of them.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i] ? argv[i] : "";
    if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
  }
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config file " << config_path << '\n';
      return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      config = karlin::cli::config_from_json(buf.str(), config);
      if (config.epsilon) epsilon_text = std::to_string(*config.epsilon);
      if (config.seed) {
        seed_value = *config.seed;
        seed_given = true;
      }
    } catch (const std::exception& e) {
      std::cerr << "error: bad config file: " << e.what() << '\n';
      return 2;
    }
  }

  CLI11_PARSE(app, argc, argv);

  if (epsilon_text == "auto")
    config.epsilon.reset();
  else {
    try {
      config.epsilon = std::stod(epsilon_text);
    } catch (const std::exception&) {
      std::cerr << "error: --epsilon expects a number or 'auto'\n";
      return 2;
    }
  }
  if (seed_given) config.seed = seed_value;

  if (simulate->parsed()) config.subcommand = "simulate";
  if (occupancy->parsed()) config.subcommand = "odd-occupancy";
  if (verify->parsed()) config.subcommand = "verify";
  if (bench->parsed()) config.subcommand = "bench";

  return karlin::cli::run(config, std::cout);
}
