#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "karlin/cli.hpp"
#include "karlin/field.hpp"
#include "karlin/grid_io.hpp"

namespace cli = karlin::cli;
namespace grid_io = karlin::grid_io;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/karlin_test_") + name;
}

}  // namespace

TEST_SUITE_BEGIN("io_cli");

TEST_CASE("binary grid format round-trips values, shape and metadata") {
  karlin::FieldGrid f;
  f.shape = {2, 3};
  f.values = {1.0, -2.5, 3.25e-300, 4.0, 5.5, -0.0};
  f.component = karlin::Component::large;
  f.meta["alpha"] = "1.2";
  f.meta["note"] = "round-trip";
  const std::string path = tmp_path("grid.ksf");
  grid_io::write_binary(f, path);
  const auto g = grid_io::read_binary(path);
  CHECK(g.shape == f.shape);
  CHECK(g.values == f.values);
  CHECK(g.component == karlin::Component::large);
  CHECK(g.meta.at("alpha") == "1.2");
  CHECK(g.meta.at("note") == "round-trip");
  // Magic bytes up front.
  CHECK(slurp(path).substr(0, 4) == "KSF1");
  std::remove(path.c_str());

  CHECK_THROWS(grid_io::read_binary("/nonexistent/nope.ksf"));
}

TEST_CASE("csv and image writers produce well-formed output") {
  karlin::FieldGrid f;
  f.shape = {2, 2};
  f.values = {0.0, 1.0, 2.0, 3.0};
  const std::string csv = tmp_path("grid.csv");
  grid_io::write_csv(f, csv);
  CHECK(slurp(csv) == "0,1\n2,3\n");
  std::remove(csv.c_str());

  const std::string ppm = tmp_path("grid.ppm");
  grid_io::write_image(f, ppm);
  const std::string img = slurp(ppm);
  CHECK(img.substr(0, 2) == "P6");
  CHECK(img.find("2 2") != std::string::npos);
  CHECK(img.size() > 12);  // header + 4 RGB triples
  std::remove(ppm.c_str());
}

TEST_CASE("run config JSON round-trip") {
  cli::RunConfig c;
  c.subcommand = "simulate";
  c.geometry = "sphere";
  c.grid_n = 300;
  c.grid_m = 150;
  c.alpha = 1.8;
  c.beta = 0.6;
  c.epsilon = 0.05;
  c.eps_tol = 0.02;
  c.m_tol = 0.04;
  c.lambda0 = 1e6;
  c.seed = 99;
  c.component = "combined";
  c.output = "/tmp/out";
  c.format = "bin";
  c.threads = 2;
  const auto text = cli::config_to_json(c);
  const auto d = cli::config_from_json(text);
  CHECK(d.subcommand == c.subcommand);
  CHECK(d.geometry == c.geometry);
  CHECK(d.grid_n == c.grid_n);
  CHECK(d.grid_m == c.grid_m);
  CHECK(d.alpha == c.alpha);
  CHECK(d.beta == c.beta);
  REQUIRE(d.epsilon.has_value());
  CHECK(*d.epsilon == *c.epsilon);
  CHECK(d.eps_tol == c.eps_tol);
  CHECK(d.m_tol == c.m_tol);
  REQUIRE(d.lambda0.has_value());
  CHECK(*d.lambda0 == *c.lambda0);
  REQUIRE(d.seed.has_value());
  CHECK(*d.seed == *c.seed);
  CHECK(d.component == c.component);
  CHECK(d.output == c.output);
  CHECK(d.format == c.format);
  CHECK(d.threads == c.threads);

  // "auto" epsilon round-trips to nullopt; partial configs keep base values.
  cli::RunConfig base;
  base.alpha = 1.1;
  const auto e = cli::config_from_json(R"({"beta": 0.4, "epsilon": "auto"})", base);
  CHECK(e.alpha == 1.1);
  CHECK(e.beta == 0.4);
  CHECK_FALSE(e.epsilon.has_value());
  CHECK_THROWS(cli::config_from_json(R"({"epsilon": "garbage"})"));
}

TEST_CASE("seed resolution: flag beats env beats zero") {
  cli::RunConfig c;
  unsetenv("KSF_SEED");
  CHECK(cli::resolve_seed(c) == 0);
  setenv("KSF_SEED", "777", 1);
  CHECK(cli::resolve_seed(c) == 777);
  c.seed = 42;
  CHECK(cli::resolve_seed(c) == 42);
  unsetenv("KSF_SEED");
}

TEST_CASE("simulate subcommand: deterministic byte-identical outputs") {
  cli::RunConfig c;
  c.subcommand = "simulate";
  c.geometry = "halfline";
  c.grid_n = 64;
  c.alpha = 1.2;
  c.beta = 0.8;
  c.seed = 31337;
  c.format = "csv";
  std::ostringstream log;

  c.output = tmp_path("sim_a");
  REQUIRE(cli::run(c, log) == 0);
  c.output = tmp_path("sim_b");
  REQUIRE(cli::run(c, log) == 0);
  for (const char* comp : {"large", "small", "combined"}) {
    const auto a = slurp(tmp_path("sim_a_") + comp + ".csv");
    const auto b = slurp(tmp_path("sim_b_") + comp + ".csv");
    CHECK(a == b);
    CHECK(!a.empty());
    std::remove((tmp_path("sim_a_") + comp + ".csv").c_str());
    std::remove((tmp_path("sim_b_") + comp + ".csv").c_str());
  }
  // The metadata sidecars record the resolved parameters identically.
  const auto ma = slurp(tmp_path("sim_a_meta.json"));
  CHECK(ma.find("\"epsilon\"") != std::string::npos);
  CHECK(ma.find("\"c_alpha\"") != std::string::npos);
  CHECK(ma.find("\"seed\": 31337") != std::string::npos);
  std::remove(tmp_path("sim_a_meta.json").c_str());
  std::remove(tmp_path("sim_b_meta.json").c_str());
}

TEST_CASE("odd-occupancy subcommand: batch grid plus sidecar") {
  cli::RunConfig c;
  c.subcommand = "odd-occupancy";
  c.geometry = "rectangle";
  c.grid_n = 4;
  c.grid_m = 4;
  c.beta = 0.5;
  c.seed = 5;
  c.replicates = 10;
  c.format = "csv";
  c.output = tmp_path("occ");
  std::ostringstream log;
  REQUIRE(cli::run(c, log) == 0);
  const auto body = slurp(tmp_path("occ.csv"));
  // 10 replicate rows of 16 binary values.
  int rows = 0;
  for (char ch : body) rows += ch == '\n';
  CHECK(rows == 10);
  for (char ch : body) CHECK((ch == '0' || ch == '1' || ch == ',' || ch == '\n'));
  const auto meta = slurp(tmp_path("occ_meta.json"));
  CHECK(meta.find("\"sampler\": \"fast\"") != std::string::npos);
  std::remove(tmp_path("occ.csv").c_str());
  std::remove(tmp_path("occ_meta.json").c_str());

  // The fast sampler is refused where no lattice structure exists.
  c.geometry = "sphere";
  c.sampler = "fast";
  CHECK(cli::run(c, log) == 2);
}

TEST_CASE("bench subcommand emits a structurally reproducible report") {
  cli::BenchConfig quick;
  quick.grid_sizes = {50, 100};
  quick.batches = 3;
  quick.batch_size = 5;
  quick.seed = 9;
  const auto a = cli::occupancy_bench(quick);
  const auto b = cli::occupancy_bench(quick);
  REQUIRE(a.points.size() == 2);
  CHECK(a.points[0].n == 50);
  CHECK(a.points[1].n == 100);
  CHECK(a.points[0].fast_median_seconds > 0.0);
  CHECK(a.generic_fast_ratio > 0.0);
  // Structure (not timings) is reproducible.
  CHECK(b.points.size() == a.points.size());
  CHECK(b.generic_aborts == a.generic_aborts);
}

TEST_CASE("invalid configurations exit nonzero with a diagnostic") {
  cli::RunConfig c;
  c.subcommand = "simulate";
  c.geometry = "klein-bottle";
  std::ostringstream log;
  CHECK(cli::run(c, log) != 0);
  CHECK(log.str().find("error") != std::string::npos);

  cli::RunConfig c2;
  c2.subcommand = "no-such-command";
  std::ostringstream log2;
  CHECK(cli::run(c2, log2) == 2);
}

TEST_SUITE_END();
