#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alh/cli.hpp"
#include "alh/config.hpp"
#include "alh/record.hpp"

using namespace alh;

namespace {

std::string strip_wall_time(const std::string& json) {
  std::istringstream in(json);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("wall_time_ms") == std::string::npos) out << line << "\n";
  }
  return out.str();
}

const char* kSmallConfig =
    "marginal.kind = isotropic_gaussian\n"
    "marginal.dim = 2\n"
    "noise.alpha = 1.0\n"
    "noise.A = auto\n"
    "noise.margin_scale = 1.0\n"
    "run.epsilons = 0.2\n"
    "run.delta = 0.2\n"
    "run.seeds = 1\n"
    "schedule.c_N = 4.5e-5\n"
    "schedule.c_beta = 1.8e4\n"
    "schedule.c_M1 = 0.0115\n"
    "out.dir = /tmp/alh_test_out\n";

}  // namespace

TEST_CASE("config parsing basics") {
  auto cfg = Config::parse_string(
      "a.b = 1.5\n"
      "# comment line\n"
      "\n"
      "name = hello world \n"
      "list = 1,2,3\n",
      "test.cfg");
  CHECK(cfg.get_double("a.b") == 1.5);
  CHECK(cfg.get_string("name") == "hello world");
  CHECK(cfg.get_u64_list("list") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(cfg.has("a.b"));
  CHECK(!cfg.has("missing"));
  CHECK(cfg.get_double("missing", 7.0) == 7.0);
  CHECK(cfg.line_of("list") == 5);
}

TEST_CASE("config errors carry file and line") {
  auto cfg = Config::parse_string("x = not_a_number\n", "bad.cfg");
  try {
    cfg.get_double("x");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("bad.cfg:1:") != std::string::npos);
  }
  // Duplicate keys are rejected at parse time.
  CHECK_THROWS_AS(Config::parse_string("k = 1\nk = 2\n", "dup.cfg"), ConfigError);
  // Lines without '=' are rejected.
  CHECK_THROWS_AS(Config::parse_string("just words\n", "bad2.cfg"), ConfigError);
  // A missing file is a distinct error so the CLI can exit differently.
  CHECK_THROWS_AS(Config::parse_file("/nonexistent/path.cfg"), ConfigMissing);
}

TEST_CASE("experiment config validation") {
  auto good = load_experiment_config(Config::parse_string(kSmallConfig, "good.cfg"));
  CHECK(good.marginal.dim == 2);
  CHECK(good.alpha == 1.0);
  CHECK(!good.A.has_value());
  CHECK(good.resolved_A() == doctest::Approx(1.0));

  // Epsilons must be sorted descending.
  std::string bad = kSmallConfig;
  bad.replace(bad.find("run.epsilons = 0.2"), 18, "run.epsilons = 0.1,0.2");
  CHECK_THROWS_AS(load_experiment_config(Config::parse_string(bad, "bad.cfg")), ConfigError);
}

TEST_CASE("config hash is stable under key reordering") {
  auto a = Config::parse_string("x = 1\ny = 2\n");
  auto b = Config::parse_string("y = 2\nx = 1\n");
  auto c = Config::parse_string("x = 1\ny = 3\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("csv schema") {
  CHECK(record_csv_header().rfind("# schema=1\n", 0) == 0);
  CHECK(record_csv_header().find("epsilon,seed,labels_total,excess_error,min_angle,success") !=
        std::string::npos);
}

TEST_CASE("one cell runs and replays byte-identically") {
  auto cfg = load_experiment_config(Config::parse_string(kSmallConfig, "small.cfg"));
  auto rec1 = run_cell(cfg, "deadbeef", 0.2, 1);
  CHECK(rec1.completed);
  CHECK(rec1.labels.total() > 0);
  CHECK(std::isfinite(rec1.final_excess_error));
  CHECK(rec1.config_hash == "deadbeef");
  CHECK(rec1.seed == 1);

  auto rec2 = run_cell(cfg, "deadbeef", 0.2, 1);
  std::string j1 = record_to_json(rec1);
  std::string j2 = record_to_json(rec2);
  CHECK(strip_wall_time(j1) == strip_wall_time(j2));
  // The JSON does carry a wall time field.
  CHECK(j1.find("wall_time_ms") != std::string::npos);
}

TEST_CASE("scaling fit recovers a synthetic exponent") {
  std::vector<ExperimentRecord> records;
  for (double eps : {0.2, 0.1, 0.05}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      ExperimentRecord r;
      r.seed = seed;
      r.schedule.epsilon = eps;
      r.labels.psgd = std::uint64_t(std::llround(100.0 * std::pow(1.0 / eps, 1.5)));
      records.push_back(r);
    }
  }
  auto fit = fit_scaling(records);
  CHECK(fit.slope == doctest::Approx(1.5).epsilon(1e-3));
  REQUIRE(fit.per_seed_slopes.size() == 3);
  for (double s : fit.per_seed_slopes) CHECK(s == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("cli exit codes") {
  const char* missing[] = {"alh", "run", "--config", "/nonexistent/nope.cfg"};
  CHECK(cli_main(4, missing) == 2);

  std::string bad_path = "/tmp/alh_bad.cfg";
  write_text_file(bad_path, "garbage without equals\n");
  const char* bad[] = {"alh", "run", "--config", bad_path.c_str()};
  CHECK(cli_main(4, bad) == 1);
  std::remove(bad_path.c_str());
}

TEST_CASE("run command writes records") {
  std::filesystem::remove_all("/tmp/alh_test_out");
  std::string path = "/tmp/alh_small.cfg";
  write_text_file(path, kSmallConfig);
  const char* argv[] = {"alh", "run", "--config", path.c_str()};
  CHECK(cli_main(4, argv) == 0);
  CHECK(std::filesystem::exists("/tmp/alh_test_out/run_eps0.2_seed1.json"));
  CHECK(std::filesystem::exists("/tmp/alh_test_out/runs.csv"));
  std::ifstream csv("/tmp/alh_test_out/runs.csv");
  std::string first;
  std::getline(csv, first);
  CHECK(first == "# schema=1");
  std::remove(path.c_str());
  std::filesystem::remove_all("/tmp/alh_test_out");
}
