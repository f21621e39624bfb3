#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "irsopt/harness.hpp"
#include "irsopt/rng.hpp"

using namespace irsopt;

namespace {

SystemConfig tiny_desk() {
  SystemConfig cfg = desk_preset();
  cfg.n_tx = 16;
  cfg.n_irs_x = 4;
  cfg.n_irs_y = 2;
  cfg.n_users = 3;
  cfg.max_outer_iters = 6;
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::joint, Scheme::partial_f_fixed, Scheme::random_theta,
                   Scheme::uniform_pa, Scheme::no_irs}) {
    CHECK(scheme_from_string(scheme_name(s)) == s);
  }
  CHECK_THROWS_AS(scheme_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("irs_grid_for picks the widest near-square factorization") {
  CHECK(irs_grid_for(8) == std::pair<int, int>{4, 2});
  CHECK(irs_grid_for(16) == std::pair<int, int>{4, 4});
  CHECK(irs_grid_for(32) == std::pair<int, int>{8, 4});
  CHECK(irs_grid_for(48) == std::pair<int, int>{8, 6});
  CHECK(irs_grid_for(64) == std::pair<int, int>{8, 8});
  CHECK(irs_grid_for(1) == std::pair<int, int>{1, 1});
  CHECK(irs_grid_for(7) == std::pair<int, int>{7, 1});
}

TEST_CASE("uniform_pa equals joint for a single user with a binding budget") {
  SystemConfig cfg = tiny_desk();
  cfg.n_users = 1;
  cfg.rng_seed = 11;
  const auto ch = generate_channels(cfg, cfg.rng_seed);
  const double joint = run_scheme(Scheme::joint, cfg, ch);
  const double uniform = run_scheme(Scheme::uniform_pa, cfg, ch);
  CHECK(std::abs(joint - uniform) <= 1e-4 * std::max(1.0, std::abs(joint)));
}

TEST_CASE("scheme ordering on paired trials") {
  const SystemConfig base = tiny_desk();
  double joint_sum = 0.0, random_sum = 0.0, no_irs_sum = 0.0;
  const int n_trials = 15;
  for (int trial = 0; trial < n_trials; ++trial) {
    SystemConfig cfg = base;
    cfg.rng_seed = 500 + trial;
    const auto ch = generate_channels(cfg, cfg.rng_seed);
    joint_sum += run_scheme(Scheme::joint, cfg, ch);
    random_sum += run_scheme(Scheme::random_theta, cfg, ch);
    no_irs_sum += run_scheme(Scheme::no_irs, cfg, ch);
  }
  CHECK(random_sum <= joint_sum);
  CHECK(no_irs_sum <= random_sum);
}

TEST_CASE("run_sweep single point single scheme yields one row") {
  ExperimentSpec spec;
  spec.base = tiny_desk();
  spec.sweep_axis = "snr_db";
  spec.sweep_values = {10.0};
  spec.schemes = {Scheme::joint};
  spec.n_trials = 1;
  spec.seed_base = 3;
  const auto result = run_sweep(spec);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].sweep_value == 10.0);
  CHECK(result.rows[0].scheme == Scheme::joint);
  CHECK(result.rows[0].mean_se >= 0.0);
  CHECK(result.rows[0].std_se == 0.0);
  CHECK(result.rows[0].n_trials == 1);
}

TEST_CASE("run_sweep validates its spec") {
  ExperimentSpec spec;
  spec.base = tiny_desk();
  spec.sweep_values = {};
  CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
  spec.sweep_values = {10.0, 5.0};
  CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
  spec.sweep_values = {5.0};
  spec.n_trials = 0;
  CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
  spec.n_trials = 1;
  spec.sweep_axis = "users";
  CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
}

TEST_CASE("sweep CSV bytes are reproducible") {
  ExperimentSpec spec;
  spec.base = tiny_desk();
  spec.sweep_axis = "snr_db";
  spec.sweep_values = {5.0, 10.0};
  spec.schemes = {Scheme::joint, Scheme::no_irs};
  spec.n_trials = 2;
  spec.seed_base = 7;
  const std::string csv_a = to_csv(run_sweep(spec));
  const std::string csv_b = to_csv(run_sweep(spec));
  CHECK(csv_a == csv_b);
  CHECK(csv_a.rfind("sweep_axis,sweep_value,scheme,mean_se,std_se,n_trials\n", 0) == 0);
  CHECK(csv_a.back() == '\n');
  // header + 2 sweep values x 2 schemes
  CHECK(std::count(csv_a.begin(), csv_a.end(), '\n') == 5);
}

TEST_CASE("emit_csv writes files and rejects empty results") {
  SweepResult result;
  CHECK_THROWS_AS(emit_csv(result, "/tmp/irsopt_empty.csv"), std::invalid_argument);
  result.rows.push_back({"snr_db", 10.0, Scheme::joint, 1.25, 0.5, 4});
  const std::string path = "/tmp/irsopt_one_row.csv";
  emit_csv(result, path);
  const std::string body = read_file(path);
  CHECK(body ==
        "sweep_axis,sweep_value,scheme,mean_se,std_se,n_trials\n"
        "snr_db,10.000000,joint,1.250000,0.500000,4\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(emit_csv(result, "/nonexistent_dir/x.csv"), std::runtime_error);
}

TEST_CASE("golden sweep file stays byte-identical") {
  ExperimentSpec spec;
  spec.base = tiny_desk();
  spec.sweep_axis = "snr_db";
  spec.sweep_values = {5.0, 10.0};
  spec.schemes = {Scheme::joint, Scheme::uniform_pa};
  spec.n_trials = 2;
  spec.seed_base = 42;
  const std::string csv = to_csv(run_sweep(spec));
  const std::string golden = read_file(std::string(IRSOPT_TEST_DATA_DIR) + "/golden_sweep.csv");
  CHECK(csv == golden);
}

TEST_CASE("joint mean SE grows with SNR") {
  ExperimentSpec spec;
  spec.base = tiny_desk();
  spec.sweep_axis = "snr_db";
  spec.sweep_values = {0.0, 5.0, 10.0};
  spec.schemes = {Scheme::joint};
  spec.n_trials = 20;
  spec.seed_base = 900;
  const auto result = run_sweep(spec);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].mean_se < result.rows[1].mean_se);
  CHECK(result.rows[1].mean_se < result.rows[2].mean_se);
}

TEST_CASE("load_spec mirrors the JSON fields") {
  const std::string path = "/tmp/irsopt_spec.json";
  {
    std::ofstream out(path);
    out << R"({
      "base": {"n_tx": 8, "n_irs_x": 2, "n_irs_y": 2, "n_users": 2,
               "total_power": 0.02, "noise_power": 0.002,
               "admm_penalties": [1.5, 2.5], "rng_seed": 77},
      "sweep_axis": "power_dbm",
      "sweep_values": [10, 20],
      "schemes": ["joint", "no_irs"],
      "n_trials": 3,
      "seed_base": 123,
      "out_path": "result.csv"
    })";
  }
  const ExperimentSpec spec = load_spec(path);
  std::remove(path.c_str());
  CHECK(spec.base.n_tx == 8);
  CHECK(spec.base.n_users == 2);
  CHECK(spec.base.total_power == 0.02);
  CHECK(spec.base.admm_penalty_p1 == 1.5);
  CHECK(spec.base.admm_penalty_p2 == 2.5);
  CHECK(spec.base.rng_seed == 77);
  CHECK(spec.sweep_axis == "power_dbm");
  CHECK(spec.sweep_values == std::vector<double>{10, 20});
  REQUIRE(spec.schemes.size() == 2);
  CHECK(spec.schemes[0] == Scheme::joint);
  CHECK(spec.schemes[1] == Scheme::no_irs);
  CHECK(spec.n_trials == 3);
  CHECK(spec.seed_base == 123);
  CHECK(spec.out_path == "result.csv");
  CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), std::runtime_error);
}
