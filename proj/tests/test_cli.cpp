// Copyright 2026 the sobis authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "sobis/models.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string out_file = "cli_out_tmp.txt";
  const std::string cmd = std::string(SOBIS_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(rc);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  std::remove(out_file.c_str());
  return r;
}

double json_number(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  REQUIRE(pos != std::string::npos);
  const auto colon = text.find(':', pos);
  return std::stod(text.substr(colon + 1));
}

void write_test_csv(const std::string& path, std::size_t n, std::uint64_t seed) {
  using namespace sobis;
  const GFunctionSpec spec({1.0, 2.0, 3.0});
  Rng rng(seed);
  const Dataset data = synthetic_dataset(gfunction_model(spec), uniform_density(Box::unit_cube(3)), n, rng);
  write_dataset(data, path);
}

}  // namespace

TEST_CASE("estimate on the built-in model lands near the exact value") {
  const auto r = run_cli("estimate --model gfun --a 1,2,3 --u 1 --n 100000 --seed 7");
  REQUIRE(r.exit_code == 0);
  const double eta_hat = json_number(r.out, "eta_hat");
  const double se = json_number(r.out, "stderr");
  REQUIRE(std::abs(eta_hat - 13.0 / 12.0) < 5.0 * se);
  REQUIRE(json_number(r.out, "s_u") > 0.0);
}

TEST_CASE("estimate on a dataset with baseline weights") {
  write_test_csv("cli_data_tmp.csv", 20000, 41);
  const auto r = run_cli("estimate --data cli_data_tmp.csv --u 1 --theta-all 1,1");
  REQUIRE(r.exit_code == 0);
  const double eta_hat = json_number(r.out, "eta_hat");
  const double se = json_number(r.out, "stderr");
  REQUIRE(std::abs(eta_hat - 13.0 / 12.0) < 5.0 * se);
  REQUIRE(json_number(r.out, "ess") == 20000.0);
  std::remove("cli_data_tmp.csv");
}

TEST_CASE("missing required options exit with the config code") {
  REQUIRE(run_cli("estimate --model gfun").exit_code == 2);
  REQUIRE(run_cli("estimate --model gfun --u 1 --n 100").exit_code == 2);  // no seed
  REQUIRE(run_cli("nonsense").exit_code == 2);
  REQUIRE(run_cli("sweep --u 1").exit_code == 2);
}

TEST_CASE("determinism: identical config and seed give identical output") {
  const auto a = run_cli("estimate --model gfun --a 1,2,3 --u 1,2 --n 5000 --seed 123");
  const auto b = run_cli("estimate --model gfun --a 1,2,3 --u 1,2 --n 5000 --seed 123");
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.out == b.out);
  const auto c = run_cli("estimate --model gfun --a 1,2,3 --u 1,2 --n 5000 --seed 124");
  REQUIRE(a.out != c.out);
}

TEST_CASE("variance under the reference distribution") {
  const auto r = run_cli("variance --model gfun --a 1,2,3 --u 1,2 --dist p");
  REQUIRE(r.exit_code == 0);
  REQUIRE(std::abs(json_number(r.out, "sigma_sq") - 0.74455265965554) < 1e-8);
}

TEST_CASE("variance with a Beta proposal reports the reduction") {
  const auto r = run_cli("variance --model gfun --a 1,2,3 --u 1,2 --beta 0.7,0.7");
  REQUIRE(r.exit_code == 0);
  REQUIRE(json_number(r.out, "reduction_vs_uniform") > 0.4);
}

TEST_CASE("zero-variance case reports near-zero deviations") {
  const auto r = run_cli("variance --model gfun --a 1,2,3 --u 1,2 --case zero --seed 5");
  REQUIRE(r.exit_code == 0);
  REQUIRE(json_number(r.out, "max_pointwise_rel_dev") < 1e-8);
  REQUIRE(json_number(r.out, "mc_rel_variance") < 1e-18);
}

TEST_CASE("dataset sweep writes the grid CSV") {
  write_test_csv("cli_sweep_tmp.csv", 5000, 43);
  const auto r = run_cli(
      "sweep --data cli_sweep_tmp.csv --u 1 --marginal 1 --alpha-grid 0.5:2:5 --beta-grid 0.5:2:5 "
      "--out cli_sweep_out_tmp.csv");
  REQUIRE(r.exit_code == 0);
  REQUIRE(json_number(r.out, "rows") == 25.0);
  std::ifstream in("cli_sweep_out_tmp.csv");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
  }
  REQUIRE(rows == 26);  // header + 25 entries
  std::remove("cli_sweep_tmp.csv");
  std::remove("cli_sweep_out_tmp.csv");
}

TEST_CASE("CV curve sweep is monotone decreasing") {
  const auto r = run_cli(
      "sweep --model gfun --a 1,2,3 --u 1,2 --cv-curve --t-grid 0:1:11 --n 5000 --order 24 --seed 2 "
      "--out cli_cv_tmp.csv");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.find("\"monotone_decreasing\": true") != std::string::npos);
  std::remove("cli_cv_tmp.csv");
}

TEST_CASE("surface sweep reports the argmin") {
  const auto r = run_cli(
      "sweep --model gfun --a 1,2,3 --u 1,2 --surface --grid 0.5:1.5:5 --order 24 --out cli_surf_tmp.csv");
  REQUIRE(r.exit_code == 0);
  REQUIRE(json_number(r.out, "argmin_alpha") < 1.0);
  REQUIRE(json_number(r.out, "reduction_vs_uniform") > 0.3);
  std::remove("cli_surf_tmp.csv");
}

TEST_CASE("validate --quick passes and writes the report") {
  const auto r = run_cli("validate --quick --report cli_validate_tmp.json");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.find("all checks passed") != std::string::npos);
  std::ifstream in("cli_validate_tmp.json");
  std::stringstream ss;
  ss << in.rdbuf();
  REQUIRE(ss.str().find("\"pass\": true") != std::string::npos);
  std::remove("cli_validate_tmp.json");
}
