// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>

#include "levyfock/config.hpp"
#include "levyfock/run.hpp"

using namespace levyfock;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  const std::string cmd = std::string(LEVYFOCK_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  CommandResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) res.output.append(buf.data(), got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string config_path(const std::string& name) {
  return std::string(LEVYFOCK_CONFIG_DIR) + "/" + name;
}

std::string write_temp_config(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/levyfock_test_" + name + ".json";
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("config parsing applies defaults and normalization") {
  const std::string text = R"({
    "nu_tilde": {"atoms": [["-1", "1"], ["1", "1"]]},
    "grid": {"weights": [0.5, 0.5]},
    "test_functions": [[1, -1]],
    "truncation": {"max_degree": 4, "ell2_dim": 4, "word_length": 3}
  })";
  const RunConfig cfg = parse_config_text(text);
  REQUIRE(cfg.nu_tilde.total_mass() == 1);
  REQUIRE(cfg.nu_tilde.c == 2);
  REQUIRE(cfg.tol_rel == 1e-9);
  REQUIRE(cfg.tol_gram == 1e-8);
  REQUIRE(cfg.tol_rank == 1e-10);
}

TEST_CASE("config invariants are enforced") {
  const std::string bad_m = R"({
    "nu_tilde": {"atoms": [["1", "1"]]},
    "grid": {"weights": [1.0]},
    "truncation": {"max_degree": 4, "ell2_dim": 3, "word_length": 3}
  })";
  REQUIRE_THROWS_WITH(parse_config_text(bad_m),
                      Catch::Matchers::ContainsSubstring("ell2_dim too small for word_length"));
  const std::string bad_family = R"({
    "nu_tilde": {"family": "zeta"},
    "grid": {"weights": [1.0]},
    "truncation": {"max_degree": 4, "ell2_dim": 5, "word_length": 3}
  })";
  REQUIRE_THROWS_AS(parse_config_text(bad_family), std::exception);
}

TEST_CASE("config round-trips through serialize and parse") {
  const RunConfig cfg = parse_config(config_path("threeatom.json"));
  const std::string text1 = serialize_config(cfg);
  const RunConfig cfg2 = parse_config_text(text1);
  const std::string text2 = serialize_config(cfg2);
  REQUIRE(text1 == text2);
  REQUIRE(cfg.nu_tilde.atoms == cfg2.nu_tilde.atoms);
  REQUIRE(cfg.nu_tilde.c == cfg2.nu_tilde.c);
  REQUIRE(cfg.mc_seed == cfg2.mc_seed);
}

TEST_CASE("jacobi command emits the gamma-type recurrence") {
  const auto res = run_cli("--config " + config_path("gamma2.json") + " jacobi");
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.output.rfind("n,a_n,b_n\n", 0) == 0);
  // rows: (0, 2, -), (1, 4, sqrt 2), (2, 6, sqrt 6), ...
  REQUIRE(res.output.find("0,2,\n") != std::string::npos);
  REQUIRE(res.output.find("1,4,1.41421356") != std::string::npos);
  REQUIRE(res.output.find("2,6,2.44948974") != std::string::npos);
}

TEST_CASE("alpha command lists the enumeration with weights") {
  const auto res = run_cli("--config " + config_path("threeatom.json") + " alpha --degree 3");
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.output.find("alpha,weight,size,K_alpha") != std::string::npos);
  REQUIRE(res.output.find("(3),3,3,1\n") != std::string::npos);
  REQUIRE(res.output.find("(1 1),3,2,") != std::string::npos);
  REQUIRE(res.output.find("(0 0 1),3,1,") != std::string::npos);
}

TEST_CASE("moments command prints one value per side") {
  const std::string base = "--config " + config_path("standard.json") + " moments ";
  const auto oracle = run_cli(base + "--side oracle --word 0,0");
  REQUIRE(oracle.exit_code == 0);
  REQUIRE(std::stod(oracle.output) == Catch::Approx(1.0));
  const auto j4 = run_cli(base + "--side j --word 0,0,0,0");
  REQUIRE(std::stod(j4.output) == Catch::Approx(4.0));
  const auto a4 = run_cli(base + "--side a --word 0,0,0,0");
  REQUIRE(std::stod(a4.output) == Catch::Approx(4.0));
}

TEST_CASE("verify equivalence on the standard instance passes with exit 0") {
  const auto res = run_cli("--config " + config_path("standard.json") + " verify --suite equivalence");
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.output.find("\"pass\": true") != std::string::npos);
  REQUIRE(res.output.find("\"suite\": \"equivalence\"") != std::string::npos);
}

TEST_CASE("verify reports are byte-identical across runs and thread counts") {
  const std::string base = "--config " + config_path("standard.json") + " ";
  const auto a = run_cli(base + "--threads 1 verify --suite mc");
  const auto b = run_cli(base + "--threads 3 verify --suite mc");
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.output == b.output);
  const auto c = run_cli(base + "--threads 1 verify --suite oracle");
  const auto d = run_cli(base + "--threads 1 verify --suite oracle");
  REQUIRE(c.output == d.output);
}

TEST_CASE("exit codes follow the contract") {
  SECTION("missing config file exits 2") {
    const auto res = run_cli("--config /nonexistent/nope.json verify");
    REQUIRE(res.exit_code == 2);
  }
  SECTION("invariant violations exit 2") {
    const std::string path = write_temp_config("badm", R"({
      "nu_tilde": {"atoms": [["1", "1"]]},
      "grid": {"weights": [1.0]},
      "truncation": {"max_degree": 4, "ell2_dim": 3, "word_length": 3}
    })");
    const auto res = run_cli("--config " + path + " jacobi");
    REQUIRE(res.exit_code == 2);
  }
  SECTION("family ladders shorter than the degree cap exit 2") {
    const std::string path = write_temp_config("famshort", R"({
      "nu_tilde": {"family": "gamma2"},
      "grid": {"weights": [0.5, 0.5]},
      "test_functions": [[1, -1]],
      "truncation": {"max_degree": 6, "ell2_dim": 4, "word_length": 3}
    })");
    const auto res = run_cli("--config " + path + " jacobi");
    REQUIRE(res.exit_code == 2);
  }
  SECTION("failed checks exit 1") {
    // the three-atom instance has non-dyadic moment values, so the three-way
    // deviations are tiny but nonzero and an absurd tolerance must fail
    const std::string path = write_temp_config("tight", R"({
      "nu_tilde": {"atoms": [["1", "1/2"], ["2", "1/4"], ["-1", "1/4"]]},
      "grid": {"weights": [0.5, 0.25, 0.25]},
      "test_functions": [[1, 1, 1], [1, -1, 2], [2, 1, -1]],
      "truncation": {"max_degree": 4, "ell2_dim": 5, "word_length": 4},
      "tolerances": {"rel": 1e-30}
    })");
    const auto res = run_cli("--config " + path + " verify --suite equivalence");
    REQUIRE(res.exit_code == 1);
    REQUIRE(res.output.find("\"pass\": false") != std::string::npos);
  }
}

TEST_CASE("out and seed flags are honored") {
  const std::string base = "--config " + config_path("standard.json") + " ";
  SECTION("--out writes the report to a file") {
    const std::string out = "/tmp/levyfock_test_report.json";
    std::remove(out.c_str());
    const auto res = run_cli(base + "--out " + out + " verify --suite oracle");
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.output.empty());
    std::ifstream in(out);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(text.find("\"pass\": true") != std::string::npos);
  }
  SECTION("--seed overrides the configured Monte Carlo stream") {
    const auto a = run_cli(base + "--seed 11 sample");
    const auto b = run_cli(base + "--seed 12 sample");
    const auto c = run_cli(base + "--seed 11 sample");
    REQUIRE(a.output != b.output);
    REQUIRE(a.output == c.output);
  }
}

TEST_CASE("truncated word moments exit with a failure") {
  // seven letters exceed max_degree = 6, so the vacuum word is flagged
  const auto res = run_cli("--config " + config_path("standard.json") +
                           " moments --side j --word 0,0,0,0,0,0,0");
  REQUIRE(res.exit_code == 1);
}

TEST_CASE("sample command emits a CSV and a moment table") {
  const std::string path = write_temp_config("small_mc", R"({
    "nu_tilde": {"atoms": [["-1", "1/2"], ["1", "1/2"]]},
    "grid": {"weights": [0.5, 0.5]},
    "test_functions": [[1, -1]],
    "truncation": {"max_degree": 4, "ell2_dim": 4, "word_length": 3},
    "mc": {"samples": 500, "seed": 3}
  })");
  const auto res = run_cli("--config " + path + " sample");
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.output.rfind("sample,phi_0\n", 0) == 0);
  REQUIRE(res.output.find("word,empirical,std_error,oracle") != std::string::npos);
  const auto res2 = run_cli("--config " + path + " sample");
  REQUIRE(res.output == res2.output);
}

TEST_CASE("report JSON is emitted with 17 significant digits") {
  REQUIRE(format_double(1.0 / 3.0) == "0.33333333333333331");
  REQUIRE(format_double(4.0) == "4");
  Report rep;
  rep.command = "verify";
  rep.suite = "demo";
  rep.check("sample check", 0.5, 1.0);
  const std::string js = rep.to_json();
  REQUIRE(js.find("\"checks\"") != std::string::npos);
  REQUIRE(js.find("\"pass\": true") != std::string::npos);
}
