// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "levyfock/run.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

void write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw levyfock::ConfigError("cannot open output file: " + path);
  out << text;
}

std::vector<int> parse_word(const std::string& csv) {
  std::vector<int> w;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) w.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-truncation laboratory for the Jacobi field of a Levy process"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags remain valid after the subcommand name

  std::string config_path, out_path;
  int threads = 1;
  long long seed_override = -1;
  app.add_option("--config", config_path, "path to the JSON run configuration")->required();
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--seed", seed_override, "override the Monte Carlo seed");
  app.add_option("--threads", threads, "worker threads for Monte Carlo");

  auto* cmd_jacobi = app.add_subcommand("jacobi", "CSV of the recurrence coefficients");
  auto* cmd_alpha = app.add_subcommand("alpha", "enumerate one weight level with K_alpha");
  int alpha_degree = 0;
  cmd_alpha->add_option("--degree", alpha_degree, "weight level")->required();
  auto* cmd_moments = app.add_subcommand("moments", "one vacuum word moment");
  std::string side, word_csv;
  cmd_moments->add_option("--side", side, "j | a | oracle")->required();
  cmd_moments->add_option("--word", word_csv, "comma-separated letter indices")->required();
  auto* cmd_verify = app.add_subcommand("verify", "run a verification suite (JSON report)");
  std::string suite = "all";
  cmd_verify->add_option("--suite", suite,
                         "all | isometry | adjoint | commute | equivalence | oracle | mc");
  auto* cmd_sample = app.add_subcommand("sample", "Monte Carlo samples and moment table");

  CLI11_PARSE(app, argc, argv);

  try {
    levyfock::RunConfig cfg = levyfock::parse_config(config_path);
    if (seed_override >= 0) cfg.mc_seed = static_cast<std::uint64_t>(seed_override);
    levyfock::RunContext ctx = levyfock::RunContext::make(std::move(cfg), threads);
    if (ctx.jacobi.size() < ctx.cfg.ell2_dim)
      std::cerr << "warning: support smaller than requested size; matrix truncated to "
                << ctx.jacobi.size() << "\n";

    if (cmd_jacobi->parsed()) {
      write_out(out_path, levyfock::run_jacobi_csv(ctx));
      return kExitPass;
    }
    if (cmd_alpha->parsed()) {
      write_out(out_path, levyfock::run_alpha_table(ctx, alpha_degree));
      return kExitPass;
    }
    if (cmd_moments->parsed()) {
      const auto mv = levyfock::run_moment(ctx, side, parse_word(word_csv));
      write_out(out_path, levyfock::format_double(mv.value) + "\n");
      if (mv.flagged) {
        std::cerr << "warning: truncation flag raised; value invalid\n";
        return kExitFail;
      }
      return kExitPass;
    }
    if (cmd_verify->parsed()) {
      const levyfock::Report rep = levyfock::run_verify(ctx, suite);
      write_out(out_path, rep.to_json());
      return rep.all_pass() ? kExitPass : kExitFail;
    }
    if (cmd_sample->parsed()) {
      const auto s = levyfock::run_sample(ctx);
      write_out(out_path, s.csv + "\n" + s.table);
      return kExitPass;
    }
  } catch (const levyfock::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitConfig;
}
