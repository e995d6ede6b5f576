// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "levyfock/basespace.hpp"
#include "levyfock/measure.hpp"
#include "levyfock/report.hpp"

namespace levyfock {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full run description: the jump measure, the grid, the test functions, the
// truncation parameters, tolerances, and the Monte Carlo block.
struct RunConfig {
  JumpMeasure nu_tilde;  // normalized; carries the constant c
  Grid grid;
  std::vector<TestFunction> test_functions;
  int max_degree = 0;   // N
  int ell2_dim = 0;     // M (requested; atom measures cap at their support)
  int word_length = 0;  // K
  double tol_rel = 1e-9;
  double tol_gram = 1e-8;
  double tol_rank = 1e-10;
  std::uint64_t mc_samples = 100000;
  std::uint64_t mc_seed = 1;
};

namespace detail {

inline Rational json_rational(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float()) return Rational(v.get<double>());  // exact dyadic
  throw ConfigError("field " + where + ": expected number or rational string");
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  try {
    if (!j.contains("nu_tilde")) throw ConfigError("missing block: nu_tilde");
    const auto& nt = j.at("nu_tilde");
    if (nt.contains("atoms")) {
      std::vector<std::pair<Rational, Rational>> atoms;
      int idx = 0;
      for (const auto& a : nt.at("atoms")) {
        if (!a.is_array() || a.size() != 2)
          throw ConfigError("nu_tilde.atoms[" + std::to_string(idx) + "]: expected [s, w]");
        atoms.emplace_back(detail::json_rational(a[0], "nu_tilde.atoms.s"),
                           detail::json_rational(a[1], "nu_tilde.atoms.w"));
        ++idx;
      }
      auto [normalized, c] = normalize(JumpMeasure::from_atoms(std::move(atoms)));
      cfg.nu_tilde = std::move(normalized);
      // an explicit c records mass already removed upstream
      if (nt.contains("c")) cfg.nu_tilde.c = detail::json_rational(nt.at("c"), "nu_tilde.c");
    } else if (nt.contains("family")) {
      cfg.nu_tilde = JumpMeasure::from_family(nt.at("family").get<std::string>());
    } else {
      throw ConfigError("nu_tilde: expected atoms or family");
    }

    if (!j.contains("grid")) throw ConfigError("missing block: grid");
    cfg.grid = Grid(j.at("grid").at("weights").get<std::vector<double>>());

    if (j.contains("test_functions")) {
      for (const auto& f : j.at("test_functions")) {
        TestFunction tf(f.get<std::vector<double>>());
        require_same_size(tf.size(), cfg.grid.size());
        cfg.test_functions.push_back(std::move(tf));
      }
    }

    const auto& tr = j.at("truncation");
    cfg.max_degree = tr.at("max_degree").get<int>();
    cfg.ell2_dim = tr.at("ell2_dim").get<int>();
    cfg.word_length = tr.at("word_length").get<int>();

    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      if (t.contains("rel")) cfg.tol_rel = t.at("rel").get<double>();
      if (t.contains("gram")) cfg.tol_gram = t.at("gram").get<double>();
      if (t.contains("rank")) cfg.tol_rank = t.at("rank").get<double>();
    }
    if (j.contains("mc")) {
      const auto& mc = j.at("mc");
      if (mc.contains("samples")) cfg.mc_samples = mc.at("samples").get<std::uint64_t>();
      if (mc.contains("seed")) cfg.mc_seed = mc.at("seed").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  // invariants
  if (cfg.max_degree < 0 || cfg.ell2_dim < 1 || cfg.word_length < 0)
    throw ConfigError("truncation parameters must be positive");
  if (cfg.ell2_dim < cfg.word_length + 1)
    throw ConfigError("ell2_dim too small for word_length");
  if (cfg.max_degree < cfg.word_length)
    throw ConfigError("max_degree too small for word_length");
  if (!(cfg.tol_rel > 0) || !(cfg.tol_gram > 0) || !(cfg.tol_rank > 0))
    throw ConfigError("tolerances must be positive");
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return config_from_json(j);
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// Lossless serialization: atoms as exact rational strings, floats with 17
// significant digits, fixed key order.  parse(serialize(cfg)) == cfg,
// including the normalization constant.
inline std::string serialize_config(const RunConfig& cfg) {
  std::string out = "{\n  \"nu_tilde\": {";
  if (cfg.nu_tilde.kind == JumpMeasure::Kind::atoms) {
    out += "\"atoms\": [";
    for (std::size_t i = 0; i < cfg.nu_tilde.atoms.size(); ++i) {
      if (i) out += ", ";
      out += "[\"" + rational_to_string(cfg.nu_tilde.atoms[i].first) + "\", \"" +
             rational_to_string(cfg.nu_tilde.atoms[i].second) + "\"]";
    }
    out += "], \"c\": \"" + rational_to_string(cfg.nu_tilde.c) + "\"";
  } else {
    out += "\"family\": \"" + json_escape(cfg.nu_tilde.family) + "\"";
  }
  out += "},\n  \"grid\": {\"weights\": [";
  for (int j = 0; j < cfg.grid.size(); ++j) {
    if (j) out += ", ";
    out += format_double(cfg.grid.w[j]);
  }
  out += "]},\n  \"test_functions\": [";
  for (std::size_t f = 0; f < cfg.test_functions.size(); ++f) {
    if (f) out += ", ";
    out += "[";
    for (int j = 0; j < cfg.test_functions[f].size(); ++j) {
      if (j) out += ", ";
      out += format_double(cfg.test_functions[f][j]);
    }
    out += "]";
  }
  out += "],\n  \"truncation\": {\"max_degree\": " + std::to_string(cfg.max_degree) +
         ", \"ell2_dim\": " + std::to_string(cfg.ell2_dim) +
         ", \"word_length\": " + std::to_string(cfg.word_length) + "},\n";
  out += "  \"tolerances\": {\"rel\": " + format_double(cfg.tol_rel) +
         ", \"gram\": " + format_double(cfg.tol_gram) +
         ", \"rank\": " + format_double(cfg.tol_rank) + "},\n";
  out += "  \"mc\": {\"samples\": " + std::to_string(cfg.mc_samples) +
         ", \"seed\": " + std::to_string(cfg.mc_seed) + "}\n}\n";
  return out;
}

}  // namespace levyfock
