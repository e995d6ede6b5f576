// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace levyfock {

// Reports are emitted by a purpose-built serializer so that the byte output
// is fully pinned down: floats always carry 17 significant digits (lossless
// for doubles), keys appear in insertion order, no locale involvement.

inline std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (v == 0.0) return "0";  // canonicalize the sign of zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::string command;
  std::string suite;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void check(const std::string& name, double value, double tolerance) {
    checks.push_back({name, value, tolerance, value <= tolerance});
  }

  std::string to_json() const {
    std::string out = "{\n";
    out += "  \"command\": \"" + json_escape(command) + "\",\n";
    out += "  \"suite\": \"" + json_escape(suite) + "\",\n";
    out += "  \"checks\": [\n";
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& c = checks[i];
      out += "    {\"check\": \"" + json_escape(c.name) + "\", \"value\": " + format_double(c.value) +
             ", \"tolerance\": " + format_double(c.tolerance) +
             ", \"pass\": " + (c.pass ? "true" : "false") + "}";
      out += (i + 1 < checks.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += std::string("  \"pass\": ") + (all_pass() ? "true" : "false") + "\n";
    out += "}\n";
    return out;
  }
};

}  // namespace levyfock
