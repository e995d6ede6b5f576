// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levyfock/rational.hpp"

namespace levyfock {

// A jump-size measure, either a finite atom list or a named moment family.
//
// The same type represents both the Levy measure nu and its square-weighted
// normalized companion nu_tilde(ds) = s^2 nu(ds); which one an instance means
// is a matter of use.  Atoms are kept as exact rationals so that the moment
// sequence, and everything downstream of it, can stay exact.
struct JumpMeasure {
  enum class Kind { atoms, family };

  Kind kind = Kind::atoms;
  std::vector<std::pair<Rational, Rational>> atoms;  // (jump size s != 0, mass w > 0)
  std::string family;                                // e.g. "gamma2"
  Rational c = 1;                                    // mass removed by normalize()

  static JumpMeasure from_atoms(std::vector<std::pair<Rational, Rational>> a) {
    JumpMeasure m;
    m.kind = Kind::atoms;
    m.atoms = std::move(a);
    for (const auto& [s, w] : m.atoms) {
      if (s == 0) throw std::invalid_argument("Levy measure charges zero");
      if (w <= 0) throw std::invalid_argument("atom mass must be positive");
    }
    return m;
  }

  static JumpMeasure from_family(const std::string& name) {
    if (name != "gamma2")
      throw std::invalid_argument("unknown family: " + name);
    JumpMeasure m;
    m.kind = Kind::family;
    m.family = name;
    return m;
  }

  Rational total_mass() const {
    if (kind == Kind::family) return 1;  // families are defined normalized
    Rational t = 0;
    for (const auto& [s, w] : atoms) t += w;
    return t;
  }

  int support_size() const {
    if (kind == Kind::family) return -1;  // infinite
    std::vector<Rational> pts;
    for (const auto& [s, w] : atoms) pts.push_back(s);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return static_cast<int>(pts.size());
  }
};

// Rescales to total mass 1 and returns the removed constant c.  The caller is
// responsible for the compensating rescale sigma' = c*sigma of the base
// measure when the pair (nu, sigma) must keep its product intact.
inline std::pair<JumpMeasure, Rational> normalize(const JumpMeasure& raw) {
  if (raw.kind == JumpMeasure::Kind::family) return {raw, Rational(1)};
  Rational mass = raw.total_mass();
  if (mass <= 0) throw std::invalid_argument("degenerate measure");
  JumpMeasure out = raw;
  for (auto& [s, w] : out.atoms) w /= mass;
  out.c = mass * raw.c;
  return {out, mass};
}

// Exact raw moments m_0..m_K.  Family measures use their closed rule.
inline std::vector<Rational> moments(const JumpMeasure& m, int K) {
  if (K < 0) throw std::invalid_argument("moment order must be nonnegative");
  std::vector<Rational> out;
  out.reserve(K + 1);
  if (m.kind == JumpMeasure::Kind::family) {
    if (m.family == "gamma2") {
      for (int k = 0; k <= K; ++k) out.emplace_back(big_factorial(k + 1));
      return out;
    }
    throw std::runtime_error("moments unavailable for family: " + m.family);
  }
  std::vector<Rational> pw(m.atoms.size(), Rational(1));
  for (int k = 0; k <= K; ++k) {
    Rational mk = 0;
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
      mk += m.atoms[i].second * pw[i];
      pw[i] *= m.atoms[i].first;
    }
    out.push_back(mk);
  }
  return out;
}

inline std::vector<double> moments_d(const JumpMeasure& m, int K) {
  auto r = moments(m, K);
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = to_double(r[i]);
  return out;
}

// nu_tilde -> nu: atom (s, w) becomes (s, w/s^2).  Exact inverse of
// (s, u) -> (s, u*s^2).
inline JumpMeasure nu_from_tilde(const JumpMeasure& m) {
  if (m.kind != JumpMeasure::Kind::atoms)
    throw std::invalid_argument("nu_from_tilde requires an atom measure");
  JumpMeasure out = m;
  for (auto& [s, w] : out.atoms) {
    if (s == 0) throw std::invalid_argument("Levy measure charges zero");
    w /= s * s;
  }
  return out;
}

inline JumpMeasure tilde_from_nu(const JumpMeasure& m) {
  if (m.kind != JumpMeasure::Kind::atoms)
    throw std::invalid_argument("tilde_from_nu requires an atom measure");
  JumpMeasure out = m;
  for (auto& [s, w] : out.atoms) w *= s * s;
  return out;
}

// Determinant of the k-th Hankel matrix H[i][j] = m_{i+j}, exact.
inline Rational hankel_determinant(const std::vector<Rational>& mom, int k) {
  if (2 * (k - 1) >= static_cast<int>(mom.size()))
    throw std::invalid_argument("not enough moments for Hankel determinant");
  std::vector<std::vector<Rational>> h(k, std::vector<Rational>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) h[i][j] = mom[i + j];
  // Gaussian elimination over the rationals.
  Rational det = 1;
  for (int col = 0; col < k; ++col) {
    int piv = -1;
    for (int r = col; r < k; ++r)
      if (h[r][col] != 0) { piv = r; break; }
    if (piv < 0) return 0;
    if (piv != col) { std::swap(h[piv], h[col]); det = -det; }
    det *= h[col][col];
    for (int r = col + 1; r < k; ++r) {
      Rational f = h[r][col] / h[col][col];
      for (int cc = col; cc < k; ++cc) h[r][cc] -= f * h[col][cc];
    }
  }
  return det;
}

// Positive definiteness of Hankel matrices up to the given size (leading
// principal Hankel determinants all positive).
inline bool hankel_positive_definite(const std::vector<Rational>& mom, int size) {
  for (int k = 1; k <= size; ++k)
    if (hankel_determinant(mom, k) <= 0) return false;
  return true;
}

}  // namespace levyfock
