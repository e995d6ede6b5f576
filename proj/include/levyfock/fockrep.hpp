// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "levyfock/alphaidx.hpp"
#include "levyfock/orthopoly.hpp"
#include "levyfock/symtensor.hpp"

namespace levyfock {

enum class Part { plus, zero, minus, full };

// ---------------------------------------------------------------------------
// Symmetric Fock space over the composite one-particle space
// l2(levels) (x) L2(grid).  A one-particle index packs (level, point) as
// level * m + point; the one-particle inner product is the grid-weighted dot
// product (levels are orthonormal).  Degree-n tensors are multiset-keyed over
// these indices and the norm carries the n! grading:
//   ||F||^2 = sum_n n! ||F_n||^2_sym.
// ---------------------------------------------------------------------------

struct FockSpace {
  Grid grid;
  JacobiMatrix jacobi;
  int max_degree = 0;

  FockSpace(Grid g, JacobiMatrix j, int N)
      : grid(std::move(g)), jacobi(std::move(j)), max_degree(N) {
    if (N < 0) throw std::invalid_argument("max_degree must be >= 0");
  }

  int levels() const { return jacobi.size(); }
  int dim() const { return levels() * grid.size(); }
  int level_of(int idx) const { return idx / grid.size(); }
  int point_of(int idx) const { return idx % grid.size(); }
  double point_weight(int idx) const { return grid.w[idx % grid.size()]; }

  Eigen::VectorXd composite(const Eigen::VectorXd& xi, const TestFunction& psi) const {
    if (xi.size() != levels()) throw std::invalid_argument("dimension error");
    require_same_size(psi.size(), grid.size());
    Eigen::VectorXd h(dim());
    for (int k = 0; k < levels(); ++k)
      for (int j = 0; j < grid.size(); ++j) h(k * grid.size() + j) = xi(k) * psi[j];
    return h;
  }

  Eigen::VectorXd ground_composite(const TestFunction& phi) const {
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(levels());
    e0(0) = 1.0;
    return composite(e0, phi);
  }

  double one_particle_inner(const Eigen::VectorXd& g, const Eigen::VectorXd& h) const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += g(i) * h(i) * point_weight(i);
    return s;
  }
};

struct FockVector {
  std::vector<KeyMap> deg;  // deg[n] holds the degree-n component
  bool truncated = false;

  explicit FockVector(int max_degree = 0) : deg(max_degree + 1) {}
  int max_degree() const { return static_cast<int>(deg.size()) - 1; }

  void add(int n, const PointKey& key, double v) {
    if (v == 0.0) return;
    deg[n][key] += v;
  }
};

inline FockVector fock_vacuum(const FockSpace& space) {
  FockVector v(space.max_degree);
  v.deg[0][{}] = 1.0;
  return v;
}

inline double fock_key_weight(const PointKey& key, const FockSpace& space) {
  double w = 1.0;
  for (int idx : key) w *= space.point_weight(idx);
  return w;
}

inline double fock_inner(const FockSpace& space, const FockVector& u, const FockVector& v) {
  double total = 0.0;
  const int top = std::min(u.max_degree(), v.max_degree());
  for (int n = 0; n <= top; ++n) {
    double s = 0.0;
    auto it = u.deg[n].begin();
    auto jt = v.deg[n].begin();
    ColexLess less;
    while (it != u.deg[n].end() && jt != v.deg[n].end()) {
      if (less(it->first, jt->first)) {
        ++it;
      } else if (less(jt->first, it->first)) {
        ++jt;
      } else {
        s += multiset_orderings(it->first) * fock_key_weight(it->first, space) * it->second *
             jt->second;
        ++it;
        ++jt;
      }
    }
    total += factorial_d(n) * s;
  }
  return total;
}

inline double fock_norm(const FockSpace& space, const FockVector& v) {
  return std::sqrt(std::max(0.0, fock_inner(space, v, v)));
}

inline FockVector fock_axpy(double a, const FockVector& x, const FockVector& y) {
  FockVector out(std::max(x.max_degree(), y.max_degree()));
  out.truncated = x.truncated || y.truncated;
  for (int n = 0; n <= y.max_degree(); ++n)
    for (const auto& [key, val] : y.deg[n]) out.add(n, key, val);
  for (int n = 0; n <= x.max_degree(); ++n)
    for (const auto& [key, val] : x.deg[n]) out.add(n, key, a * val);
  return out;
}

inline FockVector fock_scale(double a, const FockVector& x) {
  FockVector out = x;
  for (auto& comp : out.deg)
    for (auto& [key, val] : comp) val *= a;
  return out;
}

inline double fock_vacuum_component(const FockVector& v) {
  auto it = v.deg[0].find({});
  return it == v.deg[0].end() ? 0.0 : it->second;
}

// ---------------------------------------------------------------------------
// Second quantization
// ---------------------------------------------------------------------------

// One-body operator in column-bucket form: cols[q] lists (p, T(p,q)) with
// T e_q = sum_p T(p,q) e_p in the unweighted coordinate sense.
struct OneBodyOp {
  int dim = 0;
  std::vector<std::vector<std::pair<int, double>>> cols;
};

inline OneBodyOp one_body_from_dense(const Eigen::MatrixXd& T) {
  OneBodyOp op;
  op.dim = static_cast<int>(T.cols());
  op.cols.resize(op.dim);
  for (int q = 0; q < T.cols(); ++q)
    for (int p = 0; p < T.rows(); ++p)
      if (T(p, q) != 0.0) op.cols[q].emplace_back(p, T(p, q));
  return op;
}

// (level matrix) (x) (multiplication by phi on the grid).
inline OneBodyOp level_op_times_multiplier(const FockSpace& space, const Eigen::MatrixXd& L,
                                           const TestFunction& phi) {
  require_same_size(phi.size(), space.grid.size());
  OneBodyOp op;
  op.dim = space.dim();
  op.cols.resize(op.dim);
  const int m = space.grid.size();
  for (int kq = 0; kq < space.levels(); ++kq)
    for (int j = 0; j < m; ++j) {
      if (phi[j] == 0.0) continue;
      auto& bucket = op.cols[kq * m + j];
      for (int kp = 0; kp < space.levels(); ++kp)
        if (L(kp, kq) != 0.0) bucket.emplace_back(kp * m + j, L(kp, kq) * phi[j]);
    }
  return op;
}

// Creation: (a+ (h) F)_{n+1} = h (x)^ F_n.  Overflow past the degree cap is
// dropped and flagged.
inline FockVector a_plus(const FockSpace& space, const Eigen::VectorXd& h, const FockVector& F) {
  if (h.size() != space.dim()) throw std::invalid_argument("dimension error");
  FockVector out(space.max_degree);
  out.truncated = F.truncated;
  for (int n = 0; n <= F.max_degree(); ++n) {
    if (F.deg[n].empty()) continue;
    if (n + 1 > space.max_degree) {
      out.truncated = true;
      continue;
    }
    for (const auto& [key, val] : F.deg[n]) {
      for (int p = 0; p < space.dim(); ++p) {
        if (h(p) == 0.0) continue;
        out.add(n + 1, key_insert(key, p), (key_count(key, p) + 1) * h(p) * val / (n + 1));
      }
    }
  }
  return out;
}

// Annihilation: contracts h into one slot, with the degree factor n.
inline FockVector a_minus(const FockSpace& space, const Eigen::VectorXd& h, const FockVector& F) {
  if (h.size() != space.dim()) throw std::invalid_argument("dimension error");
  FockVector out(space.max_degree);
  out.truncated = F.truncated;
  for (int n = 1; n <= F.max_degree(); ++n) {
    for (const auto& [key, val] : F.deg[n]) {
      for (std::size_t i = 0; i < key.size();) {
        const int p = key[i];
        std::size_t j = i;
        while (j < key.size() && key[j] == p) ++j;
        if (h(p) != 0.0)
          out.add(n - 1, key_erase(key, p), n * h(p) * space.point_weight(p) * val);
        i = j;
      }
    }
  }
  return out;
}

// Differential second quantization: applies T to one slot at a time.
inline FockVector a_zero(const FockSpace& space, const OneBodyOp& T, const FockVector& F) {
  if (T.dim != space.dim()) throw std::invalid_argument("dimension error");
  FockVector out(space.max_degree);
  out.truncated = F.truncated;
  for (int n = 1; n <= F.max_degree(); ++n) {
    for (const auto& [key, val] : F.deg[n]) {
      for (std::size_t i = 0; i < key.size();) {
        const int q = key[i];
        std::size_t j = i;
        while (j < key.size() && key[j] == q) ++j;
        if (!T.cols[q].empty()) {
          PointKey base = key_erase(key, q);
          for (const auto& [p, t] : T.cols[q])
            out.add(n, key_insert(base, p), t * (key_count(base, p) + 1) * val);
        }
        i = j;
      }
    }
  }
  return out;
}

inline FockVector a_zero(const FockSpace& space, const Eigen::MatrixXd& T, const FockVector& F) {
  return a_zero(space, one_body_from_dense(T), F);
}

// ---------------------------------------------------------------------------
// The field operators A(phi)
//
//   A+(phi) = a+(e0 (x) phi) + dGamma(Jplus (x) phi)
//   A0(phi) = dGamma(Jzero (x) phi)
//   A-(phi) = a-(e0 (x) phi) + dGamma(Jminus (x) phi)
//   A(phi)  = a+(e0 (x) phi) + dGamma(J (x) phi) + a-(e0 (x) phi)
// ---------------------------------------------------------------------------

// Prebuilt per-letter operators, for callers that apply many words.
struct AFieldOps {
  Eigen::VectorXd g0;
  OneBodyOp dplus, dzero, dminus, dfull;
};

inline AFieldOps make_a_field_ops(const FockSpace& space, const TestFunction& phi) {
  const JacobiSplit js = split(space.jacobi);
  AFieldOps ops;
  ops.g0 = space.ground_composite(phi);
  ops.dplus = level_op_times_multiplier(space, js.plus, phi);
  ops.dzero = level_op_times_multiplier(space, js.zero, phi);
  ops.dminus = level_op_times_multiplier(space, js.minus, phi);
  ops.dfull = level_op_times_multiplier(space, space.jacobi.dense(), phi);
  return ops;
}

inline FockVector a_field(const FockSpace& space, Part part, const AFieldOps& ops,
                          const FockVector& F) {
  FockVector out(space.max_degree);
  switch (part) {
    case Part::plus:
      out = a_plus(space, ops.g0, F);
      out = fock_axpy(1.0, a_zero(space, ops.dplus, F), out);
      break;
    case Part::zero:
      out = a_zero(space, ops.dzero, F);
      break;
    case Part::minus:
      out = a_minus(space, ops.g0, F);
      out = fock_axpy(1.0, a_zero(space, ops.dminus, F), out);
      break;
    case Part::full:
      out = a_plus(space, ops.g0, F);
      out = fock_axpy(1.0, a_minus(space, ops.g0, F), out);
      out = fock_axpy(1.0, a_zero(space, ops.dfull, F), out);
      break;
  }
  // A genuinely truncated level ladder loses the raise out of the top level.
  if (!space.jacobi.complete && (part == Part::plus || part == Part::full)) {
    const int top = space.levels() - 1;
    bool touches_top = false;
    for (int n = 1; n <= F.max_degree() && !touches_top; ++n)
      for (const auto& [key, val] : F.deg[n]) {
        for (int idx : key)
          if (space.level_of(idx) == top) {
            touches_top = true;
            break;
          }
        if (touches_top) break;
      }
    if (touches_top) out.truncated = true;
  }
  return out;
}

inline FockVector a_field(const FockSpace& space, Part part, const TestFunction& phi,
                          const FockVector& F) {
  return a_field(space, part, make_a_field_ops(space, phi), F);
}

inline FockVector apply_word_a(const FockSpace& space, const std::vector<TestFunction>& word) {
  FockVector v = fock_vacuum(space);
  for (auto it = word.rbegin(); it != word.rend(); ++it) v = a_field(space, Part::full, *it, v);
  return v;
}

inline double vacuum_word_moment_a(const FockSpace& space, const std::vector<TestFunction>& word) {
  return fock_vacuum_component(apply_word_a(space, word));
}

// ---------------------------------------------------------------------------
// Product vectors and the cross-check of the two evaluation routes
// ---------------------------------------------------------------------------

inline FockVector product_power(const FockSpace& space, const Eigen::VectorXd& h, int n) {
  FockVector v = fock_vacuum(space);
  for (int i = 0; i < n; ++i) v = a_plus(space, h, v);
  return v;
}

// Both routes for the product-vector action of the field parts: the
// second-quantization definition versus the closed product-vector formula
//   A+(phi) (xi x psi)^n = (e0 x phi) ^x (xi x psi)^n
//                          + n ((Jplus xi) x (phi psi)) ^x (xi x psi)^(n-1),
// and companions (all trailing powers read as (xi x psi)^(n-1)).  Returns the
// worst norm residual over the three parts.
inline double trd_crosscheck(const FockSpace& space, const Eigen::VectorXd& xi,
                             const TestFunction& psi, const TestFunction& phi, int n) {
  if (n < 0 || n + 1 > space.max_degree)
    throw std::invalid_argument("degree out of range for the cross-check");
  const JacobiSplit js = split(space.jacobi);
  const Eigen::VectorXd h = space.composite(xi, psi);
  const FockVector pn = product_power(space, h, n);
  const FockVector pn1 = product_power(space, h, n - 1 >= 0 ? n - 1 : 0);
  const TestFunction phipsi = pointwise_product(phi, psi);

  double worst = 0.0;
  for (Part part : {Part::plus, Part::zero, Part::minus}) {
    const FockVector lhs = a_field(space, part, phi, pn);

    FockVector rhs(space.max_degree);
    if (part == Part::plus) {
      rhs = a_plus(space, space.ground_composite(phi), pn);
      if (n >= 1)
        rhs = fock_axpy(static_cast<double>(n),
                        a_plus(space, space.composite(js.plus * xi, phipsi), pn1), rhs);
    } else if (part == Part::zero) {
      if (n >= 1)
        rhs = fock_axpy(static_cast<double>(n),
                        a_plus(space, space.composite(js.zero * xi, phipsi), pn1), rhs);
    } else {
      if (n >= 1) {
        rhs = fock_scale(n * xi(0) * inner(phi, psi, space.grid), pn1);
        rhs = fock_axpy(static_cast<double>(n),
                        a_plus(space, space.composite(js.minus * xi, phipsi), pn1), rhs);
      }
    }
    const double r = fock_norm(space, fock_axpy(-1.0, rhs, lhs));
    const double scale = std::max(1.0, fock_norm(space, lhs));
    worst = std::max(worst, r / scale);
  }
  return worst;
}

}  // namespace levyfock
