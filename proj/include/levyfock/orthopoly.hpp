// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "levyfock/measure.hpp"
#include "levyfock/rational.hpp"

namespace levyfock {

// Three-term recurrence of the orthonormal polynomials of a measure,
//   p_{-1} = 0,  b_{n+1} p_{n+1}(s) = (s - a_n) p_n(s) - b_n p_{n-1}(s),
// stored with squared off-diagonals so the exact-rational path stays exact.
// b2[i] holds b_{i+1}^2 (there is no b_0 in the matrix).
template <typename T>
struct Recurrence {
  std::vector<T> a;
  std::vector<T> b2;
  // True when the measure's support equals the matrix size, so that the
  // finite matrix resolves the spectral measure exactly (no tail dropped).
  bool complete = false;

  int size() const { return static_cast<int>(a.size()); }
};

// Symmetric tridiagonal matrix of recurrence coefficients; b[i] = b_{i+1} > 0
// sits on the off-diagonal between rows i and i+1.
struct JacobiMatrix {
  std::vector<double> a;
  std::vector<double> b;
  bool complete = false;

  int size() const { return static_cast<int>(a.size()); }

  Eigen::MatrixXd dense() const {
    const int M = size();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(M, M);
    for (int i = 0; i < M; ++i) J(i, i) = a[i];
    for (int i = 0; i + 1 < M; ++i) J(i, i + 1) = J(i + 1, i) = b[i];
    return J;
  }
};

template <typename T>
inline JacobiMatrix to_jacobi(const Recurrence<T>& r) {
  JacobiMatrix j;
  j.complete = r.complete;
  j.a.resize(r.a.size());
  for (std::size_t i = 0; i < r.a.size(); ++i) j.a[i] = to_double(r.a[i]);
  j.b.resize(r.b2.size());
  for (std::size_t i = 0; i < r.b2.size(); ++i) {
    double v = to_double(r.b2[i]);
    if (!(v > 0.0)) throw std::runtime_error("off-diagonal b must be positive");
    j.b[i] = std::sqrt(v);
  }
  return j;
}

namespace detail {
inline bool chebyshev_pivot_ok(const Rational& x) { return x > 0; }
inline bool chebyshev_pivot_ok(double x) {
  return x > 0.0 && std::isfinite(x);
}
}  // namespace detail

// Classical Chebyshev orthogonalization: raw moments m_0..m_{2M-1} to the
// recurrence coefficients a_0..a_{M-1}, b_1^2..b_{M-1}^2.  With T = Rational
// the result is exact; the double instantiation is provided but loses
// accuracy quickly with M (see tests for the observed range).
//
// A Hankel degeneracy at size k <= M truncates the result to size k and marks
// it complete: the moment sequence is resolved by a k-point measure.
template <typename T>
inline Recurrence<T> jacobi_from_moments(const std::vector<T>& mom, int M) {
  if (M < 1) throw std::invalid_argument("matrix size must be >= 1");
  if (static_cast<int>(mom.size()) < 2 * M)
    throw std::invalid_argument("need 2M moments for a size-M matrix");
  if (!(mom[0] > 0)) throw std::invalid_argument("degenerate measure");

  Recurrence<T> rec;
  rec.a.push_back(mom[1] / mom[0]);

  // sigma rows of the Chebyshev scheme; prev2/prev/cur roll forward in k.
  std::vector<T> prev2(2 * M, T(0));
  std::vector<T> prev(mom.begin(), mom.begin() + 2 * M);
  T b2_prev = mom[0];  // plays the role of b_0^2, never emitted

  for (int k = 1; k < M; ++k) {
    std::vector<T> cur(2 * M, T(0));
    const T& ak1 = rec.a[k - 1];
    for (int l = k; l <= 2 * M - k - 1; ++l)
      cur[l] = prev[l + 1] - ak1 * prev[l] - b2_prev * prev2[l];
    if (!detail::chebyshev_pivot_ok(cur[k])) {
      // support smaller than requested size; returned matrix truncated to k
      rec.complete = true;
      return rec;
    }
    rec.b2.push_back(cur[k] / prev[k - 1]);
    rec.a.push_back(cur[k + 1] / cur[k] - prev[k] / prev[k - 1]);
    b2_prev = rec.b2.back();
    prev2 = std::move(prev);
    prev = std::move(cur);
  }
  return rec;
}

// Convenience wrapper: exact pipeline straight from a measure.  Atom measures
// are capped at their support size (the cap is exact, not a truncation).
inline Recurrence<Rational> jacobi_of_measure(const JumpMeasure& m, int M) {
  int eff = M;
  if (m.kind == JumpMeasure::Kind::atoms)
    eff = std::min(M, m.support_size());
  auto rec = jacobi_from_moments(moments(m, 2 * eff - 1), eff);
  if (m.kind == JumpMeasure::Kind::atoms && rec.size() == m.support_size())
    rec.complete = true;
  return rec;
}

// Gaussian quadrature of the (normalized) measure behind J: nodes are the
// eigenvalues, weights the squared first components of the orthonormal
// eigenvectors.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

inline Quadrature golub_welsch(const JacobiMatrix& J) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J.dense());
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral failure");
  Quadrature q;
  const int M = J.size();
  q.nodes.resize(M);
  q.weights.resize(M);
  for (int i = 0; i < M; ++i) {
    q.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    q.weights[i] = v0 * v0;
  }
  return q;
}

// Orthonormal polynomial values from the recurrence; column n of the result
// is (p_n(lambda_i))_i.
inline Eigen::MatrixXd orthonormal_poly_values(const JacobiMatrix& J,
                                               const std::vector<double>& pts) {
  const int M = J.size();
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd P(n, M);
  for (int i = 0; i < n; ++i) {
    double pm1 = 0.0, p0 = 1.0;
    P(i, 0) = p0;
    for (int k = 1; k < M; ++k) {
      double pk = ((pts[i] - J.a[k - 1]) * p0 - (k >= 2 ? J.b[k - 2] : 0.0) * pm1) / J.b[k - 1];
      P(i, k) = pk;
      pm1 = p0;
      p0 = pk;
    }
  }
  return P;
}

// Finite spectral transform: P[i][n] = p_n(lambda_i) sqrt(tau_i) maps the
// level basis e_n to quadrature coordinates.  P e_0 is the all-sqrt(tau)
// vector (the constant function 1), P^T P = I, and P^T diag(lambda) P = J.
inline Eigen::MatrixXd u3_transform(const JacobiMatrix& J) {
  Quadrature q = golub_welsch(J);
  Eigen::MatrixXd P = orthonormal_poly_values(J, q.nodes);
  for (int i = 0; i < P.rows(); ++i) P.row(i) *= std::sqrt(q.weights[i]);
  return P;
}

// Diagonal multiplier diag(1/s_i) over the atoms: isometric from
// L2(nu)-coordinates to L2(nu_tilde)-coordinates once the masses are related
// by nu_from_tilde (w/s^2 * (s f)^2 = w f^2).
inline std::vector<double> u2_multiplier(const JumpMeasure& tilde) {
  if (tilde.kind != JumpMeasure::Kind::atoms)
    throw std::invalid_argument("u2_multiplier requires an atom measure");
  std::vector<double> d;
  d.reserve(tilde.atoms.size());
  for (const auto& [s, w] : tilde.atoms) d.push_back(1.0 / to_double(s));
  return d;
}

// J = Jplus + Jzero + Jminus with Jplus e_n = b_{n+1} e_{n+1} (zero at the
// top level when the matrix is a genuine truncation), Jzero e_n = a_n e_n,
// Jminus e_n = b_n e_{n-1}, Jminus e_0 = 0.
struct JacobiSplit {
  Eigen::MatrixXd plus, zero, minus;
};

inline JacobiSplit split(const JacobiMatrix& J) {
  const int M = J.size();
  JacobiSplit s;
  s.plus = Eigen::MatrixXd::Zero(M, M);
  s.zero = Eigen::MatrixXd::Zero(M, M);
  s.minus = Eigen::MatrixXd::Zero(M, M);
  for (int n = 0; n < M; ++n) s.zero(n, n) = J.a[n];
  for (int n = 0; n + 1 < M; ++n) {
    s.plus(n + 1, n) = J.b[n];
    s.minus(n, n + 1) = J.b[n];
  }
  return s;
}

}  // namespace levyfock
