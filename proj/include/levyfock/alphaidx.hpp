// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "levyfock/orthopoly.hpp"

namespace levyfock {

// Multiplicity encoding of an integer partition: counts[k-1] variables of
// multiplicity k.  Trailing zeros are trimmed, so equality is structural.
struct AlphaIndex {
  std::vector<int> counts;

  AlphaIndex() = default;
  explicit AlphaIndex(std::vector<int> c) : counts(std::move(c)) { trim(); }

  void trim() {
    while (!counts.empty() && counts.back() == 0) counts.pop_back();
  }

  int count(int k) const {  // k is the multiplicity class, 1-based
    return (k >= 1 && k <= static_cast<int>(counts.size())) ? counts[k - 1] : 0;
  }
  int max_class() const { return static_cast<int>(counts.size()); }

  // n(alpha) = 1*a_1 + 2*a_2 + ...
  int weight() const {
    int n = 0;
    for (int k = 1; k <= max_class(); ++k) n += k * counts[k - 1];
    return n;
  }
  // |alpha| = a_1 + a_2 + ...
  int size() const {
    int s = 0;
    for (int c : counts) s += c;
    return s;
  }

  bool operator==(const AlphaIndex& o) const { return counts == o.counts; }
  bool operator!=(const AlphaIndex& o) const { return !(*this == o); }
};

// Canonical order: by weight, then lexicographically decreasing counts (the
// order enumerate() produces within one weight).
struct AlphaLess {
  bool operator()(const AlphaIndex& x, const AlphaIndex& y) const {
    const int wx = x.weight(), wy = y.weight();
    if (wx != wy) return wx < wy;
    return std::lexicographical_compare(y.counts.begin(), y.counts.end(),
                                        x.counts.begin(), x.counts.end());
  }
};

inline AlphaIndex shift(const AlphaIndex& a, int k, int delta) {
  if (k < 1) throw std::invalid_argument("invalid shift");
  if (delta != 1 && delta != -1) throw std::invalid_argument("invalid shift");
  if (delta == -1 && a.count(k) < 1) throw std::invalid_argument("invalid shift");
  std::vector<int> c = a.counts;
  if (k > static_cast<int>(c.size())) c.resize(k, 0);
  c[k - 1] += delta;
  return AlphaIndex(std::move(c));
}

// All alpha with weight n, i.e. the partitions of n in multiplicity encoding;
// optionally restricted to classes <= max_class.
inline std::vector<AlphaIndex> enumerate_alphas(int n, int max_class = -1) {
  if (n < 0) throw std::invalid_argument("weight must be nonnegative");
  if (max_class < 0 || max_class > n) max_class = n;
  std::vector<AlphaIndex> out;
  std::vector<int> counts(std::max(max_class, 0), 0);
  // Recurse over classes from the largest down, spending the remaining weight.
  auto rec = [&](auto&& self, int k, int rem) -> void {
    if (k == 0) {
      if (rem == 0) out.emplace_back(counts);
      return;
    }
    if (k == 1) {
      counts[0] = rem;
      out.emplace_back(counts);
      counts[0] = 0;
      return;
    }
    for (int c = 0; c * k <= rem; ++c) {
      counts[k - 1] = c;
      self(self, k - 1, rem - c * k);
    }
    counts[k - 1] = 0;
  };
  if (n == 0) {
    out.emplace_back(std::vector<int>{});
    return out;
  }
  rec(rec, max_class, n);
  std::sort(out.begin(), out.end(), [](const AlphaIndex& x, const AlphaIndex& y) {
    return std::lexicographical_compare(y.counts.begin(), y.counts.end(),
                                        x.counts.begin(), x.counts.end());
  });
  return out;
}

inline std::int64_t partition_count(int n) {
  // Euler recurrence with pentagonal numbers.
  std::vector<std::int64_t> p(n + 1, 0);
  p[0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int k = 1;; ++k) {
      const int g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
      if (g1 > i && g2 > i) break;
      const std::int64_t sgn = (k % 2 == 1) ? 1 : -1;
      if (g1 <= i) p[i] += sgn * p[i - g1];
      if (g2 <= i) p[i] += sgn * p[i - g2];
    }
  }
  return p[n];
}

inline double factorial_d(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// The weight K_alpha of the alpha block,
//   K = n(alpha)! / (a_1! a_2! ...) * prod_{k>=2} (b_1...b_{k-1} / k!)^{2 a_k}.
//
// Classes beyond the resolved support of a complete matrix carry weight 0
// (their b factor vanishes); asking for classes beyond a genuinely truncated
// matrix is an error.
inline double k_alpha(const AlphaIndex& alpha, const JacobiMatrix& J) {
  const int top = alpha.max_class();
  if (top > J.size() && !J.complete)
    throw std::runtime_error("l2 truncation too small for K_alpha");
  if (top > J.size()) return 0.0;

  double k = factorial_d(alpha.weight());
  for (int c : alpha.counts) k /= factorial_d(c);
  double prod_b2 = 1.0;  // (b_1 ... b_{k-1})^2, rolled forward in k
  for (int cls = 2; cls <= top; ++cls) {
    prod_b2 *= J.b[cls - 2] * J.b[cls - 2];
    const int ac = alpha.count(cls);
    if (ac == 0) continue;
    const double base = prod_b2 / (factorial_d(cls) * factorial_d(cls));
    for (int i = 0; i < ac; ++i) k *= base;
  }
  return k;
}

}  // namespace levyfock
