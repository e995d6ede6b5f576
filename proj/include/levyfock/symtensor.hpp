// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "levyfock/basespace.hpp"

namespace levyfock {

// Sorted multiset of point indices.  A symmetric function of n variables is
// determined by its values on multisets; that is the only representation the
// tensor layer stores.
using PointKey = std::vector<int>;

// Colexicographic order: compare the largest entries first.  Keys of smaller
// size sort first so mixed-size maps stay well ordered.
struct ColexLess {
  bool operator()(const PointKey& x, const PointKey& y) const {
    if (x.size() != y.size()) return x.size() < y.size();
    for (std::size_t i = x.size(); i-- > 0;)
      if (x[i] != y[i]) return x[i] < y[i];
    return false;
  }
};

using KeyMap = std::map<PointKey, double, ColexLess>;

inline int key_count(const PointKey& key, int p) {
  return static_cast<int>(std::count(key.begin(), key.end(), p));
}

inline PointKey key_insert(const PointKey& key, int p) {
  PointKey out = key;
  out.insert(std::upper_bound(out.begin(), out.end(), p), p);
  return out;
}

// Removes one copy of p; p must be present.
inline PointKey key_erase(const PointKey& key, int p) {
  PointKey out = key;
  auto it = std::lower_bound(out.begin(), out.end(), p);
  out.erase(it);
  return out;
}

// Number of distinct orderings of the multiset: n! / prod(count!).
inline double multiset_orderings(const PointKey& key) {
  double f = 1.0;
  int run = 1;
  for (std::size_t i = 1; i <= key.size(); ++i) {
    if (i < key.size() && key[i] == key[i - 1]) {
      ++run;
    } else {
      // divide by run! incrementally; multiply by position factorial later
      for (int r = 2; r <= run; ++r) f /= r;
      run = 1;
    }
  }
  for (std::size_t i = 2; i <= key.size(); ++i) f *= static_cast<double>(i);
  return f;
}

// Product of the grid weights of the key's points (with multiplicity).
inline double key_weight(const PointKey& key, const Grid& g) {
  double w = 1.0;
  for (int p : key) w *= g.w[p];
  return w;
}

// All multisets of the given size over {0..m-1}, in colex order.
inline std::vector<PointKey> enumerate_multisets(int m, int size) {
  std::vector<PointKey> out;
  PointKey cur(size, 0);
  auto rec = [&](auto&& self, int pos, int max_pt) -> void {
    if (pos < 0) {
      out.push_back(cur);
      return;
    }
    // fill from the top position down so the output comes out in colex order
    for (int p = 0; p <= max_pt; ++p) {
      cur[pos] = p;
      self(self, pos - 1, p);
    }
  };
  if (size == 0) {
    out.push_back({});
    return out;
  }
  rec(rec, size - 1, m - 1);
  std::sort(out.begin(), out.end(), ColexLess{});
  return out;
}

// Symmetric degree-n tensor over the grid, multiset-keyed and sparse.  The
// plain tensor inner product is
//   <f, g> = sum_key orderings(key) * weight(key) * f(key) * g(key),
// which equals the integral of f*g against sigma^{tensor n}.
struct SymTensor {
  int degree = 0;
  KeyMap vals;

  SymTensor() = default;
  explicit SymTensor(int n) : degree(n) {}

  double at(const PointKey& key) const {
    auto it = vals.find(key);
    return it == vals.end() ? 0.0 : it->second;
  }
  void add(const PointKey& key, double v) {
    if (v == 0.0) return;
    vals[key] += v;
  }
};

inline double sym_inner(const SymTensor& f, const SymTensor& g, const Grid& grid) {
  if (f.degree != g.degree) throw std::invalid_argument("degree mismatch");
  double s = 0.0;
  auto it = f.vals.begin();
  auto jt = g.vals.begin();
  ColexLess less;
  while (it != f.vals.end() && jt != g.vals.end()) {
    if (less(it->first, jt->first)) {
      ++it;
    } else if (less(jt->first, it->first)) {
      ++jt;
    } else {
      s += multiset_orderings(it->first) * key_weight(it->first, grid) * it->second * jt->second;
      ++it;
      ++jt;
    }
  }
  return s;
}

// phi symtensor f: the symmetric insertion of a one-variable function,
//   (phi (x) f)(e) = (1/(n+1)) sum over slots of phi(slot) f(e minus slot).
inline SymTensor sym_insert(const TestFunction& phi, const SymTensor& f) {
  SymTensor out(f.degree + 1);
  const int n1 = f.degree + 1;
  for (const auto& [key, v] : f.vals) {
    for (int p = 0; p < phi.size(); ++p) {
      if (phi[p] == 0.0) continue;
      PointKey ext = key_insert(key, p);
      out.add(ext, (key_count(key, p) + 1) * phi[p] * v / n1);
    }
  }
  return out;
}

// phi_1 (x) ... (x) phi_n as a symmetric tensor.
inline SymTensor sym_product(const std::vector<TestFunction>& fs) {
  SymTensor t(0);
  t.vals[{}] = 1.0;
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) t = sym_insert(*it, t);
  return t;
}

}  // namespace levyfock
