// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "levyfock/alphaidx.hpp"
#include "levyfock/basespace.hpp"
#include "levyfock/orthopoly.hpp"
#include "levyfock/symtensor.hpp"

namespace levyfock {

// ---------------------------------------------------------------------------
// Block keys
//
// A coordinate block of index alpha stores a function on X^{|alpha|} that is
// symmetric within each multiplicity class.  Keys are the concatenation of
// one sorted multiset per class, classes ascending:
//
//   [ class-1 points (alpha_1 of them) | class-2 points (alpha_2) | ... ]
//
// The plain sigma^{(x)|alpha|} inner product of two such functions is
//   sum_key  prod_class orderings(segment) * weight(key) * u(key) * v(key).
// ---------------------------------------------------------------------------

// Per-class segments of a block key.  classes[c-1] is the class-c multiset.
inline std::vector<PointKey> split_classes(const PointKey& key, const AlphaIndex& a) {
  std::vector<PointKey> cls(a.max_class());
  int pos = 0;
  for (int c = 1; c <= a.max_class(); ++c) {
    const int len = a.count(c);
    cls[c - 1].assign(key.begin() + pos, key.begin() + pos + len);
    pos += len;
  }
  return cls;
}

inline PointKey flatten_classes(const std::vector<PointKey>& cls) {
  PointKey key;
  for (const auto& seg : cls) key.insert(key.end(), seg.begin(), seg.end());
  return key;
}

inline double class_orderings(const PointKey& key, const AlphaIndex& a) {
  double f = 1.0;
  int pos = 0;
  for (int c = 1; c <= a.max_class(); ++c) {
    const int len = a.count(c);
    PointKey seg(key.begin() + pos, key.begin() + pos + len);
    f *= multiset_orderings(seg);
    pos += len;
  }
  return f;
}

// Block basis in canonical order: colex within each class, classes ascending.
inline std::vector<PointKey> enumerate_block_basis(const AlphaIndex& a, int m) {
  std::vector<PointKey> keys = {{}};
  for (int c = 1; c <= a.max_class(); ++c) {
    const auto seg = enumerate_multisets(m, a.count(c));
    std::vector<PointKey> next;
    next.reserve(keys.size() * seg.size());
    for (const auto& s : seg)
      for (const auto& k : keys) {
        PointKey nk = k;
        nk.insert(nk.end(), s.begin(), s.end());
        next.push_back(std::move(nk));
      }
    keys = std::move(next);
  }
  return keys;
}

inline long block_dimension(const AlphaIndex& a, int m) {
  auto binom = [](long n, long k) {
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  long d = 1;
  for (int c = 1; c <= a.max_class(); ++c) d *= binom(m + a.count(c) - 1, a.count(c));
  return d;
}

// The merged variable multiset: every class-c point repeated c times.
inline PointKey merge_classes(const PointKey& key, const AlphaIndex& a) {
  PointKey out;
  out.reserve(a.weight());
  int pos = 0;
  for (int c = 1; c <= a.max_class(); ++c) {
    for (int i = 0; i < a.count(c); ++i) {
      for (int r = 0; r < c; ++r) out.push_back(key[pos + i]);
    }
    pos += a.count(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Truncated ambient extended Fock space
// ---------------------------------------------------------------------------

// Element of the truncated ambient space: one coefficient map per alpha with
// n(alpha) <= max_degree.  Coefficients are function values, not pre-weighted;
// the grading and K_alpha weights live in the inner product.
struct ExtVector {
  std::map<AlphaIndex, KeyMap, AlphaLess> blocks;
  bool truncated = false;  // some weight-(N+1) output was dropped

  void add(const AlphaIndex& a, const PointKey& key, double v) {
    if (v == 0.0) return;
    blocks[a][key] += v;
  }
  double at(const AlphaIndex& a, const PointKey& key) const {
    auto it = blocks.find(a);
    if (it == blocks.end()) return 0.0;
    auto jt = it->second.find(key);
    return jt == it->second.end() ? 0.0 : jt->second;
  }
};

struct ExtSpace {
  Grid grid;
  JacobiMatrix jacobi;
  int max_degree = 0;

  ExtSpace(Grid g, JacobiMatrix j, int N) : grid(std::move(g)), jacobi(std::move(j)), max_degree(N) {
    if (N < 0) throw std::invalid_argument("max_degree must be >= 0");
    if (!jacobi.complete && jacobi.size() < N)
      throw std::runtime_error("l2 truncation too small for the requested degree");
  }

  // Largest multiplicity class carrying positive K_alpha.
  int class_cap() const { return jacobi.complete ? jacobi.size() : max_degree; }

  std::vector<AlphaIndex> alphas(int n) const {
    return enumerate_alphas(n, std::min(n, class_cap()));
  }

  double weight_of(const AlphaIndex& a) const { return k_alpha(a, jacobi); }

  long ambient_dimension() const {
    long d = 0;
    for (int n = 0; n <= max_degree; ++n)
      for (const auto& a : alphas(n)) d += block_dimension(a, grid.size());
    return d;
  }
};

inline ExtVector ext_vacuum() {
  ExtVector v;
  v.blocks[AlphaIndex{}][{}] = 1.0;
  return v;
}

// <u, v> = sum_alpha K_alpha n(alpha)! <u_alpha, v_alpha>_{L2_alpha}.
// Truncation flags do not invalidate the stored coefficients; callers that
// care about dropped components must inspect the flags themselves.
inline double inner_ext(const ExtSpace& space, const ExtVector& u, const ExtVector& v) {
  double total = 0.0;
  auto it = u.blocks.begin();
  auto jt = v.blocks.begin();
  AlphaLess less;
  while (it != u.blocks.end() && jt != v.blocks.end()) {
    if (less(it->first, jt->first)) {
      ++it;
    } else if (less(jt->first, it->first)) {
      ++jt;
    } else {
      const AlphaIndex& a = it->first;
      const double ka = space.weight_of(a);
      const double grading = factorial_d(a.weight());
      double s = 0.0;
      auto ik = it->second.begin();
      auto jk = jt->second.begin();
      ColexLess kless;
      while (ik != it->second.end() && jk != jt->second.end()) {
        if (kless(ik->first, jk->first)) {
          ++ik;
        } else if (kless(jk->first, ik->first)) {
          ++jk;
        } else {
          s += class_orderings(ik->first, a) * key_weight(ik->first, space.grid) * ik->second *
               jk->second;
          ++ik;
          ++jk;
        }
      }
      total += ka * grading * s;
      ++it;
      ++jt;
    }
  }
  return total;
}

inline double ext_norm(const ExtSpace& space, const ExtVector& v) {
  return std::sqrt(std::max(0.0, inner_ext(space, v, v)));
}

inline ExtVector ext_axpy(double a, const ExtVector& x, const ExtVector& y) {
  ExtVector out = y;
  out.truncated = x.truncated || y.truncated;
  for (const auto& [alpha, blk] : x.blocks)
    for (const auto& [key, val] : blk) out.add(alpha, key, a * val);
  return out;
}

inline ExtVector ext_scale(double a, const ExtVector& x) {
  ExtVector out = x;
  for (auto& [alpha, blk] : out.blocks)
    for (auto& [key, val] : blk) val *= a;
  return out;
}

// The weight-n part of v.
inline ExtVector ext_component(const ExtVector& v, int n) {
  ExtVector out;
  out.truncated = v.truncated;
  for (const auto& [alpha, blk] : v.blocks)
    if (alpha.weight() == n) out.blocks[alpha] = blk;
  return out;
}

inline double ext_vacuum_component(const ExtVector& v) {
  return v.at(AlphaIndex{}, {});
}

// ---------------------------------------------------------------------------
// D_alpha, S_alpha, U^(n)
// ---------------------------------------------------------------------------

// Diagonal embedding: the value at a block key is the tensor evaluated at the
// variable tuple with every class-c point repeated c times.  The output is
// block-symmetric by construction.
inline KeyMap d_alpha(const SymTensor& f, const AlphaIndex& a, int m) {
  if (f.degree != a.weight()) throw std::invalid_argument("degree/weight error");
  KeyMap out;
  for (const auto& key : enumerate_block_basis(a, m)) {
    const double v = f.at(merge_classes(key, a));
    if (v != 0.0) out[key] = v;
  }
  return out;
}

// Dense function on X^{|alpha|}; values indexed by the tuple (x_1..x_k) with
// x_1 the fastest-varying digit.
struct DenseBlockFn {
  AlphaIndex alpha;
  int m = 0;
  std::vector<double> vals;

  int arity() const { return alpha.size(); }
  static long total_size(const AlphaIndex& a, int m) {
    long t = 1;
    for (int i = 0; i < a.size(); ++i) t *= m;
    return t;
  }
};

inline long tuple_index(const std::vector<int>& tuple, int m) {
  long idx = 0;
  for (std::size_t i = tuple.size(); i-- > 0;) idx = idx * m + tuple[i];
  return idx;
}

namespace detail {
inline void permutations_of(int n, std::vector<std::vector<int>>& out) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
}
}  // namespace detail

// Orthogonal projection onto the block-symmetric functions: averages over the
// within-class permutations of the variables.
inline DenseBlockFn s_alpha(const DenseBlockFn& g) {
  const AlphaIndex& a = g.alpha;
  const int arity = a.size();
  const int m = g.m;

  // per-class permutation tables and position offsets
  std::vector<std::vector<std::vector<int>>> perms;
  std::vector<int> offset;
  int pos = 0;
  for (int c = 1; c <= a.max_class(); ++c) {
    std::vector<std::vector<int>> p;
    detail::permutations_of(a.count(c), p);
    perms.push_back(std::move(p));
    offset.push_back(pos);
    pos += a.count(c);
  }

  DenseBlockFn out;
  out.alpha = a;
  out.m = m;
  out.vals.assign(g.vals.size(), 0.0);

  std::vector<int> tuple(arity, 0), image(arity, 0);
  const long total = static_cast<long>(g.vals.size());
  for (long idx = 0; idx < total; ++idx) {
    // decode index -> tuple
    long t = idx;
    for (int i = 0; i < arity; ++i) {
      tuple[i] = static_cast<int>(t % m);
      t /= m;
    }
    double acc = 0.0;
    long count = 0;
    // iterate the product of per-class permutations
    std::vector<std::size_t> sel(perms.size(), 0);
    while (true) {
      for (std::size_t ci = 0; ci < perms.size(); ++ci) {
        const auto& p = perms[ci][sel[ci]];
        for (std::size_t i = 0; i < p.size(); ++i)
          image[offset[ci] + i] = tuple[offset[ci] + p[i]];
      }
      acc += g.vals[tuple_index(image, m)];
      ++count;
      std::size_t ci = 0;
      while (ci < sel.size() && ++sel[ci] == perms[ci].size()) sel[ci++] = 0;
      if (ci == sel.size()) break;
    }
    out.vals[idx] = acc / static_cast<double>(count);
  }
  return out;
}

// Reads a block-symmetric dense function into multiset-keyed form.
inline KeyMap to_block(const DenseBlockFn& g) {
  KeyMap out;
  for (const auto& key : enumerate_block_basis(g.alpha, g.m)) {
    std::vector<int> tuple(key.begin(), key.end());
    const double v = g.vals[tuple_index(tuple, g.m)];
    if (v != 0.0) out[key] = v;
  }
  return out;
}

inline double dense_inner(const DenseBlockFn& g, const DenseBlockFn& h, const Grid& grid) {
  if (g.alpha != h.alpha) throw std::invalid_argument("block mismatch");
  const int arity = g.alpha.size();
  const int m = g.m;
  double s = 0.0;
  std::vector<int> tuple(arity, 0);
  for (long idx = 0; idx < static_cast<long>(g.vals.size()); ++idx) {
    long t = idx;
    double w = 1.0;
    for (int i = 0; i < arity; ++i) {
      const int x = static_cast<int>(t % m);
      t /= m;
      w *= grid.w[x];
    }
    s += w * g.vals[idx] * h.vals[idx];
  }
  return s;
}

// U^(n): the coordinates of a symmetric tensor are its diagonal embeddings,
// one per alpha of weight n.  Blocks of zero K_alpha weight do not exist in
// the space and are skipped.
inline ExtVector u_n(const ExtSpace& space, const SymTensor& f) {
  if (f.degree > space.max_degree) throw std::invalid_argument("degree above truncation");
  ExtVector out;
  if (f.degree == 0) {
    out.blocks[AlphaIndex{}][{}] = f.at({});
    return out;
  }
  for (const auto& a : space.alphas(f.degree)) {
    KeyMap blk = d_alpha(f, a, space.grid.size());
    if (!blk.empty()) out.blocks[a] = std::move(blk);
  }
  return out;
}

}  // namespace levyfock
