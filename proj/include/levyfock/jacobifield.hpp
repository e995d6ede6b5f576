// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <vector>

#include "levyfock/extfock.hpp"

namespace levyfock {

// ---------------------------------------------------------------------------
// Field operators on the truncated ambient extended Fock space.
//
// All three parts are scatter maps on multiset-keyed block coefficients.  The
// raising part is the combinatorial expansion of the diagonal embedding of a
// symmetric insertion: inserting a new variable into the tuple either lands
// on a fresh singleton slot or on one of the k copies of a class-k point,
// demoting that point to class k-1 in the source coordinate.  The lowering
// part carries the weighted-adjoint coefficients: an integral contraction of
// one singleton against sigma, plus b_{k-1}^2-weighted demotions k -> k-1.
// The neutral part is diagonal: multiplication by
//   sum_k a_{k-1} * (sum of phi over the class-k points of the key).
//
// Moving one point between classes is done on the per-class decomposition of
// the key; the within-class placement is immaterial because coefficients are
// class-symmetric functions.
// ---------------------------------------------------------------------------

namespace detail {

inline PointKey moved_key(std::vector<PointKey> cls, int from_cls, int to_cls, int point) {
  const int need = std::max(from_cls, to_cls);
  if (static_cast<int>(cls.size()) < need) cls.resize(need);
  auto& src = cls[from_cls - 1];
  src.erase(std::lower_bound(src.begin(), src.end(), point));
  auto& dst = cls[to_cls - 1];
  dst.insert(std::upper_bound(dst.begin(), dst.end(), point), point);
  return flatten_classes(cls);
}

inline PointKey inserted_key(std::vector<PointKey> cls, int to_cls, int point) {
  if (static_cast<int>(cls.size()) < to_cls) cls.resize(to_cls);
  auto& dst = cls[to_cls - 1];
  dst.insert(std::upper_bound(dst.begin(), dst.end(), point), point);
  return flatten_classes(cls);
}

inline PointKey erased_key(std::vector<PointKey> cls, int from_cls, int point) {
  auto& src = cls[from_cls - 1];
  src.erase(std::lower_bound(src.begin(), src.end(), point));
  return flatten_classes(cls);
}

// Distinct values of a sorted multiset with their counts.
inline std::vector<std::pair<int, int>> distinct_counts(const PointKey& seg) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < seg.size();) {
    std::size_t j = i;
    while (j < seg.size() && seg[j] == seg[i]) ++j;
    out.emplace_back(seg[i], static_cast<int>(j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

inline ExtVector j_plus(const ExtSpace& space, const TestFunction& phi, const ExtVector& v) {
  require_same_size(phi.size(), space.grid.size());
  ExtVector out;
  out.truncated = v.truncated;
  const int cap = space.class_cap();
  for (const auto& [alpha, blk] : v.blocks) {
    const int n1 = alpha.weight() + 1;
    if (n1 > space.max_degree) {
      out.truncated = true;  // weight-N input: the raised output is dropped
      continue;
    }
    const AlphaIndex up1 = shift(alpha, 1, +1);
    for (const auto& [key, val] : blk) {
      const auto cls = split_classes(key, alpha);
      // fresh singleton slot
      for (int p = 0; p < space.grid.size(); ++p) {
        if (phi[p] == 0.0) continue;
        const int c1 = alpha.count(1) > 0 ? key_count(cls[0], p) : 0;
        out.add(up1, detail::inserted_key(cls, 1, p), (c1 + 1) * phi[p] * val / n1);
      }
      // landing on one of the k copies of a class-(k-1) point promotes it
      for (int k = 2; k <= cap; ++k) {
        if (alpha.count(k - 1) == 0) continue;
        const AlphaIndex target = shift(shift(alpha, k - 1, -1), k, +1);
        if (target.max_class() > cap) continue;  // zero-weight block, exact drop
        for (const auto& [y, cnt] : detail::distinct_counts(cls[k - 2])) {
          if (phi[y] == 0.0) continue;
          const int ck = (k <= alpha.max_class()) ? key_count(cls[k - 1], y) : 0;
          out.add(target, detail::moved_key(cls, k - 1, k, y),
                  static_cast<double>(k) * (ck + 1) * phi[y] * val / n1);
        }
      }
    }
  }
  return out;
}

inline ExtVector j_zero(const ExtSpace& space, const TestFunction& phi, const ExtVector& v) {
  require_same_size(phi.size(), space.grid.size());
  ExtVector out;
  out.truncated = v.truncated;
  for (const auto& [alpha, blk] : v.blocks) {
    if (alpha.max_class() > space.jacobi.size()) {
      // beyond a complete matrix the block has zero weight; skip it
      if (space.jacobi.complete) continue;
      throw std::runtime_error("l2 truncation too small");
    }
    for (const auto& [key, val] : blk) {
      double factor = 0.0;
      int pos = 0;
      for (int c = 1; c <= alpha.max_class(); ++c) {
        double s = 0.0;
        for (int i = 0; i < alpha.count(c); ++i) s += phi[key[pos + i]];
        factor += space.jacobi.a[c - 1] * s;
        pos += alpha.count(c);
      }
      out.add(alpha, key, factor * val);
    }
  }
  return out;
}

inline ExtVector j_minus(const ExtSpace& space, const TestFunction& phi, const ExtVector& v) {
  require_same_size(phi.size(), space.grid.size());
  ExtVector out;
  out.truncated = v.truncated;
  for (const auto& [alpha, blk] : v.blocks) {
    const int n = alpha.weight();
    if (n == 0) continue;  // the lowering part annihilates the vacuum
    for (const auto& [key, val] : blk) {
      const auto cls = split_classes(key, alpha);
      // contraction of one singleton against sigma
      if (alpha.count(1) > 0) {
        const AlphaIndex down1 = shift(alpha, 1, -1);
        for (const auto& [y, cnt] : detail::distinct_counts(cls[0])) {
          if (phi[y] == 0.0) continue;
          out.add(down1, detail::erased_key(cls, 1, y),
                  n * space.grid.w[y] * phi[y] * val);
        }
      }
      // demotion k -> k-1 carries b_{k-1}^2
      for (int k = 2; k <= alpha.max_class(); ++k) {
        if (alpha.count(k) == 0) continue;
        if (k - 2 >= static_cast<int>(space.jacobi.b.size())) {
          if (space.jacobi.complete) continue;  // b vanishes beyond the support
          throw std::runtime_error("l2 truncation too small");
        }
        const double b2 = space.jacobi.b[k - 2] * space.jacobi.b[k - 2];
        const AlphaIndex target = shift(shift(alpha, k, -1), k - 1, +1);
        for (const auto& [y, cnt] : detail::distinct_counts(cls[k - 1])) {
          if (phi[y] == 0.0) continue;
          const int ckm1 = (k - 1 <= alpha.max_class()) ? key_count(cls[k - 2], y) : 0;
          out.add(target, detail::moved_key(cls, k, k - 1, y),
                  (static_cast<double>(n) / k) * b2 * (ckm1 + 1) * phi[y] * val);
        }
      }
    }
  }
  return out;
}

inline ExtVector j_full(const ExtSpace& space, const TestFunction& phi, const ExtVector& v) {
  ExtVector out = j_plus(space, phi, v);
  out = ext_axpy(1.0, j_zero(space, phi, v), out);
  out = ext_axpy(1.0, j_minus(space, phi, v), out);
  return out;
}

enum class JPart { plus, zero, minus, full };

inline ExtVector j_part(const ExtSpace& space, JPart part, const TestFunction& phi,
                        const ExtVector& v) {
  switch (part) {
    case JPart::plus: return j_plus(space, phi, v);
    case JPart::zero: return j_zero(space, phi, v);
    case JPart::minus: return j_minus(space, phi, v);
    case JPart::full: return j_full(space, phi, v);
  }
  throw std::logic_error("unreachable");
}

// J(w_1) J(w_2) ... J(w_l) applied to the vacuum, rightmost letter first.
// An optional part pattern replaces chosen letters' operators by single parts.
inline ExtVector apply_word(const ExtSpace& space, const std::vector<TestFunction>& word,
                            const std::vector<JPart>& pattern = {}) {
  if (!pattern.empty() && pattern.size() != word.size())
    throw std::invalid_argument("part pattern length must match the word");
  ExtVector v = ext_vacuum();
  for (std::size_t i = word.size(); i-- > 0;)
    v = j_part(space, pattern.empty() ? JPart::full : pattern[i], word[i], v);
  return v;
}

inline double vacuum_word_moment(const ExtSpace& space, const std::vector<TestFunction>& word) {
  return ext_vacuum_component(apply_word(space, word));
}

// ---------------------------------------------------------------------------
// Dense assembly (diagnostics only).  The ambient dimension explodes with
// m and N, so matrices are only formed under a hard guard.
// ---------------------------------------------------------------------------

struct ExtBasisIndex {
  std::vector<std::pair<AlphaIndex, PointKey>> elems;
  std::map<AlphaIndex, std::map<PointKey, int, ColexLess>, AlphaLess> lookup;
};

inline ExtBasisIndex enumerate_ambient_basis(const ExtSpace& space) {
  constexpr long kDenseGuard = 20000;
  if (space.ambient_dimension() > kDenseGuard)
    throw std::runtime_error("ambient dimension too large for dense assembly");
  ExtBasisIndex b;
  for (int n = 0; n <= space.max_degree; ++n)
    for (const auto& a : space.alphas(n))
      for (const auto& key : enumerate_block_basis(a, space.grid.size())) {
        b.lookup[a][key] = static_cast<int>(b.elems.size());
        b.elems.emplace_back(a, key);
      }
  return b;
}

// Full matrix of one operator part over the ambient basis, columns indexed by
// input basis elements.  Guarded by enumerate_ambient_basis.
inline Eigen::MatrixXd assemble_dense(const ExtSpace& space, JPart part, const TestFunction& phi,
                                      const ExtBasisIndex& basis) {
  const int dim = static_cast<int>(basis.elems.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    ExtVector e;
    e.blocks[basis.elems[col].first][basis.elems[col].second] = 1.0;
    const ExtVector out = j_part(space, part, phi, e);
    for (const auto& [alpha, blk] : out.blocks) {
      auto ait = basis.lookup.find(alpha);
      if (ait == basis.lookup.end()) continue;  // zero-weight or truncated block
      for (const auto& [key, val] : blk) {
        auto kit = ait->second.find(key);
        if (kit != ait->second.end()) M(kit->second, col) += val;
      }
    }
  }
  return M;
}

// Diagonal of the ambient weighted inner product over the same basis.
inline Eigen::VectorXd ambient_weight_diagonal(const ExtSpace& space, const ExtBasisIndex& basis) {
  Eigen::VectorXd w(basis.elems.size());
  for (std::size_t i = 0; i < basis.elems.size(); ++i) {
    const auto& [alpha, key] = basis.elems[i];
    w(i) = space.weight_of(alpha) * factorial_d(alpha.weight()) * class_orderings(key, alpha) *
           key_weight(key, space.grid);
  }
  return w;
}

}  // namespace levyfock
