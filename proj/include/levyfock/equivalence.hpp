// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "levyfock/fockrep.hpp"
#include "levyfock/jacobifield.hpp"
#include "levyfock/measure.hpp"

namespace levyfock {

// ---------------------------------------------------------------------------
// Set-partition cumulant oracle
//
// Mixed vacuum moments of the centered field obey the moment-cumulant
// formula: a sum over set partitions of the word positions in which a block B
// contributes the joint cumulant
//     m_{|B|-2}(nu_tilde) * integral of prod_{i in B} phi_i d sigma,
// and singleton blocks contribute 0 (the process is centered).  This route
// never touches the operator machinery, which is the point.
// ---------------------------------------------------------------------------

inline void set_partitions_no_singletons_rec(int next, int n,
                                             std::vector<std::vector<int>>& blocks,
                                             std::vector<std::vector<std::vector<int>>>& out) {
  if (next == n) {
    for (const auto& b : blocks)
      if (b.size() < 2) return;
    out.push_back(blocks);
    return;
  }
  const std::size_t nb = blocks.size();  // deeper calls grow the vector
  for (std::size_t i = 0; i < nb; ++i) {
    blocks[i].push_back(next);
    set_partitions_no_singletons_rec(next + 1, n, blocks, out);
    blocks[i].pop_back();
  }
  blocks.push_back({next});
  set_partitions_no_singletons_rec(next + 1, n, blocks, out);
  blocks.pop_back();
}

inline std::vector<std::vector<std::vector<int>>> set_partitions_no_singletons(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> blocks;
  if (n == 0) {
    out.push_back({});
    return out;
  }
  set_partitions_no_singletons_rec(0, n, blocks, out);
  return out;
}

inline double oracle_moment(const std::vector<double>& tilde_moments, const Grid& grid,
                            const std::vector<TestFunction>& word) {
  const int L = static_cast<int>(word.size());
  if (L == 0) return 1.0;
  if (static_cast<int>(tilde_moments.size()) < std::max(0, L - 1))
    throw std::invalid_argument("need moments of nu_tilde up to order L-2");
  double total = 0.0;
  for (const auto& partition : set_partitions_no_singletons(L)) {
    double prod = 1.0;
    for (const auto& block : partition) {
      TestFunction f = word[block[0]];
      for (std::size_t i = 1; i < block.size(); ++i)
        f = pointwise_product(f, word[block[i]]);
      prod *= tilde_moments[block.size() - 2] * integrate(f, grid);
    }
    total += prod;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Word tables: every vacuum word moment up to a length, sharing prefixes.
// Words are letter-index sequences; word (i_1, ..., i_l) means
// J(phi_{i_1}) ... J(phi_{i_l}) applied to the vacuum.
// ---------------------------------------------------------------------------

using Word = std::vector<int>;

struct WordValue {
  double value = 0.0;
  bool flagged = false;
};

inline void word_table_j_rec(const ExtSpace& space, const std::vector<TestFunction>& letters,
                             int maxlen, const Word& suffix, const ExtVector& v,
                             std::map<Word, WordValue>& out) {
  out[suffix] = {ext_vacuum_component(v), v.truncated};
  if (static_cast<int>(suffix.size()) == maxlen) return;
  for (int t = 0; t < static_cast<int>(letters.size()); ++t) {
    Word w;
    w.reserve(suffix.size() + 1);
    w.push_back(t);
    w.insert(w.end(), suffix.begin(), suffix.end());
    word_table_j_rec(space, letters, maxlen, w, j_full(space, letters[t], v), out);
  }
}

inline std::map<Word, WordValue> word_table_j(const ExtSpace& space,
                                              const std::vector<TestFunction>& letters,
                                              int maxlen) {
  std::map<Word, WordValue> out;
  word_table_j_rec(space, letters, maxlen, {}, ext_vacuum(), out);
  return out;
}

inline void word_table_a_rec(const FockSpace& space, const std::vector<AFieldOps>& ops,
                             int maxlen, const Word& suffix, const FockVector& v,
                             std::map<Word, WordValue>& out) {
  out[suffix] = {fock_vacuum_component(v), v.truncated};
  if (static_cast<int>(suffix.size()) == maxlen) return;
  for (int t = 0; t < static_cast<int>(ops.size()); ++t) {
    Word w;
    w.reserve(suffix.size() + 1);
    w.push_back(t);
    w.insert(w.end(), suffix.begin(), suffix.end());
    word_table_a_rec(space, ops, maxlen, w, a_field(space, Part::full, ops[t], v), out);
  }
}

inline std::map<Word, WordValue> word_table_a(const FockSpace& space,
                                              const std::vector<TestFunction>& letters,
                                              int maxlen) {
  std::vector<AFieldOps> ops;
  ops.reserve(letters.size());
  for (const auto& phi : letters) ops.push_back(make_a_field_ops(space, phi));
  std::map<Word, WordValue> out;
  word_table_a_rec(space, ops, maxlen, {}, fock_vacuum(space), out);
  return out;
}

// Relative deviation with a unit scale floor, so near-zero values compare
// absolutely and nothing divides by zero.
inline double relative_deviation(double x, double y) {
  const double scale = std::max({std::fabs(x), std::fabs(y), 1.0});
  return std::fabs(x - y) / scale;
}

struct WordMomentReport {
  Word word;
  double value_j = 0.0;
  double value_a = 0.0;
  double value_oracle = 0.0;
  double dev_ja = 0.0;
  double dev_jo = 0.0;
  double dev_ao = 0.0;
  bool valid = true;  // false when a truncation flag invalidated the entry
};

inline std::vector<WordMomentReport> compare_moments(const ExtSpace& ext, const FockSpace& fock,
                                                     const JumpMeasure& tilde,
                                                     const std::vector<TestFunction>& letters,
                                                     int maxlen) {
  const auto tj = word_table_j(ext, letters, maxlen);
  const auto ta = word_table_a(fock, letters, maxlen);
  const auto mom = moments_d(tilde, std::max(0, maxlen - 2));
  std::vector<WordMomentReport> out;
  for (const auto& [word, jv] : tj) {
    if (word.empty()) continue;
    WordMomentReport r;
    r.word = word;
    r.value_j = jv.value;
    const auto& av = ta.at(word);
    r.value_a = av.value;
    std::vector<TestFunction> fns;
    for (int i : word) fns.push_back(letters[i]);
    r.value_oracle = oracle_moment(mom, ext.grid, fns);
    r.dev_ja = relative_deviation(r.value_j, r.value_a);
    r.dev_jo = relative_deviation(r.value_j, r.value_oracle);
    r.dev_ao = relative_deviation(r.value_a, r.value_oracle);
    r.valid = !jv.flagged && !av.flagged;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Intertwiner: cyclic (vacuum-word) construction
//
// The word vectors on both sides share their Gram matrix whenever the vacuum
// moments agree; the map matching word vectors therefore extends to an
// isometry of the cyclic compressions.  It is realized through symmetric
// orthogonalization of the field-side Gram matrix so that the construction
// does not depend on the ordering of the basis words.
// ---------------------------------------------------------------------------

struct Intertwiner {
  std::vector<Word> words;        // basis words, length <= K
  std::vector<ExtVector> jvecs;   // scaled word vectors, extended side
  std::vector<FockVector> avecs;  // same scaling, Fock side
  std::vector<double> scales;     // original extended-side norms
  Eigen::MatrixXd gram_j_raw, gram_a_raw;  // unscaled Grams
  Eigen::MatrixXd coord;    // V_r Lambda_r^{-1/2} of the scaled extended-side Gram
  Eigen::MatrixXd coord_a;  // same for the Fock-side Gram (cyclic projector there)
  int rank = 0;
  double gram_rel_deviation = 0.0;  // ||G_J - G_A||_F / ||G_J||_F, unscaled
};

inline std::vector<Word> words_up_to(int letters, int maxlen) {
  std::vector<Word> out = {{}};
  std::size_t begin = 0;
  for (int l = 1; l <= maxlen; ++l) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int t = 0; t < letters; ++t) {
        Word w = out[i];
        w.push_back(t);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

inline Intertwiner build_intertwiner(const ExtSpace& ext, const FockSpace& fock,
                                     const std::vector<TestFunction>& letters, int maxlen,
                                     double rank_tol = 1e-10, double gram_tol = 1e-8) {
  Intertwiner I;
  I.words = words_up_to(static_cast<int>(letters.size()), maxlen);
  const int W = static_cast<int>(I.words.size());

  for (const auto& w : I.words) {
    std::vector<TestFunction> fns;
    for (int i : w) fns.push_back(letters[i]);
    ExtVector jv = apply_word(ext, fns);
    FockVector av = apply_word_a(fock, fns);
    if (jv.truncated || av.truncated)
      throw std::runtime_error("truncation flag raised while building the cyclic basis");
    I.jvecs.push_back(std::move(jv));
    I.avecs.push_back(std::move(av));
  }

  I.gram_j_raw.resize(W, W);
  I.gram_a_raw.resize(W, W);
  for (int i = 0; i < W; ++i)
    for (int j = i; j < W; ++j) {
      I.gram_j_raw(i, j) = I.gram_j_raw(j, i) = inner_ext(ext, I.jvecs[i], I.jvecs[j]);
      I.gram_a_raw(i, j) = I.gram_a_raw(j, i) = fock_inner(fock, I.avecs[i], I.avecs[j]);
    }
  I.gram_rel_deviation =
      (I.gram_j_raw - I.gram_a_raw).norm() / std::max(I.gram_j_raw.norm(), 1e-300);
  if (I.gram_rel_deviation > gram_tol) throw std::runtime_error("equivalence violation");

  // Scale each word vector by its extended-side norm (both sides by the same
  // factor, so the map is unchanged but the Gram is well conditioned).
  I.scales.resize(W);
  Eigen::MatrixXd G(W, W);
  for (int i = 0; i < W; ++i) I.scales[i] = std::sqrt(std::max(I.gram_j_raw(i, i), 1e-300));
  for (int i = 0; i < W; ++i) {
    I.jvecs[i] = ext_scale(1.0 / I.scales[i], I.jvecs[i]);
    I.avecs[i] = fock_scale(1.0 / I.scales[i], I.avecs[i]);
    for (int j = 0; j < W; ++j) G(i, j) = I.gram_j_raw(i, j) / (I.scales[i] * I.scales[j]);
  }

  auto orthonormalize = [&](const Eigen::MatrixXd& gram, Eigen::MatrixXd& coord) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectral failure");
    const double cutoff = rank_tol * es.eigenvalues().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < W; ++i)
      if (es.eigenvalues()(i) > cutoff) keep.push_back(i);
    coord.resize(W, static_cast<int>(keep.size()));
    for (std::size_t a = 0; a < keep.size(); ++a)
      coord.col(a) = es.eigenvectors().col(keep[a]) / std::sqrt(es.eigenvalues()(keep[a]));
    return static_cast<int>(keep.size());
  };

  I.rank = orthonormalize(G, I.coord);
  if (I.rank == 0) throw std::runtime_error("cyclic basis degenerate, enlarge test-function set");
  Eigen::MatrixXd Ga(W, W);
  for (int i = 0; i < W; ++i)
    for (int j = 0; j < W; ++j) Ga(i, j) = I.gram_a_raw(i, j) / (I.scales[i] * I.scales[j]);
  orthonormalize(Ga, I.coord_a);
  return I;
}

// I x, for x in (or near) the cyclic span: expand in the orthonormalized word
// basis and reassemble on the Fock side.  Components orthogonal to the span
// are dropped.
inline FockVector apply_intertwiner(const Intertwiner& I, const ExtSpace& ext,
                                    const FockSpace& fock, const ExtVector& x) {
  const int W = static_cast<int>(I.words.size());
  Eigen::VectorXd g(W);
  for (int i = 0; i < W; ++i) g(i) = inner_ext(ext, I.jvecs[i], x);
  // coefficients in the scaled word basis: C C^T g
  const Eigen::VectorXd coef = I.coord * (I.coord.transpose() * g);
  FockVector out(fock.max_degree);
  for (int i = 0; i < W; ++i)
    if (coef(i) != 0.0) out = fock_axpy(coef(i), I.avecs[i], out);
  return out;
}

// Orthogonal projection onto the Fock-side cyclic span.
inline FockVector project_cyclic_a(const Intertwiner& I, const FockSpace& fock,
                                   const FockVector& x) {
  const int W = static_cast<int>(I.words.size());
  Eigen::VectorXd g(W);
  for (int i = 0; i < W; ++i) g(i) = fock_inner(fock, I.avecs[i], x);
  const Eigen::VectorXd coef = I.coord_a * (I.coord_a.transpose() * g);
  FockVector out(fock.max_degree);
  for (int i = 0; i < W; ++i)
    if (coef(i) != 0.0) out = fock_axpy(coef(i), I.avecs[i], out);
  return out;
}

struct IntertwineResidual {
  double compressed = 0.0;   // || I J^part v - Q A^part I v || / ||v||
  double unprojected = 0.0;  // || I J^part v -   A^part I v || / ||v||
  double leak = 0.0;         // || (1-Q) A^part I v || / ||v||
};

// max over basis words of length <= input_len of the intertwining residual
//   I J^part(phi) v  vs  A^part(phi) I v.
//
// The grading parts do not preserve the cyclic span at finite truncation (the
// full operator does), so the two sides are compared after compressing the
// Fock side back onto the span; the discarded component is reported as leak.
// For part = full the unprojected residual is itself small.
inline IntertwineResidual intertwine_residual_detail(const Intertwiner& I, const ExtSpace& ext,
                                                     const FockSpace& fock, Part part,
                                                     const TestFunction& phi, int input_len) {
  const AFieldOps ops = make_a_field_ops(fock, phi);
  IntertwineResidual res;
  for (std::size_t i = 0; i < I.words.size(); ++i) {
    if (static_cast<int>(I.words[i].size()) > input_len) continue;
    const ExtVector& v = I.jvecs[i];
    ExtVector jx;
    switch (part) {
      case Part::plus: jx = j_plus(ext, phi, v); break;
      case Part::zero: jx = j_zero(ext, phi, v); break;
      case Part::minus: jx = j_minus(ext, phi, v); break;
      case Part::full: jx = j_full(ext, phi, v); break;
    }
    const FockVector lhs = apply_intertwiner(I, ext, fock, jx);
    const FockVector iv = apply_intertwiner(I, ext, fock, v);
    const FockVector rhs_raw = a_field(fock, part, ops, iv);
    const FockVector rhs = project_cyclic_a(I, fock, rhs_raw);
    const double nv = std::max(ext_norm(ext, v), 1e-300);
    res.compressed = std::max(res.compressed,
                              fock_norm(fock, fock_axpy(-1.0, rhs, lhs)) / nv);
    res.unprojected = std::max(res.unprojected,
                               fock_norm(fock, fock_axpy(-1.0, rhs_raw, lhs)) / nv);
    res.leak = std::max(res.leak, fock_norm(fock, fock_axpy(-1.0, rhs, rhs_raw)) / nv);
  }
  return res;
}

inline double intertwine_residual(const Intertwiner& I, const ExtSpace& ext,
                                  const FockSpace& fock, Part part, const TestFunction& phi,
                                  int input_len) {
  return intertwine_residual_detail(I, ext, fock, part, phi, input_len).compressed;
}

// Diagnostic for the grading mismatch of the two sides: the image of a pure
// weight-n vector spreads over several Fock degrees.  Returns, per degree n,
// the squared-norm fraction of the image lying off degree n.
inline std::vector<double> image_grading_spread(const Intertwiner& I, const ExtSpace& ext,
                                                const FockSpace& fock) {
  std::vector<double> spread;
  for (std::size_t i = 0; i < I.words.size(); ++i) {
    const int n = static_cast<int>(I.words[i].size());
    if (n != static_cast<int>(spread.size())) continue;  // first word of each length
    ExtVector comp = ext_component(I.jvecs[i], n);
    const FockVector img = apply_intertwiner(I, ext, fock, comp);
    const double tot = fock_inner(fock, img, img);
    double off = 0.0;
    for (int d = 0; d <= img.max_degree(); ++d) {
      if (d == n) continue;
      FockVector part_only(fock.max_degree);
      part_only.deg[d] = img.deg[d];
      off += fock_inner(fock, part_only, part_only);
    }
    spread.push_back(tot > 0 ? off / tot : 0.0);
  }
  return spread;
}

// ---------------------------------------------------------------------------
// Monte Carlo: compensated compound-Poisson realization
//
// For every (atom s_i of nu with mass u_i, grid point x_j with weight w_j)
// draw a Poisson(u_i w_j) jump count c_ij and form
//   <omega, phi> = sum_ij c_ij s_i phi(x_j) - sum_ij u_i w_j s_i phi(x_j).
// Chunked counter-seeded streams and a fixed-order reduction make the result
// bit-identical for any thread count.
// ---------------------------------------------------------------------------

namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  return mix64(state += 0x9E3779B97F4A7C15ull);
}

// Chunk streams advance their state by the same golden-ratio stride, so the
// starting states must be pseudorandom: structured starts (e.g. seed + c)
// make whole chunks replay each other's uniforms with a small offset.
inline std::uint64_t chunk_state(std::uint64_t seed, std::uint64_t chunk) {
  return mix64(mix64(seed ^ 0x6A09E667F3BCC909ull) + 0x9E3779B97F4A7C15ull * (chunk + 1));
}

inline double uniform01(std::uint64_t& state) {
  return (splitmix64(state) >> 11) * 0x1.0p-53;
}

// Poisson by CDF inversion; the desk-scale intensities are all small.
inline int poisson(std::uint64_t& state, double lambda, double exp_neg_lambda) {
  const double u = uniform01(state);
  double p = exp_neg_lambda, cdf = p;
  int k = 0;
  while (u > cdf && k < 1024) {
    ++k;
    p *= lambda / k;
    cdf += p;
  }
  return k;
}

}  // namespace rng

struct McMomentRow {
  Word word;
  double empirical = 0.0;
  double std_error = 0.0;
  double oracle = 0.0;
};

inline int max_word_len(const std::vector<Word>& words) {
  int l = 0;
  for (const auto& w : words) l = std::max(l, static_cast<int>(w.size()));
  return l;
}

struct McResult {
  std::uint64_t samples = 0;
  std::vector<McMomentRow> rows;
};

inline McResult mc_sample(const JumpMeasure& nu, const Grid& grid,
                          const std::vector<TestFunction>& letters,
                          const std::vector<Word>& words, std::uint64_t n_samples,
                          std::uint64_t seed, int threads = 1,
                          std::vector<std::vector<double>>* raw_functionals = nullptr) {
  if (nu.kind != JumpMeasure::Kind::atoms)
    throw std::invalid_argument("sampler requires finite activity");
  if (n_samples == 0) throw std::invalid_argument("need at least one sample");
  const int na = static_cast<int>(nu.atoms.size());
  const int m = grid.size();
  const int nf = static_cast<int>(letters.size());
  for (const auto& f : letters) require_same_size(f.size(), m);

  std::vector<double> jump(na), lambda(na * m), explam(na * m), compensate(nf, 0.0);
  for (int i = 0; i < na; ++i) jump[i] = to_double(nu.atoms[i].first);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < m; ++j) {
      const double l = to_double(nu.atoms[i].second) * grid.w[j];
      lambda[i * m + j] = l;
      explam[i * m + j] = std::exp(-l);
    }
  for (int f = 0; f < nf; ++f)
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < m; ++j) compensate[f] += lambda[i * m + j] * jump[i] * letters[f][j];

  const int nw = static_cast<int>(words.size());
  constexpr std::uint64_t kChunk = 8192;
  const std::uint64_t nchunks = (n_samples + kChunk - 1) / kChunk;

  // per-chunk partial sums, reduced in chunk order afterwards
  std::vector<std::vector<double>> sum1(nchunks), sum2(nchunks);
  if (raw_functionals) raw_functionals->assign(n_samples, std::vector<double>(nf, 0.0));

  auto run_chunk = [&](std::uint64_t c) {
    std::vector<double> s1(nw, 0.0), s2(nw, 0.0), t(nf);
    std::uint64_t state = rng::chunk_state(seed, c);
    const std::uint64_t lo = c * kChunk;
    const std::uint64_t hi = std::min<std::uint64_t>(lo + kChunk, n_samples);
    for (std::uint64_t s = lo; s < hi; ++s) {
      for (int f = 0; f < nf; ++f) t[f] = -compensate[f];
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < m; ++j) {
          const int cij = rng::poisson(state, lambda[i * m + j], explam[i * m + j]);
          if (cij == 0) continue;
          for (int f = 0; f < nf; ++f) t[f] += cij * jump[i] * letters[f][j];
        }
      if (raw_functionals) (*raw_functionals)[s] = t;
      for (int w = 0; w < nw; ++w) {
        double x = 1.0;
        for (int pos : words[w]) x *= t[pos];
        s1[w] += x;
        s2[w] += x * x;
      }
    }
    sum1[c] = std::move(s1);
    sum2[c] = std::move(s2);
  };

  if (threads <= 1) {
    for (std::uint64_t c = 0; c < nchunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::uint64_t c = next.fetch_add(1);
          if (c >= nchunks) return;
          run_chunk(c);
        }
      });
    for (auto& th : pool) th.join();
  }

  const auto mom = moments_d(tilde_from_nu(nu), std::max<int>(0, max_word_len(words) - 2));
  McResult res;
  res.samples = n_samples;
  for (int w = 0; w < nw; ++w) {
    double s1 = 0.0, s2 = 0.0;
    for (std::uint64_t c = 0; c < nchunks; ++c) {
      s1 += sum1[c][w];
      s2 += sum2[c][w];
    }
    McMomentRow row;
    row.word = words[w];
    const double n = static_cast<double>(n_samples);
    row.empirical = s1 / n;
    const double var = std::max(0.0, s2 / n - row.empirical * row.empirical);
    row.std_error = std::sqrt(var / n);
    std::vector<TestFunction> fns;
    for (int pos : words[w]) fns.push_back(letters[pos]);
    row.oracle = oracle_moment(mom, grid, fns);
    res.rows.push_back(std::move(row));
  }
  return res;
}

}  // namespace levyfock
