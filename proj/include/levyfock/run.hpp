// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "levyfock/config.hpp"
#include "levyfock/equivalence.hpp"
#include "levyfock/report.hpp"

namespace levyfock {

// ---------------------------------------------------------------------------
// Context shared by the commands: the effective Jacobi matrix (exact
// pipeline, capped at the support for atom measures) and both spaces.
// ---------------------------------------------------------------------------

struct RunContext {
  RunConfig cfg;
  Recurrence<Rational> recurrence;
  JacobiMatrix jacobi;
  ExtSpace ext;
  FockSpace fock;
  int threads = 1;

  static RunContext make(RunConfig cfg, int threads = 1) {
    // family measures have no exact support cap, so the block weights need
    // the full ladder up to the degree cap
    if (cfg.nu_tilde.kind == JumpMeasure::Kind::family && cfg.ell2_dim < cfg.max_degree)
      throw ConfigError("ell2_dim too small for max_degree with a family measure");
    Recurrence<Rational> rec = jacobi_of_measure(cfg.nu_tilde, cfg.ell2_dim);
    JacobiMatrix j = to_jacobi(rec);
    ExtSpace ext(cfg.grid, j, cfg.max_degree);
    FockSpace fock(cfg.grid, j, cfg.max_degree);
    return RunContext{std::move(cfg), std::move(rec), std::move(j), std::move(ext),
                      std::move(fock), std::max(1, threads)};
  }
};

namespace detail {

inline double uniform_pm1(std::uint64_t& state) { return 2.0 * rng::uniform01(state) - 1.0; }

inline SymTensor random_sym_tensor(int degree, int m, std::uint64_t& state) {
  SymTensor f(degree);
  for (const auto& key : enumerate_multisets(m, degree)) f.vals[key] = uniform_pm1(state);
  return f;
}

inline std::vector<TestFunction> word_functions(const std::vector<TestFunction>& letters,
                                                const Word& w) {
  std::vector<TestFunction> fns;
  fns.reserve(w.size());
  for (int i : w) fns.push_back(letters[i]);
  return fns;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// jacobi: CSV of the recurrence coefficients
// ---------------------------------------------------------------------------

inline std::string run_jacobi_csv(const RunContext& ctx) {
  std::string out = "n,a_n,b_n\n";
  for (int n = 0; n < ctx.jacobi.size(); ++n) {
    out += std::to_string(n) + "," + format_double(ctx.jacobi.a[n]) + ",";
    if (n >= 1) out += format_double(ctx.jacobi.b[n - 1]);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// alpha: enumeration of a weight level with K_alpha values
// ---------------------------------------------------------------------------

inline std::string run_alpha_table(const RunContext& ctx, int degree) {
  std::string out = "alpha,weight,size,K_alpha\n";
  for (const auto& a : enumerate_alphas(degree)) {
    std::string counts;
    for (int i = 0; i < a.max_class(); ++i) {
      if (i) counts += " ";
      counts += std::to_string(a.counts[i]);
    }
    double k = 0.0;
    try {
      k = k_alpha(a, ctx.jacobi);
    } catch (const std::exception&) {
      k = std::numeric_limits<double>::quiet_NaN();
    }
    out += "(" + counts + ")," + std::to_string(a.weight()) + "," + std::to_string(a.size()) +
           "," + format_double(k) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// moments: one vacuum word moment from a chosen evaluator
// ---------------------------------------------------------------------------

struct MomentValue {
  double value = 0.0;
  bool flagged = false;
};

inline MomentValue run_moment(const RunContext& ctx, const std::string& side, const Word& word) {
  for (int i : word)
    if (i < 0 || i >= static_cast<int>(ctx.cfg.test_functions.size()))
      throw ConfigError("word letter out of range");
  const auto fns = detail::word_functions(ctx.cfg.test_functions, word);
  if (side == "j") {
    ExtVector v = apply_word(ctx.ext, fns);
    return {ext_vacuum_component(v), v.truncated};
  }
  if (side == "a") {
    FockVector v = apply_word_a(ctx.fock, fns);
    return {fock_vacuum_component(v), v.truncated};
  }
  if (side == "oracle") {
    const auto mom = moments_d(ctx.cfg.nu_tilde, std::max(0, static_cast<int>(word.size()) - 2));
    return {oracle_moment(mom, ctx.cfg.grid, fns), false};
  }
  throw ConfigError("unknown side: " + side);
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

inline void verify_isometry(const RunContext& ctx, Report& rep) {
  const auto& J = ctx.jacobi;
  const int M = J.size();

  const auto q = golub_welsch(J);
  const auto P = u3_transform(J);
  rep.check("u3 unitarity |P^T P - I|_F",
            (P.transpose() * P - Eigen::MatrixXd::Identity(M, M)).norm(), 1e-12);
  Eigen::VectorXd lambda(M);
  for (int i = 0; i < M; ++i) lambda(i) = q.nodes[i];
  rep.check("u3 intertwining |P^T diag P - J|_F",
            (P.transpose() * lambda.asDiagonal() * P - J.dense()).norm(), 1e-10);

  const auto mom = moments_d(ctx.cfg.nu_tilde, 2 * M - 1);
  double worst = 0.0;
  for (int k = 0; k <= 2 * M - 1; ++k) {
    double s = 0.0;
    for (int i = 0; i < M; ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
    worst = std::max(worst, std::fabs(s - mom[k]) / std::max(1.0, std::fabs(mom[k])));
  }
  rep.check("quadrature moment match", worst, 1e-10);

  if (ctx.cfg.nu_tilde.kind == JumpMeasure::Kind::atoms) {
    // diag(1/s): L2(nu) -> L2(nu_tilde) is isometric under the w/s^2 masses
    const auto d = u2_multiplier(ctx.cfg.nu_tilde);
    const JumpMeasure nu = nu_from_tilde(ctx.cfg.nu_tilde);
    std::uint64_t st = 17;
    double worst2 = 0.0;
    for (int rep_i = 0; rep_i < 5; ++rep_i) {
      double n_nu = 0.0, n_tilde = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double f = detail::uniform_pm1(st);
        n_nu += to_double(nu.atoms[i].second) * f * f;
        n_tilde += to_double(ctx.cfg.nu_tilde.atoms[i].second) * (d[i] * f) * (d[i] * f);
      }
      worst2 = std::max(worst2, std::fabs(n_nu - n_tilde) / std::max(1.0, n_nu));
    }
    rep.check("u2 isometry", worst2, 1e-14);
  }

  // S_alpha is an orthogonal projection
  {
    std::uint64_t st = 23;
    const AlphaIndex a({2, 1});
    DenseBlockFn g;
    g.alpha = a;
    g.m = ctx.cfg.grid.size();
    g.vals.resize(DenseBlockFn::total_size(a, g.m));
    for (auto& v : g.vals) v = detail::uniform_pm1(st);
    const DenseBlockFn sg = s_alpha(g);
    const DenseBlockFn ssg = s_alpha(sg);
    double r = 0.0;
    for (std::size_t i = 0; i < sg.vals.size(); ++i)
      r = std::max(r, std::fabs(ssg.vals[i] - sg.vals[i]));
    rep.check("s_alpha idempotent", r, 1e-14);

    DenseBlockFn h = g;
    for (auto& v : h.vals) v = detail::uniform_pm1(st);
    const double lhs = dense_inner(s_alpha(g), h, ctx.cfg.grid);
    const double rhs = dense_inner(g, s_alpha(h), ctx.cfg.grid);
    rep.check("s_alpha self-adjoint", std::fabs(lhs - rhs), 1e-14);
  }

  // Gram positive definiteness of u_n images of the multiset tensor basis
  {
    const int n = std::min(3, ctx.ext.max_degree);
    const auto keys = enumerate_multisets(ctx.cfg.grid.size(), n);
    const int d = static_cast<int>(keys.size());
    Eigen::MatrixXd G(d, d);
    std::vector<ExtVector> imgs;
    for (const auto& key : keys) {
      SymTensor f(n);
      f.vals[key] = 1.0;
      imgs.push_back(u_n(ctx.ext, f));
    }
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) G(i, j) = G(j, i) = inner_ext(ctx.ext, imgs[i], imgs[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    rep.check("u_n gram positive definite", lmin > 0 ? 0.0 : std::fabs(lmin) / lmax, 0.0);
  }
}

inline void verify_adjoint(const RunContext& ctx, Report& rep) {
  const auto& letters = ctx.cfg.test_functions;
  const int m = ctx.cfg.grid.size();

  // <J+ u_n(f), u_{n+1}(g)> = <u_n(f), J- u_{n+1}(g)>
  {
    std::uint64_t st = 41;
    double worst = 0.0;
    const int ntop = std::min(3, ctx.ext.max_degree - 1);
    for (int n = 0; n <= ntop; ++n) {
      for (int trial = 0; trial < 4; ++trial) {
        const SymTensor f = detail::random_sym_tensor(n, m, st);
        const SymTensor g = detail::random_sym_tensor(n + 1, m, st);
        const ExtVector uf = u_n(ctx.ext, f);
        const ExtVector ug = u_n(ctx.ext, g);
        for (const auto& phi : letters) {
          const double lhs = inner_ext(ctx.ext, j_plus(ctx.ext, phi, uf), ug);
          const double rhs = inner_ext(ctx.ext, uf, j_minus(ctx.ext, phi, ug));
          worst = std::max(worst, relative_deviation(lhs, rhs));
        }
      }
    }
    rep.check("creation/annihilation adjoint on embeddings", worst, 1e-10);
  }

  // canonical commutation surrogate on the Fock side
  {
    std::uint64_t st = 43;
    double worst = 0.0;
    const auto basis_words = words_up_to(static_cast<int>(letters.size()), 2);
    std::vector<FockVector> vecs;
    for (const auto& w : basis_words)
      vecs.push_back(apply_word_a(ctx.fock, detail::word_functions(letters, w)));
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::VectorXd h(ctx.fock.dim()), g(ctx.fock.dim());
      for (int i = 0; i < ctx.fock.dim(); ++i) {
        h(i) = detail::uniform_pm1(st);
        g(i) = detail::uniform_pm1(st);
      }
      const double hg = ctx.fock.one_particle_inner(h, g);
      for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = 0; j < vecs.size(); ++j) {
          const FockVector& F = vecs[i];
          const FockVector& G = vecs[j];
          const double comm =
              fock_inner(ctx.fock, F, a_minus(ctx.fock, h, a_plus(ctx.fock, g, G))) -
              fock_inner(ctx.fock, F, a_plus(ctx.fock, g, a_minus(ctx.fock, h, G)));
          worst = std::max(worst, relative_deviation(comm, hg * fock_inner(ctx.fock, F, G)));
        }
    }
    rep.check("canonical commutation", worst, 1e-12);
  }

  // dGamma adjoint: <dG(T)F, G> = <F, dG(T*)G> with T* the weighted adjoint
  {
    std::uint64_t st = 47;
    Eigen::MatrixXd T(ctx.fock.dim(), ctx.fock.dim());
    for (int i = 0; i < T.rows(); ++i)
      for (int j = 0; j < T.cols(); ++j) T(i, j) = detail::uniform_pm1(st);
    Eigen::MatrixXd Tstar(ctx.fock.dim(), ctx.fock.dim());
    for (int p = 0; p < T.rows(); ++p)
      for (int q = 0; q < T.cols(); ++q)
        Tstar(q, p) = T(p, q) * ctx.fock.point_weight(p) / ctx.fock.point_weight(q);
    const auto words = words_up_to(static_cast<int>(letters.size()), 2);
    double worst = 0.0;
    for (const auto& wi : words)
      for (const auto& wj : words) {
        const FockVector F = apply_word_a(ctx.fock, detail::word_functions(letters, wi));
        const FockVector G = apply_word_a(ctx.fock, detail::word_functions(letters, wj));
        const double lhs = fock_inner(ctx.fock, a_zero(ctx.fock, T, F), G);
        const double rhs = fock_inner(ctx.fock, F, a_zero(ctx.fock, Tstar, G));
        worst = std::max(worst, relative_deviation(lhs, rhs));
      }
    rep.check("second quantization adjoint", worst, 1e-11);
  }

  // A(phi) symmetric on low words
  {
    const auto words = words_up_to(static_cast<int>(letters.size()),
                                   std::min(2, ctx.fock.max_degree - 1));
    double worst = 0.0;
    for (const auto& phi : letters) {
      const AFieldOps ops = make_a_field_ops(ctx.fock, phi);
      std::vector<FockVector> vecs, avecs;
      for (const auto& w : words) {
        vecs.push_back(apply_word_a(ctx.fock, detail::word_functions(letters, w)));
        avecs.push_back(a_field(ctx.fock, Part::full, ops, vecs.back()));
      }
      for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = 0; j < vecs.size(); ++j)
          worst = std::max(worst, relative_deviation(fock_inner(ctx.fock, avecs[i], vecs[j]),
                                                     fock_inner(ctx.fock, vecs[i], avecs[j])));
    }
    rep.check("field operator symmetric (fock side)", worst, 1e-10);
  }
}

inline void verify_commute(const RunContext& ctx, Report& rep) {
  const auto& letters = ctx.cfg.test_functions;
  const int maxlen = std::min(ctx.cfg.word_length, 6);

  const auto tj = word_table_j(ctx.ext, letters, maxlen);
  const auto ta = word_table_a(ctx.fock, letters, maxlen);

  auto permutation_spread = [](const std::map<Word, WordValue>& table) {
    std::map<Word, std::pair<double, double>> classes;  // sorted word -> (min, max)
    for (const auto& [w, v] : table) {
      Word s = w;
      std::sort(s.begin(), s.end());
      auto it = classes.find(s);
      if (it == classes.end()) {
        classes[s] = {v.value, v.value};
      } else {
        it->second.first = std::min(it->second.first, v.value);
        it->second.second = std::max(it->second.second, v.value);
      }
    }
    double worst = 0.0;
    for (const auto& [s, mm] : classes) worst = std::max(worst, relative_deviation(mm.first, mm.second));
    return worst;
  };
  rep.check("word moments permutation invariant (extended side)", permutation_spread(tj), 1e-10);
  rep.check("word moments permutation invariant (fock side)", permutation_spread(ta), 1e-10);

  // the oracle is permutation invariant by construction of the block formula;
  // spot-check it anyway
  {
    const auto mom = moments_d(ctx.cfg.nu_tilde, std::max(0, maxlen - 1));
    double worst = 0.0;
    for (const auto& w : words_up_to(static_cast<int>(letters.size()), std::min(4, maxlen))) {
      if (w.size() < 2) continue;
      Word s = w;
      std::sort(s.begin(), s.end());
      if (s == w) continue;
      const double a = oracle_moment(mom, ctx.cfg.grid, detail::word_functions(letters, w));
      const double b = oracle_moment(mom, ctx.cfg.grid, detail::word_functions(letters, s));
      worst = std::max(worst, relative_deviation(a, b));
    }
    rep.check("word moments permutation invariant (oracle)", worst, 1e-12);
  }

  // J(phi) symmetric on cyclic vectors
  {
    const int wl = std::min({ctx.cfg.word_length - 1, ctx.ext.max_degree - 1, 3});
    const auto words = words_up_to(static_cast<int>(letters.size()), std::max(0, wl));
    std::vector<ExtVector> vecs;
    for (const auto& w : words)
      vecs.push_back(apply_word(ctx.ext, detail::word_functions(letters, w)));
    double worst = 0.0;
    for (const auto& phi : letters) {
      std::vector<ExtVector> jv;
      for (const auto& v : vecs) jv.push_back(j_full(ctx.ext, phi, v));
      for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = 0; j < vecs.size(); ++j)
          worst = std::max(worst, relative_deviation(inner_ext(ctx.ext, jv[i], vecs[j]),
                                                     inner_ext(ctx.ext, vecs[i], jv[j])));
    }
    rep.check("field operator symmetric (extended side)", worst, 1e-10);
  }
}

inline void verify_equivalence(const RunContext& ctx, Report& rep) {
  const auto& letters = ctx.cfg.test_functions;

  const auto reports = compare_moments(ctx.ext, ctx.fock, ctx.cfg.nu_tilde, letters,
                                       ctx.cfg.word_length);
  double worst = 0.0;
  bool all_valid = true;
  for (const auto& r : reports) {
    if (!r.valid) {
      all_valid = false;
      continue;
    }
    worst = std::max({worst, r.dev_ja, r.dev_jo, r.dev_ao});
  }
  rep.check("three-way word moment equality", all_valid ? worst : 1.0, ctx.cfg.tol_rel);

  const int K = std::min(ctx.cfg.word_length, 4);
  Intertwiner I = build_intertwiner(ctx.ext, ctx.fock, letters, K, ctx.cfg.tol_rank,
                                    ctx.cfg.tol_gram);
  rep.check("gram equality |G_J - G_A|_F / |G_J|_F", I.gram_rel_deviation, 1e-9);

  {
    double iso = 0.0;
    for (std::size_t i = 0; i < I.words.size(); ++i) {
      const double nj = ext_norm(ctx.ext, I.jvecs[i]);
      const double na = fock_norm(ctx.fock, apply_intertwiner(I, ctx.ext, ctx.fock, I.jvecs[i]));
      iso = std::max(iso, std::fabs(na / nj - 1.0));
    }
    rep.check("intertwiner isometry on cyclic span", iso, 1e-8);
  }

  {
    const FockVector iv = apply_intertwiner(I, ctx.ext, ctx.fock, ext_vacuum());
    const double r = fock_norm(ctx.fock, fock_axpy(-1.0, fock_vacuum(ctx.fock), iv));
    rep.check("intertwiner maps vacuum to vacuum", r, 1e-10);
  }

  // diagnostic only: the isometry is not grading-preserving, so the image of
  // a pure weight-n vector spreads over several Fock degrees; there is no
  // quantitative bound to enforce
  {
    const auto spread = image_grading_spread(I, ctx.ext, ctx.fock);
    double worst_spread = 0.0;
    for (double s : spread) worst_spread = std::max(worst_spread, s);
    rep.check("image grading spread (diagnostic)", worst_spread, 1.0);
  }

  // residual table: one entry per part and test function
  for (const auto& [part, name] :
       {std::pair{Part::plus, "plus"}, {Part::zero, "zero"}, {Part::minus, "minus"},
        {Part::full, "full"}}) {
    for (std::size_t f = 0; f < letters.size(); ++f) {
      const auto res = intertwine_residual_detail(I, ctx.ext, ctx.fock, part, letters[f], K - 1);
      rep.check(std::string("intertwining residual (") + name + ", phi_" + std::to_string(f) + ")",
                res.compressed, 1e-8);
      if (part == Part::full)
        rep.check(std::string("intertwining residual unprojected (full, phi_") +
                      std::to_string(f) + ")",
                  res.unprojected, 1e-8);
    }
  }
}

inline void verify_oracle(const RunContext& ctx, Report& rep) {
  const auto& letters = ctx.cfg.test_functions;
  const auto& grid = ctx.cfg.grid;
  const auto mom = moments_d(ctx.cfg.nu_tilde, 4);

  // closed forms for short words
  double worst = 0.0;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    worst = std::max(worst, std::fabs(oracle_moment(mom, grid, {letters[i]})));
    for (std::size_t j = 0; j < letters.size(); ++j) {
      const double pair = oracle_moment(mom, grid, {letters[i], letters[j]});
      worst = std::max(worst, relative_deviation(pair, inner(letters[i], letters[j], grid)));
      const double triple = oracle_moment(mom, grid, {letters[i], letters[i], letters[j]});
      const double triple_direct =
          mom[1] * integrate(pointwise_product(pointwise_product(letters[i], letters[i]), letters[j]), grid);
      worst = std::max(worst, relative_deviation(triple, triple_direct));
    }
    const TestFunction& f = letters[i];
    const double quad = oracle_moment(mom, grid, {f, f, f, f});
    const double i2 = inner(f, f, grid);
    const double i4 = integrate(pointwise_product(pointwise_product(f, f), pointwise_product(f, f)), grid);
    worst = std::max(worst, relative_deviation(quad, 3 * i2 * i2 + mom[2] * i4));
  }
  rep.check("oracle closed forms (len <= 4)", worst, 1e-12);

  // multilinearity in a slot
  {
    std::uint64_t st = 71;
    double worst2 = 0.0;
    for (int trial = 0; trial < 8 && letters.size() >= 2; ++trial) {
      const double a = detail::uniform_pm1(st), b = detail::uniform_pm1(st);
      const TestFunction mix = linear_combination(a, letters[0], b, letters[1]);
      const std::vector<TestFunction> tail = {letters[0], letters[1 % letters.size()],
                                              letters[2 % letters.size()]};
      auto with_head = [&](const TestFunction& h) {
        std::vector<TestFunction> w = {h};
        w.insert(w.end(), tail.begin(), tail.end());
        return oracle_moment(mom, grid, w);
      };
      const double lhs = with_head(mix);
      const double rhs = a * with_head(letters[0]) + b * with_head(letters[1]);
      worst2 = std::max(worst2, relative_deviation(lhs, rhs));
    }
    rep.check("oracle multilinear", worst2, 1e-12);
  }
}

inline void verify_mc(const RunContext& ctx, Report& rep) {
  const auto& letters = ctx.cfg.test_functions;
  const JumpMeasure nu = nu_from_tilde(ctx.cfg.nu_tilde);
  const auto words = words_up_to(static_cast<int>(letters.size()),
                                 std::min(4, ctx.cfg.word_length));
  std::vector<Word> nonempty(words.begin() + 1, words.end());

  const McResult res = mc_sample(nu, ctx.cfg.grid, letters, nonempty, ctx.cfg.mc_samples,
                                 ctx.cfg.mc_seed, ctx.threads);
  double worst_z = 0.0;
  for (const auto& row : res.rows) {
    const double se = std::max(row.std_error, 1e-300);
    worst_z = std::max(worst_z, std::fabs(row.empirical - row.oracle) / se);
  }
  rep.check("mc moments within 4 standard errors", worst_z, 4.0);

  // bit-identical across thread counts
  const McResult res1 = mc_sample(nu, ctx.cfg.grid, letters, nonempty, ctx.cfg.mc_samples,
                                  ctx.cfg.mc_seed, 1);
  const McResult res4 = mc_sample(nu, ctx.cfg.grid, letters, nonempty, ctx.cfg.mc_samples,
                                  ctx.cfg.mc_seed, 4);
  double diff = 0.0;
  for (std::size_t i = 0; i < res1.rows.size(); ++i)
    diff = std::max(diff, std::fabs(res1.rows[i].empirical - res4.rows[i].empirical));
  rep.check("mc bit-identical across thread counts", diff, 0.0);
}

inline Report run_verify(const RunContext& ctx, const std::string& suite) {
  Report rep;
  rep.command = "verify";
  rep.suite = suite;
  if (suite == "isometry" || suite == "all") verify_isometry(ctx, rep);
  if (suite == "adjoint" || suite == "all") verify_adjoint(ctx, rep);
  if (suite == "commute" || suite == "all") verify_commute(ctx, rep);
  if (suite == "equivalence" || suite == "all") verify_equivalence(ctx, rep);
  if (suite == "oracle" || suite == "all") verify_oracle(ctx, rep);
  // the sampler needs finite activity; "all" skips it for families, the
  // explicit suite reports the hard error
  if (suite == "mc" || (suite == "all" && ctx.cfg.nu_tilde.kind == JumpMeasure::Kind::atoms))
    verify_mc(ctx, rep);
  if (rep.checks.empty()) throw ConfigError("unknown suite: " + suite);
  return rep;
}

// ---------------------------------------------------------------------------
// sample: CSV of functionals plus the empirical moment table
// ---------------------------------------------------------------------------

struct SampleOutput {
  std::string csv;
  std::string table;
};

inline SampleOutput run_sample(const RunContext& ctx) {
  const auto& letters = ctx.cfg.test_functions;
  const JumpMeasure nu = nu_from_tilde(ctx.cfg.nu_tilde);
  const auto words = words_up_to(static_cast<int>(letters.size()),
                                 std::min(4, ctx.cfg.word_length));
  std::vector<Word> nonempty(words.begin() + 1, words.end());
  std::vector<std::vector<double>> raw;
  const McResult res = mc_sample(nu, ctx.cfg.grid, letters, nonempty, ctx.cfg.mc_samples,
                                 ctx.cfg.mc_seed, ctx.threads, &raw);

  SampleOutput out;
  out.csv = "sample";
  for (std::size_t f = 0; f < letters.size(); ++f) out.csv += ",phi_" + std::to_string(f);
  out.csv += "\n";
  for (std::size_t s = 0; s < raw.size(); ++s) {
    out.csv += std::to_string(s);
    for (double v : raw[s]) out.csv += "," + format_double(v);
    out.csv += "\n";
  }

  out.table = "word,empirical,std_error,oracle\n";
  for (const auto& row : res.rows) {
    std::string w;
    for (std::size_t i = 0; i < row.word.size(); ++i) {
      if (i) w += " ";
      w += std::to_string(row.word[i]);
    }
    out.table += "(" + w + ")," + format_double(row.empirical) + "," +
                 format_double(row.std_error) + "," + format_double(row.oracle) + "\n";
  }
  return out;
}

}  // namespace levyfock
