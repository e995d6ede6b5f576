// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace levyfock {

// Discretized base space: a finite set of points carrying strictly positive
// weights.  Stands in for (X, sigma); test functions are value vectors.
struct Grid {
  std::vector<double> w;

  Grid() = default;
  explicit Grid(std::vector<double> weights) : w(std::move(weights)) {
    for (double x : w)
      if (!(x > 0.0)) throw std::invalid_argument("grid weight must be positive");
  }
  int size() const { return static_cast<int>(w.size()); }
};

struct TestFunction {
  std::vector<double> v;

  TestFunction() = default;
  explicit TestFunction(std::vector<double> values) : v(std::move(values)) {}
  int size() const { return static_cast<int>(v.size()); }
  double operator[](int j) const { return v[j]; }
};

inline void require_same_size(int a, int b) {
  if (a != b) throw std::invalid_argument("dimension error");
}

inline double integrate(const TestFunction& f, const Grid& g) {
  require_same_size(f.size(), g.size());
  double s = 0.0;
  for (int j = 0; j < g.size(); ++j) s += f[j] * g.w[j];
  return s;
}

inline double inner(const TestFunction& f, const TestFunction& h, const Grid& g) {
  require_same_size(f.size(), h.size());
  require_same_size(f.size(), g.size());
  double s = 0.0;
  for (int j = 0; j < g.size(); ++j) s += f[j] * h[j] * g.w[j];
  return s;
}

inline TestFunction pointwise_product(const TestFunction& f, const TestFunction& h) {
  require_same_size(f.size(), h.size());
  std::vector<double> out(f.v);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= h.v[j];
  return TestFunction(std::move(out));
}

inline TestFunction linear_combination(double a, const TestFunction& f, double b,
                                       const TestFunction& h) {
  require_same_size(f.size(), h.size());
  std::vector<double> out(f.v.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = a * f.v[j] + b * h.v[j];
  return TestFunction(std::move(out));
}

}  // namespace levyfock
