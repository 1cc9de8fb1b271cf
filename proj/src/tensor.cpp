// Copyright 2026 The Factex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "factex/tensor.hpp"

#include <cassert>

#include "factex/errors.hpp"

namespace factex {

namespace {

void check_mm(const Tensor& a, const Tensor& b, const Tensor& c,
              std::size_t m, std::size_t k, std::size_t kb, std::size_t n,
              std::size_t cm, std::size_t cn) {
  (void)a;
  (void)b;
  (void)c;
  if (k != kb || m != cm || n != cn)
    throw NumericError("matmul: shape mismatch");
}

inline void mm_row(const double* arow, const Tensor& b, double* crow,
                   std::size_t k, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    const double av = arow[p];
    const double* brow = b.row(p);
    for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

}  // namespace

void matmul(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  check_mm(a, b, c, m, k, b.rows(), n, c.rows(), c.cols());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (m > 4)
#endif
  for (long long i = 0; i < static_cast<long long>(m); ++i)
    mm_row(a.row(static_cast<std::size_t>(i)), b,
           c.row(static_cast<std::size_t>(i)), k, n);
}

void matmul_serial(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  check_mm(a, b, c, m, k, b.rows(), n, c.rows(), c.cols());
  for (std::size_t i = 0; i < m; ++i) mm_row(a.row(i), b, c.row(i), k, n);
}

void matmul_transb(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  if (b.cols() != k || c.rows() != m || c.cols() != n)
    throw NumericError("matmul_transb: shape mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t j = 0; j < n; ++j) crow[j] = dot(arow, b.row(j), k);
  }
}

void matmul_transa_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != m || c.rows() != k || c.cols() != n)
    throw NumericError("matmul_transa_acc: shape mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a.row(i);
    const double* brow = b.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      double* crow = c.row(p);
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void linear(const Tensor& x, const Tensor& w, const Tensor& b, Tensor& y) {
  matmul(x, w, y);
  if (b.size() != w.cols()) throw NumericError("linear: bias shape mismatch");
  for (std::size_t i = 0; i < y.rows(); ++i) {
    double* yrow = y.row(i);
    for (std::size_t j = 0; j < y.cols(); ++j) yrow[j] += b[j];
  }
}

void axpy(double alpha, const Tensor& x, Tensor& y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace factex
