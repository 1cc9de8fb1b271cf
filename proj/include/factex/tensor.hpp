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

#ifndef FACTEX_TENSOR_HPP_
#define FACTEX_TENSOR_HPP_

#include <cstddef>
#include <vector>

namespace factex {

// Dense row-major matrix/vector of doubles. Vectors are stored as 1 x n.
class Tensor {
 public:
  Tensor() : rows_(0), cols_(0) {}
  Tensor(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  explicit Tensor(std::size_t n) : Tensor(1, n) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v) { data_.assign(data_.size(), v); }
  void zero() { fill(0.0); }

  Tensor zeros_like() const { return Tensor(rows_, cols_); }

  bool same_shape(const Tensor& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

// C = A * B. OpenMP-parallel over output rows; each row is accumulated in the
// same order as the serial kernel, so the two agree bit for bit.
void matmul(const Tensor& a, const Tensor& b, Tensor& c);
void matmul_serial(const Tensor& a, const Tensor& b, Tensor& c);

// C = A * B^T (A is m x k, B is n x k, C is m x n).
void matmul_transb(const Tensor& a, const Tensor& b, Tensor& c);

// C += A^T * B (A is m x k, B is m x n, C is k x n). Used for weight grads.
void matmul_transa_acc(const Tensor& a, const Tensor& b, Tensor& c);

// y = x * W + b for a batch of row vectors; W is in x out, b is 1 x out.
void linear(const Tensor& x, const Tensor& w, const Tensor& b, Tensor& y);

void axpy(double alpha, const Tensor& x, Tensor& y);  // y += alpha * x

double dot(const double* a, const double* b, std::size_t n);

}  // namespace factex

#endif  // FACTEX_TENSOR_HPP_
