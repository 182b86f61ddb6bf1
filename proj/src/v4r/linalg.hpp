// Copyright 2026 The v4r Authors
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
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace v4r
{

/// Dense row-major square matrix of doubles.
class SquareMatrix
{
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static SquareMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double & operator()(std::size_t r, std::size_t c) noexcept { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * n_ + c]; }
  std::span<const double> values() const noexcept { return data_; }

  double trace() const noexcept;
  SquareMatrix transposed() const;

  friend SquareMatrix operator*(const SquareMatrix & a, const SquareMatrix & b);
  friend bool operator==(const SquareMatrix &, const SquareMatrix &) = default;

private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct SymmetricEigen
{
  std::vector<double> values;   // ascending
  SquareMatrix vectors;         // column k pairs with values[k]
};

/// Cyclic Jacobi rotations. Converged when the off-diagonal Frobenius norm
/// falls below tolerance * (1 + Frobenius norm of the input), or hits an
/// exact zero; throws NumericalFailure after max_sweeps.
SymmetricEigen jacobi_eigen(const SquareMatrix & a, double tolerance = 1e-12, int max_sweeps = 100);

/// V diag(f(lambda)) V^T.
SquareMatrix reconstruct(const SymmetricEigen & eig, std::span<const double> values);

/// Principal square root of a symmetric PSD matrix, eigenvalues clamped at 0.
SquareMatrix sqrt_psd(const SquareMatrix & a);

}  // namespace v4r
