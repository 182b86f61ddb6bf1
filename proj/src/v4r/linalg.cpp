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
#include "v4r/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "v4r/error.hpp"

namespace v4r
{

SquareMatrix SquareMatrix::identity(std::size_t n)
{
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double SquareMatrix::trace() const noexcept
{
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

SquareMatrix SquareMatrix::transposed() const
{
  SquareMatrix t(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

SquareMatrix operator*(const SquareMatrix & a, const SquareMatrix & b)
{
  const std::size_t n = a.size();
  SquareMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

namespace
{

double off_diagonal_norm(const SquareMatrix & a)
{
  double s = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    for (std::size_t c = 0; c < a.size(); ++c) {
      if (r != c) s += a(r, c) * a(r, c);
    }
  }
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen jacobi_eigen(const SquareMatrix & input, double tolerance, int max_sweeps)
{
  const std::size_t n = input.size();
  SquareMatrix a = input;
  SquareMatrix v = SquareMatrix::identity(n);
  double frob = 0.0;
  for (double x : input.values()) frob += x * x;
  frob = std::sqrt(frob);
  const double threshold = tolerance * (1.0 + frob);

  bool converged = off_diagonal_norm(a) <= threshold;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rotation angle that annihilates a(p,q); the smaller root keeps
        // the update well conditioned.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    converged = off_diagonal_norm(a) <= threshold;
  }
  if (!converged) {
    throw Error(ErrorCode::NumericalFailure, "jacobi_eigen: no convergence within sweep limit");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x) < a(y, y);
  });
  SymmetricEigen out{std::vector<double>(n), SquareMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

SquareMatrix reconstruct(const SymmetricEigen & eig, std::span<const double> values)
{
  const std::size_t n = eig.vectors.size();
  SquareMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = values[k];
    if (lambda == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = eig.vectors(i, k) * lambda;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * eig.vectors(j, k);
    }
  }
  return out;
}

SquareMatrix sqrt_psd(const SquareMatrix & a)
{
  const SymmetricEigen eig = jacobi_eigen(a);
  std::vector<double> roots(eig.values.size());
  std::transform(eig.values.begin(), eig.values.end(), roots.begin(), [](double x) {
    return std::sqrt(std::max(x, 0.0));
  });
  return reconstruct(eig, roots);
}

}  // namespace v4r
