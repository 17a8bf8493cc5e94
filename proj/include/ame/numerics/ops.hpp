// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>

#include "ame/numerics/tensor.hpp"

namespace ame {

// Matrix product with shape checking; parallel over output rows.
Tensor matmul(const Tensor& a, const Tensor& b);
// a * b^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);
double frobenius_norm(const Tensor& a);

// Throws DegenerateInputError for a zero (or non-finite norm) vector.
Tensor l2_normalize(const Tensor& v);
void l2_normalize_inplace(std::span<double> v);

// ||W^T W - I||_F
double orthogonality_error(const Tensor& w);

struct Svd {
  Tensor u;                    // d x d, orthonormal columns
  std::vector<double> sigma;   // singular values, not sorted
  Tensor v;                    // d x d, orthonormal columns
  std::size_t sweeps = 0;
};

// One-sided Jacobi (Hestenes) SVD of a square matrix. Throws NumericError
// when the sweep cap (100 * d) is exceeded.
Svd jacobi_svd(const Tensor& w);

// U V^T for w = U S V^T: the orthogonal matrix nearest to w in Frobenius norm.
Tensor svd_orthogonal_projection(const Tensor& w);

// Solves a x = b for square a with partial pivoting; b may have several
// columns. Throws NumericError when a pivot falls below a relative 1e-12.
Tensor solve(const Tensor& a, const Tensor& b);

// Throws NumericError naming `what` if any entry is NaN or infinite.
void require_finite(const Tensor& t, std::string_view what);

}  // namespace ame
