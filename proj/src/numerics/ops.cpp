// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ame/error.hpp"
#include "ame/numerics/kernels.hpp"

namespace ame {

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + shape_str(a.shape()) + " by " + shape_str(b.shape()));
  }
  return kernels::parallel::matmul(a, b);
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: cannot multiply " + shape_str(a.shape()) + " by transpose of " +
                         shape_str(b.shape()));
  }
  return kernels::parallel::matmul_nt(a, b);
}

Tensor transpose(const Tensor& a) {
  Tensor out({a.cols(), a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot: length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  return kernels::detail::dot(a, b);
}

double norm(std::span<const double> v) { return std::sqrt(kernels::detail::dot(v, v)); }

double frobenius_norm(const Tensor& a) { return norm(a.values()); }

void l2_normalize_inplace(std::span<double> v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateInputError("l2_normalize: vector has zero or non-finite norm");
  for (double& x : v) x /= n;
}

Tensor l2_normalize(const Tensor& v) {
  Tensor out = v;
  l2_normalize_inplace(out.values());
  return out;
}

double orthogonality_error(const Tensor& w) {
  Tensor wtw = matmul(transpose(w), w);
  for (std::size_t i = 0; i < wtw.rows(); ++i) wtw(i, i) -= 1.0;
  return frobenius_norm(wtw);
}

namespace {

// Replaces column j of q with a unit vector orthogonal to every column in
// `done`, trying standard basis vectors in order.
void complete_column(Tensor& q, std::size_t j, const std::vector<bool>& done) {
  const std::size_t n = q.rows();
  for (std::size_t e = 0; e < n; ++e) {
    std::vector<double> cand(n, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t c = 0; c < q.cols(); ++c) {
        if (!done[c]) continue;
        double p = 0.0;
        for (std::size_t i = 0; i < n; ++i) p += cand[i] * q(i, c);
        for (std::size_t i = 0; i < n; ++i) cand[i] -= p * q(i, c);
      }
    }
    const double len = norm(cand);
    if (len > 1e-6) {
      for (std::size_t i = 0; i < n; ++i) q(i, j) = cand[i] / len;
      return;
    }
  }
  throw NumericError("svd: failed to complete orthonormal basis");
}

}  // namespace

Svd jacobi_svd(const Tensor& w) {
  if (w.rank() != 2 || w.rows() != w.cols()) {
    throw DimensionError("jacobi_svd: expected a square matrix, got " + shape_str(w.shape()));
  }
  require_finite(w, "jacobi_svd input");
  const std::size_t n = w.rows();
  Svd out{w, std::vector<double>(n, 0.0), Tensor::identity(n), 0};
  Tensor& u = out.u;
  Tensor& v = out.v;
  constexpr double kTol = 1e-15;
  const std::size_t max_sweeps = std::max<std::size_t>(100 * n, 1);

  bool rotated = n > 1;
  while (rotated) {
    if (out.sweeps == max_sweeps) {
      throw NumericError("jacobi_svd: no convergence after " + std::to_string(max_sweeps) + " sweeps");
    }
    ++out.sweeps;
    rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double up = u(i, p), uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
  }

  double largest = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double len = 0.0;
    for (std::size_t i = 0; i < n; ++i) len += u(i, j) * u(i, j);
    out.sigma[j] = std::sqrt(len);
    largest = std::max(largest, out.sigma[j]);
  }
  std::vector<bool> done(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (out.sigma[j] > 1e-13 * std::max(largest, 1e-300)) {
      for (std::size_t i = 0; i < n; ++i) u(i, j) /= out.sigma[j];
      done[j] = true;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!done[j]) {
      complete_column(u, j, done);
      done[j] = true;
    }
  }
  return out;
}

Tensor svd_orthogonal_projection(const Tensor& w) {
  const Svd svd = jacobi_svd(w);
  return matmul_nt(svd.u, svd.v);
}

Tensor solve(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || a.rows() != a.cols() || b.rows() != a.rows()) {
    throw DimensionError("solve: incompatible shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
  }
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  Tensor lhs = a;
  Tensor rhs = b.rank() == 1 ? Tensor({n, 1}, std::vector<double>(b.values().begin(), b.values().end())) : b;
  double scale = 0.0;
  for (double x : lhs.values()) scale = std::max(scale, std::abs(x));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lhs(r, col)) > std::abs(lhs(piv, col))) piv = r;
    if (!(std::abs(lhs(piv, col)) > 1e-12 * scale)) throw NumericError("solve: matrix is singular");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lhs(col, j), lhs(piv, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(rhs(col, j), rhs(piv, j));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lhs(r, col) / lhs(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) lhs(r, j) -= f * lhs(col, j);
      for (std::size_t j = 0; j < m; ++j) rhs(r, j) -= f * rhs(col, j);
    }
  }
  Tensor x({n, m});
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = rhs(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) acc -= lhs(ii, k) * x(k, j);
      x(ii, j) = acc / lhs(ii, ii);
    }
  }
  return x;
}

void require_finite(const Tensor& t, std::string_view what) {
  if (!t.all_finite()) throw NumericError("non-finite value in " + std::string(what));
}

}  // namespace ame
