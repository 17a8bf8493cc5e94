// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/numerics/kernels.hpp"

#include <algorithm>
#include <numeric>

namespace ame::kernels {

namespace detail {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double order_penalty(std::span<const double> caption, std::span<const double> image) {
  double acc = 0.0;
  for (std::size_t i = 0; i < caption.size(); ++i) {
    const double v = caption[i] - image[i];
    if (v > 0.0) acc += v * v;
  }
  return -acc;
}

std::vector<Index> top_k(std::span<const double> row, std::size_t k) {
  std::vector<Index> idx(row.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](Index a, Index b) { return row[a] > row[b] || (row[a] == row[b] && a < b); });
  idx.resize(k);
  return idx;
}

std::size_t best_gold_rank(std::span<const double> row, std::span<const Index> gold) {
  std::size_t best = row.size() + 1;
  for (Index g : gold) {
    const double sg = row[g];
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] > sg || (row[j] == sg && j < g)) ++ahead;
    }
    best = std::min(best, ahead + 1);
  }
  return best;
}

namespace {

double top_k_mean(std::span<const double> row, std::size_t k) {
  const auto idx = top_k(row, k);
  double acc = 0.0;
  for (Index i : idx) acc += row[i];
  return idx.empty() ? 0.0 : acc / static_cast<double>(idx.size());
}

}  // namespace

}  // namespace detail

namespace {

using detail::dot;

// Shared row bodies keep the serial and parallel variants on the same
// arithmetic path.
void matmul_row(const Tensor& a, const Tensor& b, Tensor& out, std::size_t i) {
  const std::size_t k = a.cols();
  const std::size_t n = b.cols();
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t p = 0; p < k; ++p) acc += a(i, p) * b(p, j);
    out(i, j) = acc;
  }
}

void matmul_nt_row(const Tensor& a, const Tensor& b, Tensor& out, std::size_t i) {
  for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = dot(a.row(i), b.row(j));
}

void order_row(const Tensor& captions, const Tensor& images, Tensor& out, std::size_t c) {
  for (std::size_t i = 0; i < images.rows(); ++i) {
    out(c, i) = detail::order_penalty(captions.row(c), images.row(i));
  }
}

}  // namespace

namespace serial {

Tensor matmul(const Tensor& a, const Tensor& b) {
  Tensor out({a.rows(), b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, out, i);
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  Tensor out({a.rows(), b.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_nt_row(a, b, out, i);
  return out;
}

Tensor order_similarity(const Tensor& captions, const Tensor& images) {
  Tensor out({captions.rows(), images.rows()});
  for (std::size_t c = 0; c < captions.rows(); ++c) order_row(captions, images, out, c);
  return out;
}

IndexLists top_k_rows(const Tensor& scores, std::size_t k) {
  IndexLists out(scores.rows());
  for (std::size_t r = 0; r < scores.rows(); ++r) out[r] = detail::top_k(scores.row(r), k);
  return out;
}

std::vector<double> top_k_mean_rows(const Tensor& scores, std::size_t k) {
  std::vector<double> out(scores.rows());
  for (std::size_t r = 0; r < scores.rows(); ++r) out[r] = detail::top_k_mean(scores.row(r), k);
  return out;
}

std::vector<std::size_t> best_gold_ranks(const Tensor& scores, const IndexLists& gold) {
  std::vector<std::size_t> out(scores.rows());
  for (std::size_t r = 0; r < scores.rows(); ++r) out[r] = detail::best_gold_rank(scores.row(r), gold[r]);
  return out;
}

}  // namespace serial

namespace parallel {

// Loop counters are signed for OpenMP 2.x compatibility.
Tensor matmul(const Tensor& a, const Tensor& b) {
  Tensor out({a.rows(), b.cols()});
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) matmul_row(a, b, out, static_cast<std::size_t>(i));
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  Tensor out({a.rows(), b.rows()});
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) matmul_nt_row(a, b, out, static_cast<std::size_t>(i));
  return out;
}

Tensor order_similarity(const Tensor& captions, const Tensor& images) {
  Tensor out({captions.rows(), images.rows()});
  const auto n = static_cast<std::ptrdiff_t>(captions.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < n; ++c) order_row(captions, images, out, static_cast<std::size_t>(c));
  return out;
}

IndexLists top_k_rows(const Tensor& scores, std::size_t k) {
  IndexLists out(scores.rows());
  const auto n = static_cast<std::ptrdiff_t>(scores.rows());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)] = detail::top_k(scores.row(static_cast<std::size_t>(r)), k);
  }
  return out;
}

std::vector<double> top_k_mean_rows(const Tensor& scores, std::size_t k) {
  std::vector<double> out(scores.rows());
  const auto n = static_cast<std::ptrdiff_t>(scores.rows());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)] = detail::top_k_mean(scores.row(static_cast<std::size_t>(r)), k);
  }
  return out;
}

std::vector<std::size_t> best_gold_ranks(const Tensor& scores, const IndexLists& gold) {
  std::vector<std::size_t> out(scores.rows());
  const auto n = static_cast<std::ptrdiff_t>(scores.rows());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto u = static_cast<std::size_t>(r);
    out[u] = detail::best_gold_rank(scores.row(u), gold[u]);
  }
  return out;
}

}  // namespace parallel

}  // namespace ame::kernels
