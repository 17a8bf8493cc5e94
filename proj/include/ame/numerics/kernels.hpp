// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ame/numerics/tensor.hpp"

// Hot loops of the library. Every kernel exists twice: a serial reference
// used by the tests, and an OpenMP version parallel over output rows. Both
// compute each output entry with the same inner loop, so results are
// bitwise identical regardless of thread count.
//
// Kernels do not validate shapes; the public wrappers in ops.hpp,
// similarity.hpp and friends do.
namespace ame::kernels {

using Index = std::uint32_t;
using IndexLists = std::vector<std::vector<Index>>;

namespace serial {

// a[m x k] * b[k x n]
Tensor matmul(const Tensor& a, const Tensor& b);
// a[m x k] * b[n x k]^T, i.e. all row-pair dot products
Tensor matmul_nt(const Tensor& a, const Tensor& b);
// out[c][i] = -|| max(0, captions[c] - images[i]) ||^2
Tensor order_similarity(const Tensor& captions, const Tensor& images);
// For each row of scores, the k column indices with the highest scores,
// sorted by descending score with ties going to the lower index.
IndexLists top_k_rows(const Tensor& scores, std::size_t k);
// Mean of the k largest entries of each row.
std::vector<double> top_k_mean_rows(const Tensor& scores, std::size_t k);
// 1 + number of columns ranked ahead of the best gold column of each row.
std::vector<std::size_t> best_gold_ranks(const Tensor& scores, const IndexLists& gold);

}  // namespace serial

namespace parallel {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor order_similarity(const Tensor& captions, const Tensor& images);
IndexLists top_k_rows(const Tensor& scores, std::size_t k);
std::vector<double> top_k_mean_rows(const Tensor& scores, std::size_t k);
std::vector<std::size_t> best_gold_ranks(const Tensor& scores, const IndexLists& gold);

}  // namespace parallel

// Building blocks shared by both variants.
namespace detail {

double dot(std::span<const double> a, std::span<const double> b);
double order_penalty(std::span<const double> caption, std::span<const double> image);
std::vector<Index> top_k(std::span<const double> row, std::size_t k);
std::size_t best_gold_rank(std::span<const double> row, std::span<const Index> gold);

}  // namespace detail

}  // namespace ame::kernels
