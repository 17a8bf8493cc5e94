// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ame/alignment/linear_map.hpp"
#include "ame/alignment/neighborhoods.hpp"
#include "ame/data/io.hpp"
#include "ame/numerics/tensor.hpp"
#include "ame/similarity/similarity.hpp"

namespace ame {

struct LossBreakdown {
  double ranking = 0.0;
  double alignment = 0.0;
  double total = 0.0;
  std::size_t active_hinges = 0;
};

// Which image column each caption row belongs to, and which language group
// it is in. Columns carry image ids so duplicated images never act as each
// other's negatives.
struct RankingLayout {
  std::vector<std::size_t> gold_column;     // per caption row
  std::vector<std::uint8_t> group;          // per caption row (language slot)
  std::vector<std::uint64_t> column_image;  // per image column

  // Square single-group layout with gold pairs on the diagonal.
  static RankingLayout diagonal(std::size_t n);
};

struct RankingLoss {
  double value = 0.0;
  Tensor grad;  // dL/dP, same shape as P
  std::size_t active_hinges = 0;
};

// Bidirectional hinge loss summed over gold pairs (c, i):
//   sum_{c'} max(0, margin - P(c,i) + P(c',i)) + sum_{j} max(0, margin - P(c,i) + P(c,j))
// where c' ranges over captions of other images in the same language group
// and j over other images. Throws ConfigError for margin <= 0.
RankingLoss ranking_loss(const SimilarityMatrix& p, const RankingLayout& layout, double margin);
RankingLoss ranking_loss(const SimilarityMatrix& p, double margin);

struct RcslsLoss {
  double value = 0.0;
  Tensor grad_map;  // d x d
  Tensor grad_src;  // same shape as the source table
  Tensor grad_tgt;  // same shape as the target table
};

// Relaxed CSLS objective over lexicon pairs (s_i, t_i):
//   (1/n) sum_i [ -2 (W x_i).y_i + (1/k) sum_{y_j in N_Y(W x_i)} (W x_i).y_j
//                                + (1/k) sum_{W x_j in N_X(y_i)} (W x_j).y_i ]
// Neighbourhoods are treated as fixed sets. When `expected_stamp` is given,
// a cache computed for another cycle is rejected with ContractError.
RcslsLoss rcsls_loss(const Tensor& src_table, const Tensor& tgt_table, std::span<const TokenPair> pairs,
                     const LinearMap& map, const NeighborhoodCache& cache, std::size_t k,
                     std::optional<std::int64_t> expected_stamp = std::nullopt);

// Least-squares W minimising (1/n) sum ||W x_i - y_i||^2 via the normal
// equations. Rows of x and y are the paired vectors. Throws NumericError
// when X^T X is singular.
LinearMap least_squares_map(const Tensor& x, const Tensor& y);

inline double total_loss(double ranking, double alignment) { return ranking + alignment; }

}  // namespace ame
