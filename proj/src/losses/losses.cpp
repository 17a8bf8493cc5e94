// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/losses/losses.hpp"

#include <string>

#include "ame/error.hpp"
#include "ame/numerics/ops.hpp"

namespace ame {

RankingLayout RankingLayout::diagonal(std::size_t n) {
  RankingLayout layout;
  layout.gold_column.resize(n);
  layout.group.assign(n, 0);
  layout.column_image.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    layout.gold_column[i] = i;
    layout.column_image[i] = i;
  }
  return layout;
}

RankingLoss ranking_loss(const SimilarityMatrix& p, const RankingLayout& layout, double margin) {
  if (!(margin > 0.0)) throw ConfigError("ranking margin must be positive, got " + std::to_string(margin));
  const Tensor& s = p.values;
  const std::size_t rows = s.rows(), cols = s.cols();
  if (layout.gold_column.size() != rows || layout.group.size() != rows || layout.column_image.size() != cols) {
    throw DimensionError("ranking_loss: layout does not match similarity matrix " + shape_str(s.shape()));
  }
  for (std::size_t g : layout.gold_column) {
    if (g >= cols) throw ContractError("ranking_loss: gold column out of range");
  }

  RankingLoss out{0.0, Tensor(s.shape()), 0};
  for (std::size_t c = 0; c < rows; ++c) {
    const std::size_t g = layout.gold_column[c];
    const std::uint64_t gold_image = layout.column_image[g];
    const double pos = s(c, g);
    // contrastive images for caption c
    for (std::size_t j = 0; j < cols; ++j) {
      if (layout.column_image[j] == gold_image) continue;
      const double h = margin - pos + s(c, j);
      if (h > 0.0) {
        out.value += h;
        out.grad(c, g) -= 1.0;
        out.grad(c, j) += 1.0;
        ++out.active_hinges;
      }
    }
    // contrastive captions (same language) for image g
    for (std::size_t c2 = 0; c2 < rows; ++c2) {
      if (layout.group[c2] != layout.group[c]) continue;
      if (layout.column_image[layout.gold_column[c2]] == gold_image) continue;
      const double h = margin - pos + s(c2, g);
      if (h > 0.0) {
        out.value += h;
        out.grad(c, g) -= 1.0;
        out.grad(c2, g) += 1.0;
        ++out.active_hinges;
      }
    }
  }
  return out;
}

RankingLoss ranking_loss(const SimilarityMatrix& p, double margin) {
  if (p.captions() != p.images()) throw DimensionError("ranking_loss: diagonal layout needs a square matrix");
  return ranking_loss(p, RankingLayout::diagonal(p.captions()), margin);
}

RcslsLoss rcsls_loss(const Tensor& src_table, const Tensor& tgt_table, std::span<const TokenPair> pairs,
                     const LinearMap& map, const NeighborhoodCache& cache, std::size_t k,
                     std::optional<std::int64_t> expected_stamp) {
  const Tensor& w = map.w;
  const std::size_t d = w.rows();
  if (w.cols() != d || src_table.cols() != d || tgt_table.cols() != d) {
    throw DimensionError("rcsls_loss: map " + shape_str(w.shape()) + " incompatible with tables " +
                         shape_str(src_table.shape()) + " and " + shape_str(tgt_table.shape()));
  }
  if (k == 0) throw ConfigError("rcsls_loss: k must be at least 1");
  if (pairs.empty()) throw ConfigError("rcsls_loss: empty lexicon");
  if (cache.k != k || cache.pairs() != pairs.size() || cache.source_neighbors.size() != pairs.size()) {
    throw ContractError("rcsls_loss: neighbourhood cache does not match lexicon or k");
  }
  if (expected_stamp && cache.stamp != *expected_stamp) {
    throw ContractError("rcsls_loss: stale neighbourhood cache (stamp " + std::to_string(cache.stamp) +
                        ", expected " + std::to_string(*expected_stamp) + ")");
  }

  RcslsLoss out{0.0, Tensor({d, d}), Tensor(src_table.shape()), Tensor(tgt_table.shape())};
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  const double inv_k = 1.0 / static_cast<double>(k);

  auto apply = [&](std::span<const double> x) {
    std::vector<double> y(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) y[i] = dot(w.row(i), x);
    return y;
  };
  // out += scale * W^T v
  auto add_wt = [&](std::span<double> out_row, std::span<const double> v, double scale) {
    for (std::size_t i = 0; i < d; ++i) {
      const double vi = scale * v[i];
      if (vi == 0.0) continue;
      const auto wr = w.row(i);
      for (std::size_t j = 0; j < d; ++j) out_row[j] += vi * wr[j];
    }
  };
  // grad_map += scale * a b^T
  auto add_outer = [&](std::span<const double> a, std::span<const double> b, double scale) {
    for (std::size_t i = 0; i < d; ++i) {
      const double ai = scale * a[i];
      for (std::size_t j = 0; j < d; ++j) out.grad_map(i, j) += ai * b[j];
    }
  };

  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [s, t] = pairs[p];
    if (s >= src_table.rows() || t >= tgt_table.rows()) throw ContractError("rcsls_loss: lexicon index out of range");
    const auto& tn = cache.target_neighbors[p];
    const auto& sn = cache.source_neighbors[p];
    if (tn.size() != k || sn.size() != k) throw ContractError("rcsls_loss: neighbourhood list does not have k entries");
    const auto x = src_table.row(s);
    const auto y = tgt_table.row(t);
    const auto wx = apply(x);

    double term = -2.0 * dot(wx, y);
    std::vector<double> y_sum(d, 0.0);   // sum of target neighbours
    std::vector<double> wx_sum(d, 0.0);  // sum of mapped source neighbours
    for (auto j : tn) {
      const auto yj = tgt_table.row(j);
      term += inv_k * dot(wx, yj);
      for (std::size_t q = 0; q < d; ++q) y_sum[q] += yj[q];
      // d/dy_j
      auto gy = out.grad_tgt.row(j);
      for (std::size_t q = 0; q < d; ++q) gy[q] += inv_n * inv_k * wx[q];
    }
    for (auto j : sn) {
      const auto xj = src_table.row(j);
      const auto wxj = apply(xj);
      term += inv_k * dot(wxj, y);
      for (std::size_t q = 0; q < d; ++q) wx_sum[q] += wxj[q];
      // d/dx_j and d/dW of (W x_j).y
      add_wt(out.grad_src.row(j), y, inv_n * inv_k);
      add_outer(y, xj, inv_n * inv_k);
    }
    out.value += inv_n * term;

    // d/dW of the first two terms: (-2 y + y_sum/k) x^T
    std::vector<double> coeff(d);
    for (std::size_t q = 0; q < d; ++q) coeff[q] = -2.0 * y[q] + inv_k * y_sum[q];
    add_outer(coeff, x, inv_n);
    add_wt(out.grad_src.row(s), coeff, inv_n);
    auto gt = out.grad_tgt.row(t);
    for (std::size_t q = 0; q < d; ++q) gt[q] += inv_n * (-2.0 * wx[q] + inv_k * wx_sum[q]);
  }
  return out;
}

LinearMap least_squares_map(const Tensor& x, const Tensor& y) {
  if (x.rank() != 2 || !x.same_shape(y)) {
    throw DimensionError("least_squares_map: shapes " + shape_str(x.shape()) + " and " + shape_str(y.shape()));
  }
  const Tensor xt = transpose(x);
  Tensor wt;
  try {
    wt = solve(matmul(xt, x), matmul(xt, y));
  } catch (const NumericError&) {
    throw NumericError("least_squares_map: normal matrix X^T X is singular");
  }
  return {transpose(wt), -1};
}

}  // namespace ame
