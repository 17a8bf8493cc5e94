// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ame/alignment/linear_map.hpp"
#include "ame/alignment/neighborhoods.hpp"
#include "ame/data/io.hpp"
#include "ame/numerics/kernels.hpp"
#include "ame/numerics/tensor.hpp"

namespace ame {

using Pool = std::vector<kernels::Index>;

// Every non-reserved row of a table, ascending.
Pool full_pool(const Tensor& table);

// N_Y(W x_s) over `tgt_pool` and N_X(y_t) over the mapped `src_pool` for
// every lexicon pair, by dot product, ties to the lower row index. The true
// translation stays in the pool. Throws ConfigError when k is 0 or exceeds
// either pool. Pools must be ascending.
NeighborhoodCache compute_neighborhoods(const Tensor& src_table, const Tensor& tgt_table,
                                        std::span<const TokenPair> pairs, const LinearMap& map, std::size_t k,
                                        const Pool& src_pool, const Pool& tgt_pool, std::int64_t stamp);

struct Translation {
  kernels::Index target;
  double score;
};

// CSLS scoring against a fixed pair of pools:
//   score(x, y) = 2 cos(Wx, y) - r_Y(Wx) - r_X(y)
// r_X(y) is precomputed for the whole target pool at construction.
class CslsIndex {
 public:
  CslsIndex(const Tensor& src_table, const Tensor& tgt_table, const LinearMap& map, std::size_t k, Pool src_pool,
            Pool tgt_pool);

  // Scores of source row `s` against every target pool entry, pool order.
  std::vector<double> scores(kernels::Index s) const;
  // All targets, best first; equal scores go to the lower row index.
  std::vector<Translation> translate(kernels::Index s) const;
  // Highest scoring target row.
  kernels::Index best(kernels::Index s) const;

  const Pool& target_pool() const noexcept { return tgt_pool_; }
  std::size_t k() const noexcept { return k_; }

 private:
  std::vector<double> mapped(kernels::Index s) const;

  const Tensor* src_;
  const Tensor* tgt_;
  const LinearMap* map_;
  std::size_t k_;
  Pool src_pool_;
  Pool tgt_pool_;
  Tensor mapped_sources_;  // |src_pool| x d, rows W x_j
  Tensor targets_;         // |tgt_pool| x d
  std::vector<double> r_x_;
};

std::vector<Translation> csls_translate(kernels::Index s, const Tensor& src_table, const Tensor& tgt_table,
                                        const LinearMap& map, std::size_t k);

// Fraction of distinct eval sources whose CSLS top-1 translation is one of
// their gold targets. Throws ConfigError for an empty eval set.
double alignment_ratio(std::span<const TokenPair> eval_pairs, const Tensor& src_table, const Tensor& tgt_table,
                       const LinearMap& map, std::size_t k);
double alignment_ratio(std::span<const TokenPair> eval_pairs, const CslsIndex& index);

struct AlignmentUpdateOptions {
  std::size_t k = 5;
  double lr_align = 2.0;
  bool update_tables = true;  // move lexicon rows as well as W
};

struct AlignmentUpdateResult {
  double loss_before = 0.0;
  NeighborhoodCache neighborhoods;
};

// One cycle: fresh neighbourhoods, a plain gradient step on the RCSLS loss
// for W and the lexicon rows, projection of W onto the orthogonal group,
// renormalisation of the moved rows. `stamp` identifies the cycle.
AlignmentUpdateResult alignment_update(Tensor& src_table, Tensor& tgt_table, LinearMap& map,
                                       std::span<const TokenPair> pairs, const AlignmentUpdateOptions& options,
                                       std::int64_t stamp);

}  // namespace ame
