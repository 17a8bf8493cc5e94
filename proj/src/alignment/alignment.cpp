// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/alignment/alignment.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "ame/data/vocabulary.hpp"
#include "ame/error.hpp"
#include "ame/losses/losses.hpp"
#include "ame/numerics/ops.hpp"

namespace ame {

namespace {

Tensor gather(const Tensor& table, std::span<const kernels::Index> rows) {
  const std::size_t d = table.cols();
  Tensor out({rows.size(), d});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= table.rows()) throw ContractError("row index " + std::to_string(rows[i]) + " out of range");
    std::copy_n(table.row(rows[i]).begin(), d, out.row(i).begin());
  }
  return out;
}

void check_map(const Tensor& src, const Tensor& tgt, const LinearMap& map) {
  const std::size_t d = map.dim();
  if (map.w.rows() != d || map.w.cols() != d || src.cols() != d || tgt.cols() != d) {
    throw DimensionError("alignment: map " + shape_str(map.w.shape()) + " vs tables " + shape_str(src.shape()) +
                         ", " + shape_str(tgt.shape()));
  }
}

void check_k(std::size_t k, const Pool& src_pool, const Pool& tgt_pool) {
  if (k == 0) throw ConfigError("k must be at least 1");
  if (k > src_pool.size() || k > tgt_pool.size()) {
    throw ConfigError("k = " + std::to_string(k) + " exceeds candidate pool (" + std::to_string(src_pool.size()) +
                      " sources, " + std::to_string(tgt_pool.size()) + " targets)");
  }
}

void remap(kernels::IndexLists& lists, const Pool& pool) {
  for (auto& list : lists) {
    for (auto& j : list) j = pool[j];
  }
}

}  // namespace

Pool full_pool(const Tensor& table) {
  Pool pool;
  for (std::size_t r = Vocabulary::kFirstWord; r < table.rows(); ++r) pool.push_back(static_cast<kernels::Index>(r));
  return pool;
}

NeighborhoodCache compute_neighborhoods(const Tensor& src_table, const Tensor& tgt_table,
                                        std::span<const TokenPair> pairs, const LinearMap& map, std::size_t k,
                                        const Pool& src_pool, const Pool& tgt_pool, std::int64_t stamp) {
  check_map(src_table, tgt_table, map);
  check_k(k, src_pool, tgt_pool);

  std::vector<kernels::Index> sources, targets;
  sources.reserve(pairs.size());
  targets.reserve(pairs.size());
  for (const auto& [s, t] : pairs) {
    sources.push_back(s);
    targets.push_back(t);
  }
  // rows W x
  const Tensor mapped_queries = matmul_nt(gather(src_table, sources), map.w);
  const Tensor mapped_pool = matmul_nt(gather(src_table, src_pool), map.w);
  const Tensor target_pool = gather(tgt_table, tgt_pool);

  NeighborhoodCache cache;
  cache.k = k;
  cache.stamp = stamp;
  cache.target_neighbors = kernels::parallel::top_k_rows(kernels::parallel::matmul_nt(mapped_queries, target_pool), k);
  cache.source_neighbors =
      kernels::parallel::top_k_rows(kernels::parallel::matmul_nt(gather(tgt_table, targets), mapped_pool), k);
  remap(cache.target_neighbors, tgt_pool);
  remap(cache.source_neighbors, src_pool);
  return cache;
}

CslsIndex::CslsIndex(const Tensor& src_table, const Tensor& tgt_table, const LinearMap& map, std::size_t k,
                     Pool src_pool, Pool tgt_pool)
    : src_(&src_table),
      tgt_(&tgt_table),
      map_(&map),
      k_(k),
      src_pool_(std::move(src_pool)),
      tgt_pool_(std::move(tgt_pool)) {
  check_map(src_table, tgt_table, map);
  check_k(k, src_pool_, tgt_pool_);
  mapped_sources_ = matmul_nt(gather(src_table, src_pool_), map.w);
  targets_ = gather(tgt_table, tgt_pool_);
  r_x_ = kernels::parallel::top_k_mean_rows(kernels::parallel::matmul_nt(targets_, mapped_sources_), k);
}

std::vector<double> CslsIndex::mapped(kernels::Index s) const {
  if (s >= src_->rows()) throw ContractError("source row " + std::to_string(s) + " out of range");
  const std::size_t d = map_->dim();
  std::vector<double> wx(d);
  for (std::size_t i = 0; i < d; ++i) wx[i] = kernels::detail::dot(map_->w.row(i), src_->row(s));
  return wx;
}

std::vector<double> CslsIndex::scores(kernels::Index s) const {
  const auto wx = mapped(s);
  std::vector<double> cos(tgt_pool_.size());
  for (std::size_t j = 0; j < tgt_pool_.size(); ++j) cos[j] = kernels::detail::dot(wx, targets_.row(j));
  // r_Y(Wx): mean of the k largest cosines
  std::vector<double> sorted = cos;
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k_), sorted.end(),
                    std::greater<>());
  double r_y = 0.0;
  for (std::size_t j = 0; j < k_; ++j) r_y += sorted[j];
  r_y /= static_cast<double>(k_);
  for (std::size_t j = 0; j < cos.size(); ++j) cos[j] = 2.0 * cos[j] - r_y - r_x_[j];
  return cos;
}

std::vector<Translation> CslsIndex::translate(kernels::Index s) const {
  const auto sc = scores(s);
  std::vector<Translation> out(sc.size());
  for (std::size_t j = 0; j < sc.size(); ++j) out[j] = {tgt_pool_[j], sc[j]};
  std::stable_sort(out.begin(), out.end(), [](const Translation& a, const Translation& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.target < b.target;
  });
  return out;
}

kernels::Index CslsIndex::best(kernels::Index s) const {
  const auto sc = scores(s);
  std::size_t arg = 0;
  for (std::size_t j = 1; j < sc.size(); ++j) {
    if (sc[j] > sc[arg] || (sc[j] == sc[arg] && tgt_pool_[j] < tgt_pool_[arg])) arg = j;
  }
  return tgt_pool_[arg];
}

std::vector<Translation> csls_translate(kernels::Index s, const Tensor& src_table, const Tensor& tgt_table,
                                        const LinearMap& map, std::size_t k) {
  return CslsIndex(src_table, tgt_table, map, k, full_pool(src_table), full_pool(tgt_table)).translate(s);
}

double alignment_ratio(std::span<const TokenPair> eval_pairs, const CslsIndex& index) {
  if (eval_pairs.empty()) throw ConfigError("alignment_ratio: empty evaluation lexicon");
  std::map<TokenId, std::set<TokenId>> gold;
  for (const auto& [s, t] : eval_pairs) gold[s].insert(t);
  std::size_t hits = 0;
  for (const auto& [s, targets] : gold) {
    if (targets.count(index.best(s)) != 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double alignment_ratio(std::span<const TokenPair> eval_pairs, const Tensor& src_table, const Tensor& tgt_table,
                       const LinearMap& map, std::size_t k) {
  if (eval_pairs.empty()) throw ConfigError("alignment_ratio: empty evaluation lexicon");
  return alignment_ratio(eval_pairs,
                         CslsIndex(src_table, tgt_table, map, k, full_pool(src_table), full_pool(tgt_table)));
}

AlignmentUpdateResult alignment_update(Tensor& src_table, Tensor& tgt_table, LinearMap& map,
                                       std::span<const TokenPair> pairs, const AlignmentUpdateOptions& options,
                                       std::int64_t stamp) {
  if (pairs.empty()) throw ConfigError("alignment_update: empty training lexicon");
  AlignmentUpdateResult result;
  result.neighborhoods = compute_neighborhoods(src_table, tgt_table, pairs, map, options.k, full_pool(src_table),
                                               full_pool(tgt_table), stamp);
  const RcslsLoss loss = rcsls_loss(src_table, tgt_table, pairs, map, result.neighborhoods, options.k, stamp);
  result.loss_before = loss.value;
  require_finite(loss.grad_map, "alignment gradient of W");

  const double lr = options.lr_align;
  for (std::size_t i = 0; i < map.w.size(); ++i) map.w[i] -= lr * loss.grad_map[i];
  if (options.update_tables) {
    std::set<TokenId> src_rows, tgt_rows;
    for (const auto& [s, t] : pairs) {
      src_rows.insert(s);
      tgt_rows.insert(t);
    }
    auto step_rows = [lr](Tensor& table, const Tensor& grad, const std::set<TokenId>& rows) {
      for (TokenId r : rows) {
        auto row = table.row(r);
        const auto g = grad.row(r);
        for (std::size_t q = 0; q < row.size(); ++q) row[q] -= lr * g[q];
        l2_normalize_inplace(row);
      }
    };
    step_rows(src_table, loss.grad_src, src_rows);
    step_rows(tgt_table, loss.grad_tgt, tgt_rows);
  }
  map.w = svd_orthogonal_projection(map.w);
  map.last_projection_step = stamp;
  return result;
}

}  // namespace ame
