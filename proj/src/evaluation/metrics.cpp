// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>

#include "ame/error.hpp"
#include "ame/evaluation/evaluation.hpp"

namespace ame {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::I2T: return "i2t";
    case Direction::T2I: return "t2i";
    case Direction::X2Y: return "x2y";
    case Direction::Y2X: return "y2x";
  }
  return "i2t";
}

Direction parse_direction(std::string_view text) {
  if (text == "i2t") return Direction::I2T;
  if (text == "t2i") return Direction::T2I;
  if (text == "x2y") return Direction::X2Y;
  if (text == "y2x") return Direction::Y2X;
  throw ConfigError("unknown direction '" + std::string(text) + "' (expected i2t, t2i, x2y or y2x)");
}

std::vector<std::size_t> rank_matrix(const Tensor& scores, const kernels::IndexLists& gold) {
  if (gold.size() != scores.rows()) {
    throw DimensionError("rank_matrix: " + std::to_string(gold.size()) + " gold lists for " +
                         std::to_string(scores.rows()) + " queries");
  }
  for (std::size_t q = 0; q < gold.size(); ++q) {
    if (gold[q].empty()) throw ContractError("rank_matrix: query " + std::to_string(q) + " has no gold item");
    for (auto g : gold[q]) {
      if (g >= scores.cols()) throw ContractError("rank_matrix: gold index out of range");
    }
  }
  return kernels::parallel::best_gold_ranks(scores, gold);
}

double recall_at_k(std::span<const std::size_t> ranks, std::size_t k) {
  if (k < 1) throw ConfigError("recall_at_k: k must be at least 1");
  if (ranks.empty()) throw ContractError("recall_at_k: empty rank list");
  const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double median_rank(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw ContractError("median_rank: empty rank list");
  std::vector<std::size_t> sorted(ranks.begin(), ranks.end());
  const std::size_t mid = (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  return static_cast<double>(sorted[mid]);
}

RetrievalReport report_from_scores(const Tensor& scores, const kernels::IndexLists& gold, Direction direction) {
  const auto ranks = rank_matrix(scores, gold);
  RetrievalReport r;
  r.direction = direction;
  r.r1 = recall_at_k(ranks, 1);
  r.r5 = recall_at_k(ranks, 5);
  r.r10 = recall_at_k(ranks, 10);
  r.median_rank = median_rank(ranks);
  r.folds = 1;
  return r;
}

RetrievalReport average_reports(const std::vector<RetrievalReport>& folds) {
  if (folds.empty()) throw ContractError("average_reports: no folds");
  RetrievalReport out = folds.front();
  out.r1 = out.r5 = out.r10 = out.median_rank = 0.0;
  double alignment = 0.0;
  for (const auto& f : folds) {
    out.r1 += f.r1;
    out.r5 += f.r5;
    out.r10 += f.r10;
    out.median_rank += f.median_rank;
    alignment += f.alignment;
  }
  const double n = static_cast<double>(folds.size());
  out.r1 /= n;
  out.r5 /= n;
  out.r10 /= n;
  out.median_rank /= n;
  out.alignment = alignment / n;
  out.folds = folds.size();
  return out;
}

}  // namespace ame
