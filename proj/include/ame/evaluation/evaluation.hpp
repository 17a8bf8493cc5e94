// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ame/data/dataset.hpp"
#include "ame/encoders/model.hpp"
#include "ame/numerics/kernels.hpp"
#include "ame/similarity/similarity.hpp"

namespace ame {

enum class Direction { I2T, T2I, X2Y, Y2X };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

struct RetrievalReport {
  Direction direction = Direction::I2T;
  double r1 = 0.0;  // percentages
  double r5 = 0.0;
  double r10 = 0.0;
  double median_rank = 1.0;
  std::size_t folds = 1;
  double alignment = std::numeric_limits<double>::quiet_NaN();  // percentage, NaN when not measured
};

// Per query row, 1 + the number of columns ahead of its best gold column;
// equal scores put the lower column index ahead. ContractError when a query
// has no gold column or a gold index is out of range.
std::vector<std::size_t> rank_matrix(const Tensor& scores, const kernels::IndexLists& gold);
inline std::vector<std::size_t> rank_matrix(const SimilarityMatrix& s, const kernels::IndexLists& gold) {
  return rank_matrix(s.values, gold);
}

// 100 * |{rank <= k}| / count. ConfigError for k < 1, ContractError when empty.
double recall_at_k(std::span<const std::size_t> ranks, std::size_t k);
// Lower median. ContractError when empty.
double median_rank(std::span<const std::size_t> ranks);

// R@1/5/10 and median rank from a score matrix (rows are queries).
RetrievalReport report_from_scores(const Tensor& scores, const kernels::IndexLists& gold, Direction direction);

// Orientation of the asymmetric similarity when both sides are captions.
// CandidateAsImage: P(q, c) = S(c, q), the candidate in the image slot, as
// P(caption, image) = S(image, caption). QueryAsImage swaps the roles.
enum class CaptionOrientation { CandidateAsImage, QueryAsImage };

struct EvalOptions {
  std::size_t folds = 1;
  Lang language = Lang::X;  // caption language for image-text retrieval
  CaptionOrientation orientation = CaptionOrientation::CandidateAsImage;
};

// Image-to-text or text-to-image retrieval on one set of images.
// i2t: queries are images, gold = that image's captions.
// t2i: queries are captions, gold = the paired image.
RetrievalReport evaluate_fold(const AmeModel& model, const CaptionDataset& data, Direction direction,
                              Lang language = Lang::X);

// Splits the images (first-appearance order) into `folds` contiguous parts
// of near-equal size and averages recalls and medians over them.
// ConfigError when there are fewer images than folds.
RetrievalReport evaluate_retrieval(const AmeModel& model, const CaptionDataset& data, Direction direction,
                                   const EvalOptions& options = {});

// Caption-to-caption retrieval across languages (x2y or y2x): candidates
// are the other language's captions, gold = captions of the same image.
RetrievalReport caption_caption_eval(const AmeModel& model, const CaptionDataset& data, Direction direction,
                                     const EvalOptions& options = {});

// Averages per-fold reports field by field.
RetrievalReport average_reports(const std::vector<RetrievalReport>& folds);

// "task,direction,folds,r1,r5,r10,median_rank,alignment" with one row per report.
void write_report_csv(std::ostream& os, std::string_view task, const std::vector<RetrievalReport>& reports);
// Aligned text table in the column order R@1, R@5, R@10, Mr, Alignment.
void write_report_table(std::ostream& os, const std::vector<RetrievalReport>& reports);

}  // namespace ame
