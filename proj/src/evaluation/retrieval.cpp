// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "ame/error.hpp"
#include "ame/evaluation/evaluation.hpp"
#include "ame/numerics/ops.hpp"

namespace ame {

namespace {

struct EncodedCaptions {
  Tensor vectors;
  std::vector<std::size_t> image;  // position of the caption's image in the fold
};

std::vector<std::uint64_t> images_with(const CaptionDataset& data, std::initializer_list<Lang> langs) {
  std::vector<std::uint64_t> ids;
  for (auto id : data.image_order()) {
    bool all = true;
    for (Lang l : langs) all = all && !data.captions_of(id, l).empty();
    if (all) ids.push_back(id);
  }
  return ids;
}

Tensor encode_fold_images(const AmeModel& model, const CaptionDataset& data, const std::vector<std::uint64_t>& ids) {
  const auto& images = data.images();
  Tensor features({ids.size(), images.dim()});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto src = images.matrix().row(images.row_of(ids[i]));
    std::copy(src.begin(), src.end(), features.row(i).begin());
  }
  return model.encode_images(features);
}

EncodedCaptions encode_fold_captions(const AmeModel& model, const CaptionDataset& data,
                                     const std::vector<std::uint64_t>& ids, Lang lang) {
  std::vector<std::vector<TokenId>> tokens;
  EncodedCaptions out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (auto rec : data.captions_of(ids[i], lang)) {
      tokens.push_back(data.records()[rec].tokens);
      out.image.push_back(i);
    }
  }
  out.vectors = model.encode_captions(tokens, lang);
  return out;
}

std::vector<std::uint64_t> require_images(const CaptionDataset& data, std::initializer_list<Lang> langs,
                                          const char* what) {
  auto ids = images_with(data, langs);
  if (ids.empty()) throw ConfigError(std::string(what) + ": no images with captions in the requested language");
  return ids;
}

template <typename FoldFn>
RetrievalReport over_folds(const std::vector<std::uint64_t>& ids, std::size_t folds, FoldFn fn) {
  if (folds == 0) throw ConfigError("fold count must be at least 1");
  if (folds > ids.size()) {
    throw ConfigError("cannot split " + std::to_string(ids.size()) + " images into " + std::to_string(folds) +
                      " folds");
  }
  std::vector<RetrievalReport> reports;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t begin = f * ids.size() / folds, end = (f + 1) * ids.size() / folds;
    reports.push_back(fn(std::vector<std::uint64_t>(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                                                    ids.begin() + static_cast<std::ptrdiff_t>(end))));
  }
  return average_reports(reports);
}

RetrievalReport retrieval_on(const AmeModel& model, const CaptionDataset& data, const std::vector<std::uint64_t>& ids,
                             Direction direction, Lang lang) {
  const Tensor images = encode_fold_images(model, data, ids);
  const EncodedCaptions captions = encode_fold_captions(model, data, ids, lang);
  const Tensor p = similarity_matrix(captions.vectors, images, model.mode).values;
  if (direction == Direction::T2I) {
    kernels::IndexLists gold(captions.image.size());
    for (std::size_t c = 0; c < gold.size(); ++c) gold[c] = {static_cast<kernels::Index>(captions.image[c])};
    return report_from_scores(p, gold, direction);
  }
  kernels::IndexLists gold(ids.size());
  for (std::size_t c = 0; c < captions.image.size(); ++c) {
    gold[captions.image[c]].push_back(static_cast<kernels::Index>(c));
  }
  return report_from_scores(transpose(p), gold, direction);
}

RetrievalReport caption_on(const AmeModel& model, const CaptionDataset& data, const std::vector<std::uint64_t>& ids,
                           Direction direction, CaptionOrientation orientation) {
  const Lang src = direction == Direction::X2Y ? Lang::X : Lang::Y;
  const Lang tgt = direction == Direction::X2Y ? Lang::Y : Lang::X;
  const EncodedCaptions queries = encode_fold_captions(model, data, ids, src);
  const EncodedCaptions candidates = encode_fold_captions(model, data, ids, tgt);
  Tensor scores;
  if (model.mode == Mode::Symmetric) {
    scores = kernels::parallel::matmul_nt(queries.vectors, candidates.vectors);
  } else if (orientation == CaptionOrientation::CandidateAsImage) {
    scores = kernels::parallel::order_similarity(queries.vectors, candidates.vectors);
  } else {
    scores = transpose(kernels::parallel::order_similarity(candidates.vectors, queries.vectors));
  }
  std::vector<std::vector<kernels::Index>> by_image(ids.size());
  for (std::size_t c = 0; c < candidates.image.size(); ++c) {
    by_image[candidates.image[c]].push_back(static_cast<kernels::Index>(c));
  }
  kernels::IndexLists gold(queries.image.size());
  for (std::size_t q = 0; q < gold.size(); ++q) gold[q] = by_image[queries.image[q]];
  return report_from_scores(scores, gold, direction);
}

}  // namespace

RetrievalReport evaluate_fold(const AmeModel& model, const CaptionDataset& data, Direction direction, Lang language) {
  if (direction != Direction::I2T && direction != Direction::T2I) {
    throw ConfigError("evaluate_fold: direction must be i2t or t2i");
  }
  return retrieval_on(model, data, require_images(data, {language}, "evaluate_fold"), direction, language);
}

RetrievalReport evaluate_retrieval(const AmeModel& model, const CaptionDataset& data, Direction direction,
                                   const EvalOptions& options) {
  if (direction != Direction::I2T && direction != Direction::T2I) {
    throw ConfigError("retrieval direction must be i2t or t2i");
  }
  const auto ids = require_images(data, {options.language}, "evaluate_retrieval");
  return over_folds(ids, options.folds, [&](const std::vector<std::uint64_t>& fold) {
    return retrieval_on(model, data, fold, direction, options.language);
  });
}

RetrievalReport caption_caption_eval(const AmeModel& model, const CaptionDataset& data, Direction direction,
                                     const EvalOptions& options) {
  if (direction != Direction::X2Y && direction != Direction::Y2X) {
    throw ConfigError("caption task direction must be x2y or y2x");
  }
  if (!data.has_language(Lang::X) || !data.has_language(Lang::Y)) {
    throw ConfigError("caption task needs captions in both languages");
  }
  const auto ids = require_images(data, {Lang::X, Lang::Y}, "caption_caption_eval");
  return over_folds(ids, options.folds, [&](const std::vector<std::uint64_t>& fold) {
    return caption_on(model, data, fold, direction, options.orientation);
  });
}

}  // namespace ame
