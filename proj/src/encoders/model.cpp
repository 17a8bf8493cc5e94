// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/encoders/model.hpp"

#include <exception>
#include <random>

#include "ame/error.hpp"

namespace ame {

namespace {

// Runs body(i) for i in [0, n) across threads, rethrowing the first
// exception on the calling thread.
template <typename Body>
void parallel_rows(std::size_t n, Body body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(ame_model_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

AmeModel AmeModel::create(const ModelDims& dims, Mode mode, Tensor emb_x, Tensor emb_y, std::uint64_t seed) {
  if (dims.word_dim == 0 || dims.joint_dim == 0 || dims.feature_dim == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  for (const Tensor* t : {&emb_x, &emb_y}) {
    if (t->rank() != 2 || t->cols() != dims.word_dim || t->rows() < Vocabulary::kFirstWord) {
      throw DimensionError("embedding table " + shape_str(t->shape()) + " does not have d = " +
                           std::to_string(dims.word_dim) + " columns and the reserved rows");
    }
  }
  AmeModel model;
  model.dims = dims;
  model.mode = mode;
  std::mt19937_64 rng(seed);
  model.params.add(std::string(param::kEmbX), std::move(emb_x));
  model.params.add(std::string(param::kEmbY), std::move(emb_y));
  add_gru_params(model.params, dims.word_dim, dims.joint_dim, rng);
  add_projector_params(model.params, dims.feature_dim, dims.joint_dim, rng);
  model.map = LinearMap::identity(dims.word_dim);
  return model;
}

const Tensor& AmeModel::table(Lang lang) const { return params.value(table_param(lang)); }
Tensor& AmeModel::table(Lang lang) { return params.value(table_param(lang)); }

JointVector AmeModel::encode_caption(std::span<const TokenId> tokens, Lang lang) const {
  return ame::encode_caption(tokens, table(lang), gru(), mode);
}

JointVector AmeModel::encode_image(std::span<const double> feature) const {
  return ame::encode_image(feature, projector(), mode);
}

Tensor AmeModel::encode_captions(const std::vector<std::vector<TokenId>>& captions, Lang lang) const {
  Tensor out({captions.size(), dims.joint_dim});
  const GruView g = gru();
  const Tensor& t = table(lang);
  parallel_rows(captions.size(), [&](std::size_t i) {
    const JointVector v = ame::encode_caption(captions[i], t, g, mode);
    std::copy(v.values.values().begin(), v.values.values().end(), out.row(i).begin());
  });
  return out;
}

Tensor AmeModel::encode_images(const Tensor& features) const {
  if (features.cols() != dims.feature_dim) {
    throw DimensionError("image features " + shape_str(features.shape()) + " vs D = " +
                         std::to_string(dims.feature_dim));
  }
  Tensor out({features.rows(), dims.joint_dim});
  const ProjectorView p = projector();
  parallel_rows(features.rows(), [&](std::size_t i) {
    const JointVector v = ame::encode_image(features.row(i), p, mode);
    std::copy(v.values.values().begin(), v.values.values().end(), out.row(i).begin());
  });
  return out;
}

}  // namespace ame
