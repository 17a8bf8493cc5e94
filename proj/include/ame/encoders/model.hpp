// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ame/alignment/linear_map.hpp"
#include "ame/data/dataset.hpp"
#include "ame/encoders/encoders.hpp"
#include "ame/numerics/param_set.hpp"

namespace ame {

struct ModelDims {
  std::size_t word_dim = 0;     // d
  std::size_t joint_dim = 0;    // m
  std::size_t feature_dim = 0;  // D
};

// Embedding tables, shared GRU, image head and the alignment map W.
// W is not in the ParamSet: Adam never touches it.
struct AmeModel {
  ModelDims dims;
  Mode mode = Mode::Symmetric;
  ParamSet params;
  LinearMap map;

  // Tables must be vocab x d. GRU and projector are drawn from `seed`.
  static AmeModel create(const ModelDims& dims, Mode mode, Tensor emb_x, Tensor emb_y, std::uint64_t seed);

  const Tensor& table(Lang lang) const;
  Tensor& table(Lang lang);
  GruView gru() const { return gru_view(params); }
  ProjectorView projector() const { return projector_view(params); }

  JointVector encode_caption(std::span<const TokenId> tokens, Lang lang) const;
  JointVector encode_image(std::span<const double> feature) const;

  // Row-stacked joint vectors, computed in parallel over rows.
  Tensor encode_captions(const std::vector<std::vector<TokenId>>& captions, Lang lang) const;
  Tensor encode_images(const Tensor& features) const;
};

inline const std::string& table_param(Lang lang) {
  static const std::string x(param::kEmbX), y(param::kEmbY);
  return lang == Lang::X ? x : y;
}

}  // namespace ame
