// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "ame/numerics/tensor.hpp"

namespace ame {

// The d x d map taking source-language word vectors into the target space.
// Kept orthogonal by projecting after every alignment update.
struct LinearMap {
  Tensor w;
  std::int64_t last_projection_step = -1;

  static LinearMap identity(std::size_t d) { return {Tensor::identity(d), -1}; }
  std::size_t dim() const noexcept { return w.rows(); }
};

}  // namespace ame
