// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "ame/numerics/kernels.hpp"

namespace ame {

// k-nearest-neighbour lists for every lexicon pair (s_i, t_i), indexed in
// lexicon order. Indices are rows of the embedding tables.
struct NeighborhoodCache {
  std::size_t k = 0;
  std::int64_t stamp = -1;  // alignment cycle the lists were computed for
  // N_Y(W x_{s_i}): targets nearest to the mapped source
  kernels::IndexLists target_neighbors;
  // N_X(y_{t_i}): mapped sources nearest to the target
  kernels::IndexLists source_neighbors;

  std::size_t pairs() const noexcept { return target_neighbors.size(); }
};

}  // namespace ame
