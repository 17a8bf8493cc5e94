// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ame/numerics/param_set.hpp"

namespace ame {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::map<std::string, Tensor> first;   // m
  std::map<std::string, Tensor> second;  // v
};

// One bias-corrected Adam update of the named parameters (all of them when
// `only` is empty), then every gradient accumulator is zeroed. A non-finite
// gradient aborts with NumericError naming the parameter before anything is
// modified.
void adam_step(ParamSet& params, AdamState& state, double lr, const std::vector<std::string>& only = {});

}  // namespace ame
