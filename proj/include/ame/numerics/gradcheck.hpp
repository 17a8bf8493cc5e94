// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "ame/numerics/param_set.hpp"

namespace ame {

struct GradCheckReport {
  std::map<std::string, double> max_relative_error;  // per parameter
  double worst = 0.0;
  std::string worst_param;
  double tolerance = 0.0;
  bool pass = false;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  // Tensors larger than this are probed on a random subsample of
  // `sample_size` coordinates instead of exhaustively.
  std::size_t exhaustive_limit = 400;
  std::size_t sample_size = 128;
  std::uint64_t seed = 0;
};

using LossFn = std::function<double(const ParamSet&)>;

// Compares the gradients already accumulated in `params` against central
// differences of `loss`. Parameters are perturbed in place and restored.
// relative error = |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
GradCheckReport finite_diff_check(const LossFn& loss, ParamSet& params, const GradCheckOptions& opts = {});

}  // namespace ame
