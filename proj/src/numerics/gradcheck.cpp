// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ame/error.hpp"

namespace ame {

GradCheckReport finite_diff_check(const LossFn& loss, ParamSet& params, const GradCheckOptions& opts) {
  GradCheckReport report;
  report.tolerance = opts.tolerance;
  std::mt19937_64 rng(opts.seed);

  for (const auto& name : params.names()) {
    Tensor& value = params.value(name);
    const Tensor& grad = params.grad(name);

    std::vector<std::size_t> coords(value.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > opts.exhaustive_limit) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(opts.sample_size);
      std::sort(coords.begin(), coords.end());
    }

    double worst = 0.0;
    for (std::size_t i : coords) {
      const double saved = value[i];
      value[i] = saved + opts.epsilon;
      const double up = loss(params);
      value[i] = saved - opts.epsilon;
      const double down = loss(params);
      value[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericError("finite_diff_check: non-finite loss while probing '" + name + "'");
      }
      const double numeric = (up - down) / (2.0 * opts.epsilon);
      const double analytic = grad[i];
      const double rel = std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      worst = std::max(worst, rel);
    }
    report.max_relative_error[name] = worst;
    if (worst >= report.worst) {
      report.worst = worst;
      report.worst_param = name;
    }
  }
  report.pass = report.worst <= opts.tolerance;
  return report;
}

}  // namespace ame
