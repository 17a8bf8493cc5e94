// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/training/adam.hpp"

#include <cmath>

#include "ame/error.hpp"

namespace ame {

void adam_step(ParamSet& params, AdamState& state, double lr, const std::vector<std::string>& only) {
  const std::vector<std::string> names = only.empty() ? params.names() : only;
  for (const auto& name : names) {
    if (!params.grad(name).all_finite()) throw NumericError("non-finite gradient for parameter '" + name + "'");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (const auto& name : names) {
    Tensor& theta = params.value(name);
    const Tensor& g = params.grad(name);
    auto [m_it, m_new] = state.first.try_emplace(name, Tensor(theta.shape()));
    auto [v_it, v_new] = state.second.try_emplace(name, Tensor(theta.shape()));
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
  params.zero_grad();
}

}  // namespace ame
