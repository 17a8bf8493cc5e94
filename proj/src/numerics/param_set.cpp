// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/numerics/param_set.hpp"

#include <cmath>

#include "ame/error.hpp"

namespace ame {

void ParamSet::add(const std::string& name, Tensor value) {
  if (contains(name)) throw ContractError("parameter '" + name + "' registered twice");
  Tensor grad(value.shape());
  values_.emplace(name, std::move(value));
  grads_.emplace(name, std::move(grad));
}

Tensor& ParamSet::value(const std::string& name) {
  auto it = values_.find(name);
  if (it == values_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamSet::value(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

Tensor& ParamSet::grad(const std::string& name) {
  auto it = grads_.find(name);
  if (it == grads_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamSet::grad(const std::string& name) const {
  auto it = grads_.find(name);
  if (it == grads_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

std::vector<std::string> ParamSet::names() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [name, _] : values_) out.push_back(name);
  return out;
}

std::size_t ParamSet::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, t] : values_) n += t.size();
  return n;
}

void ParamSet::zero_grad() {
  for (auto& [_, g] : grads_) g.fill(0.0);
}

double ParamSet::grad_norm() const {
  double acc = 0.0;
  for (const auto& [_, g] : grads_)
    for (double x : g.values()) acc += x * x;
  return std::sqrt(acc);
}

void ParamSet::scale_grads(double factor) {
  for (auto& [_, g] : grads_)
    for (double& x : g.values()) x *= factor;
}

}  // namespace ame
