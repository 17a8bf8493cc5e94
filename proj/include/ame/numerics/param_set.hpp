// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ame/numerics/tensor.hpp"

namespace ame {

// Named parameters, each paired with a gradient accumulator of the same
// shape. Iteration order is the lexicographic order of the names.
class ParamSet {
 public:
  void add(const std::string& name, Tensor value);

  bool contains(const std::string& name) const { return values_.count(name) != 0; }
  Tensor& value(const std::string& name);
  const Tensor& value(const std::string& name) const;
  Tensor& grad(const std::string& name);
  const Tensor& grad(const std::string& name) const;

  std::vector<std::string> names() const;
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t parameter_count() const noexcept;

  void zero_grad();
  // Global L2 norm over every gradient accumulator.
  double grad_norm() const;
  void scale_grads(double factor);

 private:
  std::map<std::string, Tensor> values_;
  std::map<std::string, Tensor> grads_;
};

}  // namespace ame
