// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "ame/data/vocabulary.hpp"
#include "ame/numerics/param_set.hpp"
#include "ame/numerics/tensor.hpp"

namespace ame {

// Symmetric: cosine similarity on unit vectors. Asymmetric: order-embedding
// penalty on non-negative unit vectors.
enum class Mode { Symmetric, Asymmetric };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

// A point in the joint space. Symmetric vectors have unit norm; asymmetric
// vectors additionally have non-negative coordinates.
struct JointVector {
  Tensor values;
  Mode mode = Mode::Symmetric;

  std::size_t dim() const noexcept { return values.size(); }
};

namespace param {
inline constexpr std::string_view kEmbX = "emb.x";
inline constexpr std::string_view kEmbY = "emb.y";
inline constexpr std::string_view kGruWz = "gru.w_z";
inline constexpr std::string_view kGruWr = "gru.w_r";
inline constexpr std::string_view kGruWh = "gru.w_h";
inline constexpr std::string_view kGruUz = "gru.u_z";
inline constexpr std::string_view kGruUr = "gru.u_r";
inline constexpr std::string_view kGruUh = "gru.u_h";
inline constexpr std::string_view kGruBz = "gru.b_z";
inline constexpr std::string_view kGruBr = "gru.b_r";
inline constexpr std::string_view kGruBh = "gru.b_h";
inline constexpr std::string_view kImgWeight = "img.weight";
inline constexpr std::string_view kImgBias = "img.bias";
}  // namespace param

// Single-layer unidirectional GRU weights, m = hidden size, d = input size.
// T is `const Tensor` for forward passes and `Tensor` for gradient sinks.
template <typename T>
struct GruWeights {
  T& w_z;  // m x d
  T& w_r;
  T& w_h;
  T& u_z;  // m x m
  T& u_r;
  T& u_h;
  T& b_z;  // m
  T& b_r;
  T& b_h;

  std::size_t input_dim() const { return w_z.cols(); }
  std::size_t hidden_dim() const { return w_z.rows(); }
};

using GruView = GruWeights<const Tensor>;
using GruGrads = GruWeights<Tensor>;

GruView gru_view(const ParamSet& params);
GruGrads gru_grads(ParamSet& params);

template <typename T>
struct ProjectorWeights {
  T& weight;  // m x D
  T& bias;    // m
};

using ProjectorView = ProjectorWeights<const Tensor>;
using ProjectorGrads = ProjectorWeights<Tensor>;

ProjectorView projector_view(const ParamSet& params);
ProjectorGrads projector_grads(ParamSet& params);

// Registers GRU / projector parameters with uniform(-1/sqrt(fan_in),
// 1/sqrt(fan_in)) initialisation. Fan-in is d for input weights and m for
// recurrent weights and biases; D for the projector.
void add_gru_params(ParamSet& params, std::size_t d, std::size_t m, std::mt19937_64& rng);
void add_projector_params(ParamSet& params, std::size_t feature_dim, std::size_t m, std::mt19937_64& rng);

// Per-step activations kept for backpropagation.
struct GruTrace {
  struct Step {
    TokenId token;
    std::vector<double> h_prev, z, r, candidate;
  };
  std::vector<Step> steps;
  std::vector<double> h;  // final hidden state
};

// Runs the GRU over `tokens` with h_0 = 0 and returns h_T. Padding tokens
// are masked: they leave the state untouched.
std::vector<double> gru_forward(const GruView& gru, const Tensor& table, std::span<const TokenId> tokens,
                                GruTrace* trace = nullptr);

// Accumulates dL/dweights into `grads` and dL/d(rows) into `table_grad`
// (either may be null) given dL/dh_T.
void gru_backward(const GruView& gru, const Tensor& table, const GruTrace& trace, std::span<const double> d_h,
                  GruGrads* grads, Tensor* table_grad);

// Mode-dependent output head: l2 normalisation, preceded by elementwise
// absolute value in asymmetric mode. A zero pre-activation raises
// DegenerateInputError.
JointVector to_joint(std::span<const double> pre, Mode mode);
// dL/d(pre) given dL/d(output).
std::vector<double> to_joint_backward(std::span<const double> pre, const JointVector& out,
                                      std::span<const double> d_out);

// f_c: caption encoder. Looks tokens up in `table` (the caption language's
// embeddings) and runs the shared GRU; the caption embedding is h_T.
JointVector encode_caption(std::span<const TokenId> tokens, const Tensor& table, const GruView& gru, Mode mode);

// f_i: affine projection of a precomputed image feature vector.
std::vector<double> project_image(std::span<const double> feature, const ProjectorView& proj);
JointVector encode_image(std::span<const double> feature, const ProjectorView& proj, Mode mode);
// Accumulates projector gradients given dL/d(pre-head output).
void project_image_backward(std::span<const double> feature, std::span<const double> d_pre, ProjectorGrads& grads);

}  // namespace ame
