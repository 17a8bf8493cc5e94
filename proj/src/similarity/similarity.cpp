// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/similarity/similarity.hpp"

#include <string>

#include "ame/error.hpp"
#include "ame/numerics/kernels.hpp"

namespace ame {

namespace {

void require_mode(const JointVector& v, Mode mode, const char* what) {
  if (v.mode != mode) {
    throw ContractError(std::string(what) + " expects " + std::string(to_string(mode)) + " vectors, got " +
                        std::string(to_string(v.mode)));
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
}

Tensor stack(const std::vector<JointVector>& vs, Mode mode) {
  const std::size_t m = vs.front().dim();
  Tensor out({vs.size(), m});
  for (std::size_t i = 0; i < vs.size(); ++i) {
    require_mode(vs[i], mode, "similarity_matrix");
    require_same_dim(vs[i].dim(), m, "similarity_matrix");
    std::copy(vs[i].values.values().begin(), vs[i].values.values().end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

double cosine(const JointVector& a, const JointVector& b) {
  require_mode(a, Mode::Symmetric, "cosine");
  require_mode(b, Mode::Symmetric, "cosine");
  require_same_dim(a.dim(), b.dim(), "cosine");
  return kernels::detail::dot(a.values.values(), b.values.values());
}

double order_similarity(const JointVector& image, const JointVector& caption) {
  require_mode(image, Mode::Asymmetric, "order_similarity");
  require_mode(caption, Mode::Asymmetric, "order_similarity");
  require_same_dim(image.dim(), caption.dim(), "order_similarity");
  return kernels::detail::order_penalty(caption.values.values(), image.values.values());
}

double similarity(const JointVector& caption, const JointVector& image) {
  return caption.mode == Mode::Symmetric ? cosine(caption, image) : order_similarity(image, caption);
}

SimilarityMatrix similarity_matrix(const std::vector<JointVector>& captions, const std::vector<JointVector>& images,
                                   Mode mode) {
  if (captions.empty() || images.empty()) throw ContractError("similarity_matrix: empty input");
  return similarity_matrix(stack(captions, mode), stack(images, mode), mode);
}

SimilarityMatrix similarity_matrix(const Tensor& captions, const Tensor& images, Mode mode) {
  if (captions.rows() == 0 || images.rows() == 0) throw ContractError("similarity_matrix: empty input");
  require_same_dim(captions.cols(), images.cols(), "similarity_matrix");
  if (mode == Mode::Symmetric) return {kernels::parallel::matmul_nt(captions, images), mode};
  return {kernels::parallel::order_similarity(captions, images), mode};
}

SimilarityGrads similarity_matrix_backward(const Tensor& captions, const Tensor& images, const Tensor& d_values,
                                           Mode mode) {
  const std::size_t nc = captions.rows(), ni = images.rows(), m = captions.cols();
  SimilarityGrads g{Tensor({nc, m}), Tensor({ni, m})};
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t i = 0; i < ni; ++i) {
      const double dp = d_values(c, i);
      if (dp == 0.0) continue;
      const auto cr = captions.row(c);
      const auto ir = images.row(i);
      auto gc = g.captions.row(c);
      auto gi = g.images.row(i);
      if (mode == Mode::Symmetric) {
        for (std::size_t k = 0; k < m; ++k) {
          gc[k] += dp * ir[k];
          gi[k] += dp * cr[k];
        }
      } else {
        // P = -sum max(0, c - i)^2
        for (std::size_t k = 0; k < m; ++k) {
          const double v = cr[k] - ir[k];
          if (v > 0.0) {
            gc[k] -= 2.0 * dp * v;
            gi[k] += 2.0 * dp * v;
          }
        }
      }
    }
  }
  return g;
}

}  // namespace ame
