// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "ame/encoders/encoders.hpp"
#include "ame/numerics/tensor.hpp"

namespace ame {

// P(c, i) for every caption row c and image column i. Symmetric entries lie
// in [-1, 1]; asymmetric entries are <= 0.
struct SimilarityMatrix {
  Tensor values;  // n_captions x n_images
  Mode mode = Mode::Symmetric;

  std::size_t captions() const noexcept { return values.rows(); }
  std::size_t images() const noexcept { return values.cols(); }
};

// Dot product of two unit vectors. Both must be symmetric-mode vectors.
double cosine(const JointVector& a, const JointVector& b);

// -|| max(0, caption - image) ||^2: zero exactly when the caption is
// dominated by the image coordinatewise. Both must be asymmetric.
double order_similarity(const JointVector& image, const JointVector& caption);

// P(c, i): cosine in symmetric mode, order_similarity(i, c) otherwise.
double similarity(const JointVector& caption, const JointVector& image);

SimilarityMatrix similarity_matrix(const std::vector<JointVector>& captions, const std::vector<JointVector>& images,
                                   Mode mode);
// Row-matrix form used on batches: captions is n_c x m, images n_i x m.
SimilarityMatrix similarity_matrix(const Tensor& captions, const Tensor& images, Mode mode);

struct SimilarityGrads {
  Tensor captions;  // n_c x m
  Tensor images;    // n_i x m
};

// Pulls dL/dP back to the embedding rows. At the hinge b_j == a_j of the
// order penalty the gradient is taken as 0.
SimilarityGrads similarity_matrix_backward(const Tensor& captions, const Tensor& images, const Tensor& d_values,
                                           Mode mode);

}  // namespace ame
