// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ame/encoders/encoders.hpp"
#include "ame/encoders/model.hpp"
#include "ame/error.hpp"
#include "ame/numerics/gradcheck.hpp"
#include "ame/numerics/ops.hpp"
#include "test_support.hpp"

namespace ame {
namespace {

using testing::random_tensor;

const std::string kTable(param::kEmbX);

ParamSet gru_params(std::size_t vocab, std::size_t d, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParamSet p;
  add_gru_params(p, d, m, rng);
  p.add(kTable, random_tensor(vocab, d, rng));
  return p;
}

TEST(Gru, ZeroWeightsGiveDegenerateEmbedding) {
  ParamSet p = gru_params(5, 3, 4, 1);
  for (const auto& name : p.names()) {
    if (name != kTable) p.value(name).fill(0.0);
  }
  const std::vector<TokenId> tokens{2, 3, 4};
  const auto h = gru_forward(gru_view(p), p.value(kTable), tokens);
  for (double v : h) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(encode_caption(tokens, p.value(kTable), gru_view(p), Mode::Symmetric), DegenerateInputError);
}

TEST(Gru, SingleStepWithOpenUpdateGate) {
  const std::size_t d = 3;
  ParamSet p = gru_params(4, d, d, 2);
  p.value(std::string(param::kGruWz)).fill(0.0);
  p.value(std::string(param::kGruUz)).fill(0.0);
  p.value(std::string(param::kGruBz)).fill(50.0);  // sigmoid(50) == 1 in double
  p.value(std::string(param::kGruWh)) = Tensor::identity(d);
  p.value(std::string(param::kGruBh)).fill(0.0);
  Tensor& table = p.value(kTable);
  const std::vector<double> e{0.3, -1.2, 0.7};
  for (std::size_t k = 0; k < d; ++k) table(2, k) = e[k];

  const std::vector<TokenId> tokens{2};
  const JointVector out = encode_caption(tokens, table, gru_view(p), Mode::Symmetric);
  std::vector<double> expected{std::tanh(e[0]), std::tanh(e[1]), std::tanh(e[2])};
  const double n = std::sqrt(expected[0] * expected[0] + expected[1] * expected[1] + expected[2] * expected[2]);
  for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(out.values[k], expected[k] / n, 1e-15);
}

TEST(Gru, TrailingPaddingIsMasked) {
  ParamSet p = gru_params(6, 4, 5, 3);
  const std::vector<TokenId> tokens{2, 5, 3};
  const std::vector<TokenId> padded{2, 5, 3, Vocabulary::kPad, Vocabulary::kPad};
  for (Mode mode : {Mode::Symmetric, Mode::Asymmetric}) {
    const JointVector a = encode_caption(tokens, p.value(kTable), gru_view(p), mode);
    const JointVector b = encode_caption(padded, p.value(kTable), gru_view(p), mode);
    EXPECT_LE(testing::max_abs_diff(a.values, b.values), 1e-12);
  }
}

TEST(Gru, EmptySequenceIsDegenerate) {
  ParamSet p = gru_params(4, 2, 3, 4);
  EXPECT_THROW(encode_caption({}, p.value(kTable), gru_view(p), Mode::Symmetric), DegenerateInputError);
}

TEST(Gru, OutOfRangeTokenRejected) {
  ParamSet p = gru_params(4, 2, 3, 4);
  const std::vector<TokenId> tokens{9};
  EXPECT_THROW(encode_caption(tokens, p.value(kTable), gru_view(p), Mode::Symmetric), ContractError);
}

TEST(Model, SharedEncoderAcrossLanguages) {
  std::mt19937_64 rng(5);
  const Tensor table = random_tensor(7, 4, rng);
  const AmeModel model = AmeModel::create({4, 6, 5}, Mode::Symmetric, table, table, 9);
  const std::vector<TokenId> tokens{3, 2, 6};
  EXPECT_EQ(model.encode_caption(tokens, Lang::X).values, model.encode_caption(tokens, Lang::Y).values);
}

TEST(Model, BatchEncodingMatchesSingle) {
  std::mt19937_64 rng(6);
  const AmeModel model =
      AmeModel::create({4, 6, 5}, Mode::Asymmetric, random_tensor(7, 4, rng), random_tensor(8, 4, rng), 9);
  const std::vector<std::vector<TokenId>> caps{{2, 3}, {6}, {4, 5, 2}};
  const Tensor batch = model.encode_captions(caps, Lang::Y);
  for (std::size_t i = 0; i < caps.size(); ++i) {
    const auto one = model.encode_caption(caps[i], Lang::Y).values;
    for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(batch(i, k), one[k]);
  }
  const Tensor feats = random_tensor(4, 5, rng);
  const Tensor imgs = model.encode_images(feats);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto one = model.encode_image(feats.row(i)).values;
    for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(imgs(i, k), one[k]);
  }
}

TEST(Model, CreateStartsWithIdentityMap) {
  std::mt19937_64 rng(7);
  const AmeModel model =
      AmeModel::create({3, 4, 2}, Mode::Symmetric, random_tensor(5, 3, rng), random_tensor(5, 3, rng), 1);
  EXPECT_EQ(model.map.w, Tensor::identity(3));
  EXPECT_THROW(AmeModel::create({3, 4, 2}, Mode::Symmetric, random_tensor(5, 2, rng), random_tensor(5, 3, rng), 1),
               DimensionError);
}

ParamSet projector_params(std::size_t feature_dim, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParamSet p;
  add_projector_params(p, feature_dim, m, rng);
  return p;
}

TEST(Projector, IdentityProjectionNormalizes) {
  ParamSet p = projector_params(4, 4, 1);
  p.value(std::string(param::kImgWeight)) = Tensor::identity(4);
  p.value(std::string(param::kImgBias)).fill(0.0);
  const std::vector<double> f{3, 4, 0, 0};
  const JointVector v = encode_image(f, projector_view(p), Mode::Symmetric);
  EXPECT_DOUBLE_EQ(v.values[0], 0.6);
  EXPECT_DOUBLE_EQ(v.values[1], 0.8);
  EXPECT_EQ(v.values[2], 0.0);
}

TEST(Projector, BiasOnlyIsConstant) {
  ParamSet p = projector_params(3, 2, 2);
  p.value(std::string(param::kImgWeight)).fill(0.0);
  p.value(std::string(param::kImgBias)) = Tensor::vector({-3, 4});
  for (const std::vector<double>& f : {std::vector<double>{1, 2, 3}, std::vector<double>{-5, 0, 9}}) {
    const JointVector s = encode_image(f, projector_view(p), Mode::Symmetric);
    EXPECT_DOUBLE_EQ(s.values[0], -0.6);
    EXPECT_DOUBLE_EQ(s.values[1], 0.8);
    const JointVector a = encode_image(f, projector_view(p), Mode::Asymmetric);
    EXPECT_DOUBLE_EQ(a.values[0], 0.6);
    EXPECT_DOUBLE_EQ(a.values[1], 0.8);
  }
}

TEST(Projector, MatchesHandRolledAffine) {
  ParamSet p = projector_params(7, 5, 3);
  std::mt19937_64 rng(4);
  const Tensor feats = random_tensor(6, 7, rng);
  const Tensor& w = p.value(std::string(param::kImgWeight));
  const Tensor& b = p.value(std::string(param::kImgBias));
  for (Mode mode : {Mode::Symmetric, Mode::Asymmetric}) {
    for (std::size_t i = 0; i < feats.rows(); ++i) {
      std::vector<double> pre(5);
      double n = 0.0;
      for (std::size_t r = 0; r < 5; ++r) {
        double s = b[r];
        for (std::size_t c = 0; c < 7; ++c) s += w(r, c) * feats(i, c);
        pre[r] = mode == Mode::Asymmetric ? std::abs(s) : s;
        n += pre[r] * pre[r];
      }
      const JointVector v = encode_image(feats.row(i), projector_view(p), mode);
      for (std::size_t r = 0; r < 5; ++r) EXPECT_NEAR(v.values[r], pre[r] / std::sqrt(n), 1e-10);
    }
  }
}

TEST(Projector, WrongFeatureDimension) {
  ParamSet p = projector_params(3, 2, 2);
  const std::vector<double> f{1, 2};
  EXPECT_THROW(encode_image(f, projector_view(p), Mode::Symmetric), DimensionError);
}

TEST(JointHead, InvariantsPerMode) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const Tensor pre = random_tensor(1, 9, rng);
    const JointVector s = to_joint(pre.values(), Mode::Symmetric);
    EXPECT_NEAR(norm(s.values.values()), 1.0, 1e-12);
    const JointVector a = to_joint(pre.values(), Mode::Asymmetric);
    EXPECT_NEAR(norm(a.values.values()), 1.0, 1e-12);
    for (double v : a.values.values()) EXPECT_GE(v, 0.0);
  }
}

// Linear readout of a caption embedding; its gradient exercises the whole
// caption path: head, GRU and table rows.
class CaptionGradCheck : public ::testing::TestWithParam<std::tuple<Mode, std::uint64_t>> {};

TEST_P(CaptionGradCheck, MatchesCentralDifferences) {
  const auto [mode, seed] = GetParam();
  const std::size_t d = 6, m = 8, vocab = 9;
  ParamSet p = gru_params(vocab, d, m, seed);
  std::mt19937_64 rng(seed + 100);
  const Tensor readout = random_tensor(1, m, rng);
  const std::vector<std::vector<TokenId>> captions{{2, 5, 3}, {4, 8}, {7, 2, 6, 3}};

  const LossFn loss = [&](const ParamSet& ps) {
    double s = 0.0;
    for (const auto& c : captions) {
      const JointVector v = encode_caption(c, ps.value(kTable), gru_view(ps), mode);
      s += dot(v.values.values(), readout.values());
    }
    return s;
  };
  p.zero_grad();
  GruGrads grads = gru_grads(p);
  for (const auto& c : captions) {
    GruTrace trace;
    const auto h = gru_forward(gru_view(p), p.value(kTable), c, &trace);
    const JointVector v = to_joint(h, mode);
    const auto d_pre = to_joint_backward(h, v, readout.values());
    gru_backward(gru_view(p), p.value(kTable), trace, d_pre, &grads, &p.grad(kTable));
  }
  const GradCheckReport r = finite_diff_check(loss, p);
  EXPECT_TRUE(r.pass) << r.worst_param << " rel error " << r.worst;
  EXPECT_GT(frobenius_norm(p.grad(kTable)), 0.0);
}

INSTANTIATE_TEST_SUITE_P(Modes, CaptionGradCheck,
                         ::testing::Combine(::testing::Values(Mode::Symmetric, Mode::Asymmetric),
                                            ::testing::Values(1, 2, 3)));

class ImageGradCheck : public ::testing::TestWithParam<std::tuple<Mode, std::uint64_t>> {};

TEST_P(ImageGradCheck, MatchesCentralDifferences) {
  const auto [mode, seed] = GetParam();
  ParamSet p = projector_params(7, 8, seed);
  std::mt19937_64 rng(seed + 200);
  const Tensor feats = random_tensor(5, 7, rng);
  const Tensor readout = random_tensor(1, 8, rng);
  const LossFn loss = [&](const ParamSet& ps) {
    double s = 0.0;
    for (std::size_t i = 0; i < feats.rows(); ++i) {
      s += dot(encode_image(feats.row(i), projector_view(ps), mode).values.values(), readout.values());
    }
    return s;
  };
  p.zero_grad();
  ProjectorGrads grads = projector_grads(p);
  for (std::size_t i = 0; i < feats.rows(); ++i) {
    const auto pre = project_image(feats.row(i), projector_view(p));
    const JointVector v = to_joint(pre, mode);
    project_image_backward(feats.row(i), to_joint_backward(pre, v, readout.values()), grads);
  }
  const GradCheckReport r = finite_diff_check(loss, p);
  EXPECT_TRUE(r.pass) << r.worst_param << " rel error " << r.worst;
}

INSTANTIATE_TEST_SUITE_P(Modes, ImageGradCheck,
                         ::testing::Combine(::testing::Values(Mode::Symmetric, Mode::Asymmetric),
                                            ::testing::Values(1, 2, 3)));

TEST(ModeNames, RoundTrip) {
  EXPECT_EQ(parse_mode(to_string(Mode::Asymmetric)), Mode::Asymmetric);
  EXPECT_EQ(parse_mode("symmetric"), Mode::Symmetric);
  EXPECT_THROW(parse_mode("sideways"), ConfigError);
}

}  // namespace
}  // namespace ame
