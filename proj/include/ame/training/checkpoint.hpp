// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>

#include "ame/data/vocabulary.hpp"
#include "ame/encoders/model.hpp"
#include "ame/training/config.hpp"

namespace ame {

struct Checkpoint {
  AmeModel model;
  TrainConfig config;
  Vocabulary vocab_x;
  Vocabulary vocab_y;
  double best_score = 0.0;
  std::int64_t step = 0;
};

// Layout, little-endian throughout:
//   "AMECKPT1" u32 version=1, u32 d, u32 m, u32 D
//   14 tables, each u32 rows then rows x cols float32, in the order
//     emb.x, emb.y, gru.w_z, gru.w_r, gru.w_h, gru.u_z, gru.u_r, gru.u_h,
//     gru.b_z, gru.b_r, gru.b_h, img.weight, img.bias, W
//   u64 content hash of vocab X, u64 content hash of vocab Y
//   u32 byte length, then UTF-8 JSON {config, mode, best_score, step,
//     vocab_x, vocab_y}
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);

// Throws FormatError for bad magic, version or truncation, and
// IncompatibleCheckpointError when the stored hashes disagree with the
// stored vocabularies or with `expect_x` / `expect_y` when given.
Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary* expect_x = nullptr,
                           const Vocabulary* expect_y = nullptr);

}  // namespace ame
