// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ame/encoders/encoders.hpp"

namespace ame {

// mono: one caption language, no alignment. fme: frozen pre-aligned tables,
// W fixed at identity, no alignment loss. ame: full objective.
// ranking_only: trainable tables without the alignment loss.
enum class Ablation { Mono, Fme, Ame, RankingOnly };

std::string_view to_string(Ablation a);
Ablation parse_ablation(std::string_view text);

// Hyperparameter defaults of the two reference setups.
enum class Preset { Multi30k, Coco };

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view text);

struct TrainConfig {
  Preset preset = Preset::Multi30k;
  Mode mode = Mode::Symmetric;
  Ablation ablation = Ablation::Ame;

  std::size_t batch_size = 128;
  std::size_t joint_dim = 1024;     // m
  std::size_t embedding_dim = 300;  // d
  std::optional<double> margin;     // unset: 0.2 symmetric, 0.05 asymmetric
  double learning_rate = 0.00011;
  std::size_t epochs = 30;
  std::size_t decay_epoch = 15;  // 1-based epoch from which the decayed rate applies
  double decay_factor = 10.0;
  std::size_t align_interval = 500;  // T
  double lr_align = 2.0;
  std::size_t knn = 5;
  std::uint64_t seed = 1;
  std::size_t patience = 5;         // validation passes without improvement
  std::size_t align_sample = 5000;  // 0 = whole lexicon
  double clip_norm = 2.0;           // 0 disables clipping
  // Alignment updates also see the evaluation pairs, as when the evaluation
  // dictionary is a section of the training dictionary. The alignment ratio
  // then measures how well known translations are kept, not induced.
  bool align_with_eval_pairs = false;

  static TrainConfig defaults(Preset preset, Mode mode);

  double resolved_margin() const;
  bool trains_tables() const { return ablation != Ablation::Fme; }
  bool uses_alignment() const { return ablation == Ablation::Ame; }
  bool bilingual() const { return ablation != Ablation::Mono; }

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Keys understood by train_config_from_json, in serialisation order.
const std::vector<std::string>& train_config_keys();

// Reads the keys of `train_config_keys()` present in `j`; `preset` and
// `mode` are applied first so that explicit values override their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& c);

}  // namespace ame
