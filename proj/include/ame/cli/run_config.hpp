// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ame/data/dataset.hpp"
#include "ame/data/io.hpp"
#include "ame/data/vocabulary.hpp"
#include "ame/encoders/model.hpp"
#include "ame/training/config.hpp"

namespace ame::cli {

namespace fs = std::filesystem;

// A training run: the hyperparameters plus every input file. Relative
// paths are resolved against the directory of the configuration file.
struct RunConfig {
  TrainConfig train;
  fs::path train_captions;
  fs::path val_captions;  // optional: validate on the training captions
  fs::path features;
  fs::path embeddings_x;
  fs::path embeddings_y;   // not needed for mono
  fs::path lexicon_train;  // needed for ame
  fs::path lexicon_eval;   // optional: alignment ratio is NaN without it
  fs::path output_dir = "out";
  std::string language_x = "en";
  std::string language_y = "de";

  // Unknown keys, wrong types and missing required files raise ConfigError.
  static RunConfig from_json(const nlohmann::json& j, const fs::path& base_dir);
  static RunConfig load(const fs::path& file);

  void validate_paths() const;
  nlohmann::json to_json() const;
};

struct PreparedRun {
  Vocabulary vocab_x;
  Vocabulary vocab_y;
  CaptionDataset train;
  CaptionDataset val;
  BilingualLexicon lexicon;
  AmeModel model;
};

// Loads and indexes everything a run needs and builds the initial model.
PreparedRun prepare_run(const RunConfig& config);

}  // namespace ame::cli
