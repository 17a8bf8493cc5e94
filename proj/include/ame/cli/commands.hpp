// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ame/data/fixture.hpp"
#include "ame/training/config.hpp"

namespace ame::cli {

namespace fs = std::filesystem;

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    // bad configuration, input or checkpoint
inline constexpr int kExitNumeric = 3;  // numeric failure during computation

// Output file names under the output directory.
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kCurveFile = "alignment_curve.svg";
inline constexpr const char* kCheckpointFile = "model.ckpt";

struct TrainArgs {
  fs::path config;
  std::optional<fs::path> out;  // overrides output_dir
};

struct EvaluateArgs {
  fs::path checkpoint;
  fs::path captions;
  fs::path features;
  std::optional<fs::path> lexicon;  // adds the alignment column
  std::string task = "retrieval";   // retrieval | caption
  std::vector<std::string> directions;  // empty: both directions of the task
  std::size_t folds = 1;
  std::string orientation = "candidate";  // caption task, asymmetric mode
  fs::path out = ".";
};

struct TranslateArgs {
  fs::path checkpoint;
  std::string word;
  std::size_t topk = 5;
};

struct FixtureArgs {
  FixtureOptions options;
  fs::path dir;
  std::string mode = "symmetric";
  std::string ablation = "ame";
};

// Hyperparameters written into the fixture's config.json: small enough for
// a desk run, strong enough to overfit the fixture. Alignment updates see
// every ground-truth pair, evaluation pairs included.
TrainConfig fixture_train_config(Mode mode, Ablation ablation);

// Each command reports through `out` / `err` and returns an exit code
// instead of throwing.
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_translate(const TranslateArgs& args, std::ostream& out, std::ostream& err);
// Writes a synthetic corpus and a ready-to-train config.json.
int cmd_fixture(const FixtureArgs& args, std::ostream& out, std::ostream& err);

// Runs `body`, mapping library errors to exit codes and messages on `err`.
int guarded(std::ostream& err, const std::function<int()>& body);

// Minimal line chart of alignment ratio per validation step.
void write_alignment_svg(std::ostream& os, const std::vector<double>& ratios, const std::string& title);

}  // namespace ame::cli
