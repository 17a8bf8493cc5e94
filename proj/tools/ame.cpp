// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

// ame: train, evaluate and query multilingual image-caption embeddings.

#include <iostream>

#include <CLI11.hpp>

#include "ame/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace ame::cli;
  CLI::App app{"Multilingual image-caption retrieval with aligned word embeddings"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a model from a JSON run configuration");
  train_cmd->add_option("config", train.config, "run configuration (JSON)")->required();
  std::string train_out;
  train_cmd->add_option("--out", train_out, "output directory (overrides output_dir)");

  EvaluateArgs eval;
  std::string eval_lexicon;
  auto* eval_cmd = app.add_subcommand("evaluate", "retrieval or caption-caption evaluation of a checkpoint");
  eval_cmd->add_option("checkpoint", eval.checkpoint, "model checkpoint")->required();
  eval_cmd->add_option("--captions", eval.captions, "captions TSV")->required();
  eval_cmd->add_option("--features", eval.features, "image feature file")->required();
  eval_cmd->add_option("--lexicon", eval_lexicon, "lexicon for the alignment column");
  eval_cmd->add_option("--task", eval.task, "retrieval or caption")->capture_default_str();
  eval_cmd->add_option("--direction", eval.directions, "i2t, t2i (retrieval) or x2y, y2x (caption); repeatable");
  eval_cmd->add_option("--folds", eval.folds, "number of folds to average")->capture_default_str();
  eval_cmd->add_option("--orientation", eval.orientation,
                       "asymmetric caption task: candidate or query in the image slot")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "directory for report CSVs")->capture_default_str();

  TranslateArgs tr;
  auto* tr_cmd = app.add_subcommand("translate", "CSLS word translation with a trained map");
  tr_cmd->add_option("checkpoint", tr.checkpoint, "model checkpoint")->required();
  tr_cmd->add_option("--word", tr.word, "source-language word")->required();
  tr_cmd->add_option("--topk", tr.topk, "number of translations to print")->capture_default_str();

  FixtureArgs fx;
  auto* fx_cmd = app.add_subcommand("fixture", "write a synthetic two-language corpus and config.json");
  fx_cmd->add_option("dir", fx.dir, "output directory")->required();
  fx_cmd->add_option("--images", fx.options.images)->capture_default_str();
  fx_cmd->add_option("--val-images", fx.options.val_images, "0 validates on the training images")
      ->capture_default_str();
  fx_cmd->add_option("--words", fx.options.words)->capture_default_str();
  fx_cmd->add_option("--lexicon-pairs", fx.options.lexicon_pairs)->capture_default_str();
  fx_cmd->add_option("--eval-pairs", fx.options.eval_pairs)->capture_default_str();
  fx_cmd->add_option("--captions-per-language", fx.options.captions_per_language)->capture_default_str();
  fx_cmd->add_option("--drop-word", fx.options.drop_word, "per-caption probability of leaving out an image word")
      ->capture_default_str();
  fx_cmd->add_option("--seed", fx.options.seed)->capture_default_str();
  fx_cmd->add_option("--mode", fx.mode, "symmetric or asymmetric")->capture_default_str();
  fx_cmd->add_option("--ablation", fx.ablation, "ame, fme, mono or ranking_only")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*train_cmd) {
    if (!train_out.empty()) train.out = train_out;
    return cmd_train(train, std::cout, std::cerr);
  }
  if (*eval_cmd) {
    if (!eval_lexicon.empty()) eval.lexicon = eval_lexicon;
    return cmd_evaluate(eval, std::cout, std::cerr);
  }
  if (*tr_cmd) return cmd_translate(tr, std::cout, std::cerr);
  return cmd_fixture(fx, std::cout, std::cerr);
}
