// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/training/config.hpp"

#include <cmath>

#include "ame/error.hpp"

namespace ame {

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::Mono: return "mono";
    case Ablation::Fme: return "fme";
    case Ablation::Ame: return "ame";
    case Ablation::RankingOnly: return "ranking_only";
  }
  return "ame";
}

Ablation parse_ablation(std::string_view text) {
  if (text == "mono") return Ablation::Mono;
  if (text == "fme") return Ablation::Fme;
  if (text == "ame") return Ablation::Ame;
  if (text == "ranking_only") return Ablation::RankingOnly;
  throw ConfigError("unknown ablation '" + std::string(text) + "' (expected mono, fme, ame or ranking_only)");
}

std::string_view to_string(Preset p) { return p == Preset::Multi30k ? "multi30k" : "coco"; }

Preset parse_preset(std::string_view text) {
  if (text == "multi30k") return Preset::Multi30k;
  if (text == "coco") return Preset::Coco;
  throw ConfigError("unknown preset '" + std::string(text) + "' (expected multi30k or coco)");
}

TrainConfig TrainConfig::defaults(Preset preset, Mode mode) {
  TrainConfig c;
  c.preset = preset;
  c.mode = mode;
  if (preset == Preset::Coco) {
    c.learning_rate = 0.00006;
    c.epochs = 20;
    c.decay_epoch = 10;
    c.lr_align = 5.0;
    c.knn = 4;
  }
  return c;
}

double TrainConfig::resolved_margin() const {
  if (margin) return *margin;
  return mode == Mode::Symmetric ? 0.2 : 0.05;
}

void TrainConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  auto nonzero = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
  nonzero(joint_dim, "joint_dim");
  nonzero(embedding_dim, "embedding_dim");
  positive(resolved_margin(), "margin");
  positive(learning_rate, "learning_rate");
  nonzero(epochs, "epochs");
  nonzero(decay_epoch, "decay_epoch");
  positive(decay_factor, "decay_factor");
  nonzero(align_interval, "align_interval");
  positive(lr_align, "lr_align");
  nonzero(knn, "knn");
  nonzero(patience, "patience");
  if (clip_norm < 0.0 || !std::isfinite(clip_norm)) throw ConfigError("clip_norm must be non-negative");
}

const std::vector<std::string>& train_config_keys() {
  static const std::vector<std::string> keys{
      "preset",      "mode",      "ablation",      "batch_size",   "joint_dim",     "embedding_dim",
      "margin",      "learning_rate", "epochs",    "decay_epoch",  "decay_factor",  "align_interval",
      "lr_align",    "knn",       "seed",          "patience",     "align_sample",  "clip_norm",
      "align_with_eval_pairs"};
  return keys;
}

namespace {

std::size_t get_count(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(std::string(key) + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double get_real(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return v.get<double>();
}

std::string get_text(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError(std::string(key) + " must be a string");
  return v.get<std::string>();
}

}  // namespace

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  const Preset preset = j.contains("preset") ? parse_preset(get_text(j, "preset")) : Preset::Multi30k;
  const Mode mode = j.contains("mode") ? parse_mode(get_text(j, "mode")) : Mode::Symmetric;
  TrainConfig c = TrainConfig::defaults(preset, mode);
  if (j.contains("ablation")) c.ablation = parse_ablation(get_text(j, "ablation"));
  if (j.contains("batch_size")) c.batch_size = get_count(j, "batch_size");
  if (j.contains("joint_dim")) c.joint_dim = get_count(j, "joint_dim");
  if (j.contains("embedding_dim")) c.embedding_dim = get_count(j, "embedding_dim");
  if (j.contains("margin") && !j.at("margin").is_null()) c.margin = get_real(j, "margin");
  if (j.contains("learning_rate")) c.learning_rate = get_real(j, "learning_rate");
  if (j.contains("epochs")) c.epochs = get_count(j, "epochs");
  if (j.contains("decay_epoch")) c.decay_epoch = get_count(j, "decay_epoch");
  if (j.contains("decay_factor")) c.decay_factor = get_real(j, "decay_factor");
  if (j.contains("align_interval")) c.align_interval = get_count(j, "align_interval");
  if (j.contains("lr_align")) c.lr_align = get_real(j, "lr_align");
  if (j.contains("knn")) c.knn = get_count(j, "knn");
  if (j.contains("seed")) c.seed = get_count(j, "seed");
  if (j.contains("patience")) c.patience = get_count(j, "patience");
  if (j.contains("align_sample")) c.align_sample = get_count(j, "align_sample");
  if (j.contains("clip_norm")) c.clip_norm = get_real(j, "clip_norm");
  if (j.contains("align_with_eval_pairs")) {
    if (!j.at("align_with_eval_pairs").is_boolean()) throw ConfigError("align_with_eval_pairs must be true or false");
    c.align_with_eval_pairs = j.at("align_with_eval_pairs").get<bool>();
  }
  return c;
}

nlohmann::json to_json(const TrainConfig& c) {
  nlohmann::json j;
  j["preset"] = std::string(to_string(c.preset));
  j["mode"] = std::string(to_string(c.mode));
  j["ablation"] = std::string(to_string(c.ablation));
  j["batch_size"] = c.batch_size;
  j["joint_dim"] = c.joint_dim;
  j["embedding_dim"] = c.embedding_dim;
  j["margin"] = c.resolved_margin();
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["decay_epoch"] = c.decay_epoch;
  j["decay_factor"] = c.decay_factor;
  j["align_interval"] = c.align_interval;
  j["lr_align"] = c.lr_align;
  j["knn"] = c.knn;
  j["seed"] = c.seed;
  j["patience"] = c.patience;
  j["align_sample"] = c.align_sample;
  j["clip_norm"] = c.clip_norm;
  j["align_with_eval_pairs"] = c.align_with_eval_pairs;
  return j;
}

}  // namespace ame
