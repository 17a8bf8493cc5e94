// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/cli/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>

#include "ame/data/tokenize.hpp"
#include "ame/error.hpp"

namespace ame::cli {

namespace {

const std::vector<std::string>& path_keys() {
  static const std::vector<std::string> keys{"train_captions", "val_captions",  "features",     "embeddings_x",
                                             "embeddings_y",   "lexicon_train", "lexicon_eval", "output_dir"};
  return keys;
}

fs::path* path_field(RunConfig& c, const std::string& key) {
  if (key == "train_captions") return &c.train_captions;
  if (key == "val_captions") return &c.val_captions;
  if (key == "features") return &c.features;
  if (key == "embeddings_x") return &c.embeddings_x;
  if (key == "embeddings_y") return &c.embeddings_y;
  if (key == "lexicon_train") return &c.lexicon_train;
  if (key == "lexicon_eval") return &c.lexicon_eval;
  if (key == "output_dir") return &c.output_dir;
  return nullptr;
}

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " is required");
  if (!fs::is_regular_file(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
}

Vocabulary build_vocab(const std::string& language, const std::vector<RawCaption>& captions) {
  std::vector<std::vector<std::string>> sentences;
  for (const auto& c : captions) {
    if (c.language == language) sentences.push_back(tokenize(c.text));
  }
  return Vocabulary::build(language, sentences);
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("run configuration must be a JSON object");
  std::set<std::string> known(path_keys().begin(), path_keys().end());
  known.insert(train_config_keys().begin(), train_config_keys().end());
  known.insert("language_x");
  known.insert("language_y");
  for (const auto& item : j.items()) {
    if (known.count(item.key()) == 0) throw ConfigError("unknown configuration key '" + item.key() + "'");
  }

  RunConfig c;
  c.train = train_config_from_json(j);
  for (const auto& key : path_keys()) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_string()) throw ConfigError(key + " must be a string path");
    const fs::path p = j.at(key).get<std::string>();
    *path_field(c, key) = p.is_absolute() ? p : base_dir / p;
  }
  if (!j.contains("output_dir")) c.output_dir = base_dir / c.output_dir;
  for (const char* key : {"language_x", "language_y"}) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_string() || j.at(key).get<std::string>().empty()) {
      throw ConfigError(std::string(key) + " must be a non-empty string");
    }
    (std::string(key) == "language_x" ? c.language_x : c.language_y) = j.at(key).get<std::string>();
  }
  if (c.language_x == c.language_y) throw ConfigError("language_x and language_y must differ");
  c.train.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("configuration file not found: " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in " + file.string() + ": " + e.what());
  }
  RunConfig c = from_json(j, file.parent_path());
  c.validate_paths();
  return c;
}

void RunConfig::validate_paths() const {
  require_file(train_captions, "train_captions");
  if (!val_captions.empty()) require_file(val_captions, "val_captions");
  require_file(features, "features");
  require_file(embeddings_x, "embeddings_x");
  if (train.bilingual()) require_file(embeddings_y, "embeddings_y");
  if (train.uses_alignment()) require_file(lexicon_train, "lexicon_train");
  if (!lexicon_train.empty()) require_file(lexicon_train, "lexicon_train");
  if (!lexicon_eval.empty()) require_file(lexicon_eval, "lexicon_eval");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = ame::to_json(train);
  auto put = [&](const char* key, const fs::path& p) {
    if (!p.empty()) j[key] = p.string();
  };
  put("train_captions", train_captions);
  put("val_captions", val_captions);
  put("features", features);
  put("embeddings_x", embeddings_x);
  put("embeddings_y", embeddings_y);
  put("lexicon_train", lexicon_train);
  put("lexicon_eval", lexicon_eval);
  put("output_dir", output_dir);
  j["language_x"] = language_x;
  j["language_y"] = language_y;
  return j;
}

PreparedRun prepare_run(const RunConfig& config) {
  const TrainConfig& tc = config.train;
  const auto train_raw = load_captions(config.train_captions);
  const auto val_raw = config.val_captions.empty() ? train_raw : load_captions(config.val_captions);
  auto images = std::make_shared<const ImageFeatureSet>(load_features(config.features));

  PreparedRun run;
  run.vocab_x = build_vocab(config.language_x, train_raw);
  run.vocab_y = build_vocab(config.language_y, train_raw);
  const Vocabulary* y_vocab = tc.bilingual() ? &run.vocab_y : nullptr;
  // Mono runs ignore second-language captions.
  auto keep = [&](const std::vector<RawCaption>& raw) {
    if (y_vocab) return raw;
    std::vector<RawCaption> kept;
    std::copy_if(raw.begin(), raw.end(), std::back_inserter(kept),
                 [&](const RawCaption& r) { return r.language != config.language_y; });
    return kept;
  };
  run.train = CaptionDataset::from_raw(keep(train_raw), run.vocab_x, y_vocab, images, Split::Train);
  run.val = CaptionDataset::from_raw(keep(val_raw), run.vocab_x, y_vocab, images, Split::Val);

  Tensor emb_x = load_embeddings(config.embeddings_x, run.vocab_x, tc.embedding_dim, tc.seed);
  Tensor emb_y = tc.bilingual() ? load_embeddings(config.embeddings_y, run.vocab_y, tc.embedding_dim, tc.seed)
                                : random_embeddings(run.vocab_y, tc.embedding_dim, tc.seed);
  if (tc.bilingual()) {
    std::vector<TokenPair> train_pairs, eval_pairs;
    if (!config.lexicon_train.empty()) train_pairs = load_lexicon(config.lexicon_train, run.vocab_x, run.vocab_y);
    if (!config.lexicon_eval.empty()) eval_pairs = load_lexicon(config.lexicon_eval, run.vocab_x, run.vocab_y);
    run.lexicon = BilingualLexicon::make(std::move(train_pairs), std::move(eval_pairs));
  }
  const ModelDims dims{tc.embedding_dim, tc.joint_dim, images->dim()};
  run.model = AmeModel::create(dims, tc.mode, std::move(emb_x), std::move(emb_y), tc.seed);
  return run;
}

}  // namespace ame::cli
