// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ame/data/io.hpp"
#include "ame/numerics/tensor.hpp"

namespace ame {

// Synthetic two-language corpus. Every language-X word has a ground-truth
// translation in language Y (its letters reversed behind a 'q'). An image
// is a bag of words: its feature vector is the sum of per-word concept
// vectors plus noise, its X caption lists the words and its Y caption the
// translations, in reverse order when `reverse_y` is set. Initial word
// vectors are pre-aligned: y_i is x_i plus a little noise.
struct FixtureOptions {
  std::size_t images = 64;
  std::size_t val_images = 0;  // 0: validate on the training images
  std::size_t feature_dim = 64;
  std::size_t word_dim = 16;
  std::size_t words = 48;
  std::size_t lexicon_pairs = 40;  // ground-truth pairs written out
  std::size_t eval_pairs = 10;     // of those, held out for evaluation
  std::size_t min_caption = 3;
  std::size_t max_caption = 5;
  std::size_t captions_per_language = 1;
  bool reverse_y = true;
  // Each caption drops each of the image's words with this probability
  // (keeping at least one), independently per caption, so the two
  // languages describe overlapping but different parts of an image.
  double drop_word = 0.4;
  double feature_noise = 0.05;
  double embedding_noise = 0.05;
  std::string language_x = "en";
  std::string language_y = "de";
  std::uint64_t seed = 7;
};

struct Fixture {
  std::vector<RawCaption> train_captions;
  std::vector<RawCaption> val_captions;
  ImageFeatureSet features;  // train and validation images
  std::vector<std::string> words_x, words_y;
  Tensor vectors_x, vectors_y;  // rows aligned with words_x / words_y
  std::vector<std::pair<std::string, std::string>> lexicon_train, lexicon_eval;
};

Fixture make_fixture(const FixtureOptions& options);

// File names written by write_fixture, relative to its directory.
namespace fixture_files {
inline constexpr const char* kTrainCaptions = "captions_train.tsv";
inline constexpr const char* kValCaptions = "captions_val.tsv";
inline constexpr const char* kFeatures = "features.bin";
inline constexpr const char* kEmbeddingsX = "embeddings_x.vec";
inline constexpr const char* kEmbeddingsY = "embeddings_y.vec";
inline constexpr const char* kLexiconTrain = "lexicon_train.txt";
inline constexpr const char* kLexiconEval = "lexicon_eval.txt";
}  // namespace fixture_files

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

}  // namespace ame
