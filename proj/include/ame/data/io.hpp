// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ame/data/vocabulary.hpp"
#include "ame/numerics/tensor.hpp"

namespace ame {

using TokenPair = std::pair<TokenId, TokenId>;

// Text vector file: "<count> <d>" header, then "<token> <f1> ... <fd>".
// Returns a vocab.size() x d matrix. Tokens missing from the file, and the
// unknown token, get a seeded uniform(-1/sqrt(d), 1/sqrt(d)) draw; every row
// except padding is l2-normalized. The padding row stays zero.
Tensor load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim,
                       std::uint64_t seed);
// Every row drawn as for missing tokens in load_embeddings.
Tensor random_embeddings(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed);

void save_embeddings(const std::filesystem::path& path, const std::vector<std::string>& tokens,
                     const Tensor& vectors);

// "<source_word> <target_word>" per line. Keeps pairs whose words are both
// in their vocabularies (reserved tokens never match); duplicates dropped,
// first occurrence order kept.
std::vector<TokenPair> load_lexicon(const std::filesystem::path& path, const Vocabulary& src,
                                    const Vocabulary& tgt);

struct BilingualLexicon {
  std::vector<TokenPair> train;
  std::vector<TokenPair> eval;

  // Removes eval pairs that also occur in `train`.
  static BilingualLexicon make(std::vector<TokenPair> train, std::vector<TokenPair> eval);
};

struct RawCaption {
  std::uint64_t image_id = 0;
  std::string language;
  std::string text;
};

// UTF-8 TSV "<image_id>\t<language_tag>\t<raw caption>".
std::vector<RawCaption> load_captions(const std::filesystem::path& path);
void save_captions(const std::filesystem::path& path, const std::vector<RawCaption>& captions);

// Precomputed image features, one row per image.
class ImageFeatureSet {
 public:
  ImageFeatureSet() = default;
  ImageFeatureSet(std::vector<std::uint64_t> ids, Tensor features);

  std::size_t dim() const noexcept { return features_.cols(); }
  std::size_t size() const noexcept { return ids_.size(); }
  bool contains(std::uint64_t id) const { return row_of_.count(id) != 0; }
  std::size_t row_of(std::uint64_t id) const;
  const std::vector<std::uint64_t>& ids() const noexcept { return ids_; }
  const Tensor& matrix() const noexcept { return features_; }

 private:
  std::vector<std::uint64_t> ids_;
  Tensor features_;
  std::unordered_map<std::uint64_t, std::size_t> row_of_;
};

// Binary: "AMEFEAT1", u32 count, u32 D, then per image a u64 id followed by
// D float32 values, all little-endian.
ImageFeatureSet load_features(const std::filesystem::path& path);
void save_features(const std::filesystem::path& path, const ImageFeatureSet& features);

}  // namespace ame
