// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ame/data/io.hpp"
#include "ame/data/vocabulary.hpp"
#include "ame/numerics/tensor.hpp"

namespace ame {

// The two caption languages. X is the alignment source, Y the target.
enum class Lang : std::uint8_t { X = 0, Y = 1 };
inline constexpr std::array<Lang, 2> kLangs{Lang::X, Lang::Y};
inline std::size_t slot(Lang l) { return static_cast<std::size_t>(l); }

enum class Split : std::uint8_t { Train, Val, Test };

struct CaptionRecord {
  std::uint64_t image_id = 0;
  Lang lang = Lang::X;
  std::vector<TokenId> tokens;
};

class CaptionDataset {
 public:
  CaptionDataset() = default;
  CaptionDataset(std::vector<CaptionRecord> records, std::shared_ptr<const ImageFeatureSet> images, Split split);

  // Tokenizes and indexes raw captions. Records whose language tag matches
  // neither vocabulary raise ConfigError; captions that tokenize to nothing
  // are skipped. `y_vocab` may be null for single-language data.
  static CaptionDataset from_raw(const std::vector<RawCaption>& raw, const Vocabulary& x_vocab,
                                 const Vocabulary* y_vocab, std::shared_ptr<const ImageFeatureSet> images,
                                 Split split);

  const std::vector<CaptionRecord>& records() const noexcept { return records_; }
  const ImageFeatureSet& images() const { return *images_; }
  std::shared_ptr<const ImageFeatureSet> image_set() const { return images_; }
  Split split() const noexcept { return split_; }

  // Image ids in order of first appearance.
  const std::vector<std::uint64_t>& image_order() const noexcept { return image_order_; }
  // Record indices of the captions of `image` in language `lang`.
  const std::vector<std::size_t>& captions_of(std::uint64_t image, Lang lang) const;
  bool has_language(Lang lang) const;

  CaptionDataset only_language(Lang lang) const;
  // Keeps the records of the given images (in the given order).
  CaptionDataset subset(const std::vector<std::uint64_t>& image_ids) const;

 private:
  void index();

  std::vector<CaptionRecord> records_;
  std::shared_ptr<const ImageFeatureSet> images_;
  Split split_ = Split::Train;
  std::vector<std::uint64_t> image_order_;
  std::vector<std::array<std::vector<std::size_t>, 2>> by_image_;
  std::unordered_map<std::uint64_t, std::size_t> image_pos_;
};

// Padded token matrix for one language slot of a batch.
struct SlotBatch {
  std::size_t max_len = 0;
  std::vector<TokenId> tokens;       // rows x max_len, padded with Vocabulary::kPad
  std::vector<std::size_t> lengths;  // 0 when the unit has no caption in this language

  std::span<const TokenId> sequence(std::size_t row) const {
    return std::span<const TokenId>(tokens).subspan(row * max_len, lengths[row]);
  }
};

// One caption per language per image. Units of one image never repeat
// within an epoch unless the image has several captions in a language.
struct Batch {
  std::vector<std::uint64_t> image_ids;
  Tensor features;  // size x D
  std::array<SlotBatch, 2> slots;

  std::size_t size() const noexcept { return image_ids.size(); }
};

class Batcher {
 public:
  // Throws ConfigError when batch_size < 2.
  Batcher(const CaptionDataset& data, std::size_t batch_size, std::uint64_t seed);

  std::size_t unit_count() const noexcept { return units_.size(); }
  std::size_t batches_per_epoch() const noexcept;
  // Shuffled with a generator seeded by (seed, epoch); the last batch may
  // be short.
  std::vector<Batch> epoch(std::size_t epoch_index) const;

 private:
  struct Unit {
    std::uint64_t image_id;
    std::array<std::ptrdiff_t, 2> record;  // -1 when absent
  };
  Batch assemble(const std::vector<Unit>& units, std::size_t begin, std::size_t end) const;

  const CaptionDataset* data_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::vector<Unit> units_;
};

std::vector<Batch> make_batches(const CaptionDataset& data, std::size_t batch_size, std::uint64_t seed,
                                std::size_t epoch = 0);

}  // namespace ame
