// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/data/dataset.hpp"

#include <algorithm>
#include <random>

#include "ame/data/tokenize.hpp"
#include "ame/error.hpp"

namespace ame {

CaptionDataset::CaptionDataset(std::vector<CaptionRecord> records, std::shared_ptr<const ImageFeatureSet> images,
                               Split split)
    : records_(std::move(records)), images_(std::move(images)), split_(split) {
  if (!images_) throw ContractError("caption dataset needs an image feature set");
  for (const auto& r : records_) {
    if (!images_->contains(r.image_id)) {
      throw ConfigError("caption refers to image " + std::to_string(r.image_id) + " with no features");
    }
    if (r.tokens.empty()) throw ContractError("caption of image " + std::to_string(r.image_id) + " is empty");
  }
  index();
}

CaptionDataset CaptionDataset::from_raw(const std::vector<RawCaption>& raw, const Vocabulary& x_vocab,
                                        const Vocabulary* y_vocab, std::shared_ptr<const ImageFeatureSet> images,
                                        Split split) {
  std::vector<CaptionRecord> records;
  records.reserve(raw.size());
  for (const auto& cap : raw) {
    const Vocabulary* vocab = nullptr;
    Lang lang = Lang::X;
    if (cap.language == x_vocab.language()) {
      vocab = &x_vocab;
    } else if (y_vocab && cap.language == y_vocab->language()) {
      vocab = y_vocab;
      lang = Lang::Y;
    } else {
      throw ConfigError("caption of image " + std::to_string(cap.image_id) + " has unexpected language '" +
                        cap.language + "'");
    }
    auto tokens = tokenize(cap.text);
    if (tokens.empty()) continue;
    records.push_back({cap.image_id, lang, vocab->encode(tokens)});
  }
  return CaptionDataset(std::move(records), std::move(images), split);
}

void CaptionDataset::index() {
  image_order_.clear();
  by_image_.clear();
  image_pos_.clear();
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    auto [it, inserted] = image_pos_.emplace(r.image_id, image_order_.size());
    if (inserted) {
      image_order_.push_back(r.image_id);
      by_image_.emplace_back();
    }
    by_image_[it->second][slot(r.lang)].push_back(i);
  }
}

const std::vector<std::size_t>& CaptionDataset::captions_of(std::uint64_t image, Lang lang) const {
  auto it = image_pos_.find(image);
  if (it == image_pos_.end()) throw ContractError("image " + std::to_string(image) + " has no captions");
  return by_image_[it->second][slot(lang)];
}

bool CaptionDataset::has_language(Lang lang) const {
  return std::any_of(records_.begin(), records_.end(), [lang](const CaptionRecord& r) { return r.lang == lang; });
}

CaptionDataset CaptionDataset::only_language(Lang lang) const {
  std::vector<CaptionRecord> kept;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(kept),
               [lang](const CaptionRecord& r) { return r.lang == lang; });
  return CaptionDataset(std::move(kept), images_, split_);
}

CaptionDataset CaptionDataset::subset(const std::vector<std::uint64_t>& image_ids) const {
  std::vector<CaptionRecord> kept;
  for (auto id : image_ids) {
    for (Lang l : kLangs)
      for (std::size_t i : captions_of(id, l)) kept.push_back(records_[i]);
  }
  return CaptionDataset(std::move(kept), images_, split_);
}

Batcher::Batcher(const CaptionDataset& data, std::size_t batch_size, std::uint64_t seed)
    : data_(&data), batch_size_(batch_size), seed_(seed) {
  if (batch_size < 2) throw ConfigError("batch size must be at least 2, got " + std::to_string(batch_size));
  for (auto id : data.image_order()) {
    const auto& xs = data.captions_of(id, Lang::X);
    const auto& ys = data.captions_of(id, Lang::Y);
    const std::size_t n = std::max(xs.size(), ys.size());
    for (std::size_t j = 0; j < n; ++j) {
      Unit u{id, {-1, -1}};
      if (!xs.empty()) u.record[0] = static_cast<std::ptrdiff_t>(xs[j % xs.size()]);
      if (!ys.empty()) u.record[1] = static_cast<std::ptrdiff_t>(ys[j % ys.size()]);
      units_.push_back(u);
    }
  }
}

std::size_t Batcher::batches_per_epoch() const noexcept { return (units_.size() + batch_size_ - 1) / batch_size_; }

std::vector<Batch> Batcher::epoch(std::size_t epoch_index) const {
  std::vector<Unit> order = units_;
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(epoch_index)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Batch> out;
  for (std::size_t b = 0; b < order.size(); b += batch_size_) {
    out.push_back(assemble(order, b, std::min(order.size(), b + batch_size_)));
  }
  return out;
}

Batch Batcher::assemble(const std::vector<Unit>& units, std::size_t begin, std::size_t end) const {
  const auto& images = data_->images();
  const std::size_t n = end - begin;
  Batch batch;
  batch.features = Tensor({n, images.dim()});
  for (std::size_t s = 0; s < 2; ++s) {
    auto& sb = batch.slots[s];
    sb.lengths.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto rec = units[begin + i].record[s];
      if (rec >= 0) sb.max_len = std::max(sb.max_len, data_->records()[static_cast<std::size_t>(rec)].tokens.size());
    }
    sb.tokens.assign(n * sb.max_len, Vocabulary::kPad);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Unit& u = units[begin + i];
    batch.image_ids.push_back(u.image_id);
    const auto src = images.matrix().row(images.row_of(u.image_id));
    std::copy(src.begin(), src.end(), batch.features.row(i).begin());
    for (std::size_t s = 0; s < 2; ++s) {
      if (u.record[s] < 0) continue;
      const auto& toks = data_->records()[static_cast<std::size_t>(u.record[s])].tokens;
      auto& sb = batch.slots[s];
      sb.lengths[i] = toks.size();
      std::copy(toks.begin(), toks.end(), sb.tokens.begin() + static_cast<std::ptrdiff_t>(i * sb.max_len));
    }
  }
  return batch;
}

std::vector<Batch> make_batches(const CaptionDataset& data, std::size_t batch_size, std::uint64_t seed,
                                std::size_t epoch) {
  return Batcher(data, batch_size, seed).epoch(epoch);
}

}  // namespace ame
