// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/data/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "ame/error.hpp"
#include "ame/numerics/ops.hpp"

namespace ame {

namespace {

std::vector<std::string> make_words(std::size_t n, std::mt19937_64& rng) {
  static constexpr char kConsonants[] = "bdfgklmnprstvz";
  static constexpr char kVowels[] = "aeiou";
  std::uniform_int_distribution<int> cons(0, 13), vow(0, 4), syll(2, 3);
  std::set<std::string> seen;
  std::vector<std::string> words;
  while (words.size() < n) {
    std::string w;
    for (int s = syll(rng); s > 0; --s) {
      w += kConsonants[cons(rng)];
      w += kVowels[vow(rng)];
    }
    if (seen.insert(w).second) words.push_back(w);
  }
  return words;
}

std::string translate(const std::string& word) { return "q" + std::string(word.rbegin(), word.rend()); }

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// Draws bags of distinct word indices, cycling through a reshuffled deck so
// every word is used before any repeats.
class WordDeck {
 public:
  WordDeck(std::size_t words, std::mt19937_64& rng) : words_(words), rng_(&rng) {}

  std::vector<std::size_t> bag(std::size_t len) {
    std::vector<std::size_t> out;
    while (out.size() < len) {
      if (deck_.empty()) {
        deck_.resize(words_);
        for (std::size_t i = 0; i < words_; ++i) deck_[i] = i;
        std::shuffle(deck_.begin(), deck_.end(), *rng_);
      }
      const std::size_t w = deck_.back();
      deck_.pop_back();
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
    return out;
  }

 private:
  std::size_t words_;
  std::mt19937_64* rng_;
  std::vector<std::size_t> deck_;
};

}  // namespace

Fixture make_fixture(const FixtureOptions& o) {
  if (o.images < 2 || o.words < 2 || o.word_dim == 0 || o.feature_dim == 0) {
    throw ConfigError("fixture needs at least 2 images, 2 words and positive dimensions");
  }
  if (o.min_caption == 0 || o.min_caption > o.max_caption || o.max_caption > o.words) {
    throw ConfigError("fixture caption lengths must satisfy 1 <= min <= max <= words");
  }
  if (!(o.drop_word >= 0.0 && o.drop_word < 1.0)) throw ConfigError("fixture drop_word must be in [0, 1)");
  if (o.lexicon_pairs > o.words || o.eval_pairs > o.lexicon_pairs || o.captions_per_language == 0) {
    throw ConfigError("fixture lexicon sizes must satisfy eval <= pairs <= words");
  }
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Fixture f;
  f.words_x = make_words(o.words, rng);
  for (const auto& w : f.words_x) f.words_y.push_back(translate(w));

  // initial word vectors, pre-aligned
  f.vectors_x = Tensor({o.words, o.word_dim});
  f.vectors_y = Tensor({o.words, o.word_dim});
  for (std::size_t i = 0; i < o.words; ++i) {
    auto x = f.vectors_x.row(i);
    auto y = f.vectors_y.row(i);
    for (double& v : x) v = gauss(rng);
    l2_normalize_inplace(x);
    for (std::size_t k = 0; k < o.word_dim; ++k) y[k] = x[k] + o.embedding_noise * gauss(rng);
    l2_normalize_inplace(y);
  }

  // one concept vector per word
  const double scale = 1.0 / std::sqrt(static_cast<double>(o.feature_dim));
  Tensor concepts({o.words, o.feature_dim});
  for (double& v : concepts.values()) v = scale * gauss(rng);

  const std::size_t total = o.images + o.val_images;
  std::vector<std::uint64_t> ids;
  Tensor features({total, o.feature_dim});
  WordDeck deck(o.words, rng);
  std::uniform_int_distribution<std::size_t> length(o.min_caption, o.max_caption);
  for (std::size_t i = 0; i < total; ++i) {
    const std::uint64_t id = 1000 + i;
    ids.push_back(id);
    auto bag = deck.bag(length(rng));
    auto feat = features.row(i);
    for (auto w : bag) {
      const auto c = concepts.row(w);
      for (std::size_t k = 0; k < o.feature_dim; ++k) feat[k] += c[k];
    }
    for (double& v : feat) v += o.feature_noise * scale * gauss(rng);

    auto& out = i < o.images ? f.train_captions : f.val_captions;
    std::bernoulli_distribution drop(o.drop_word);
    auto mention = [&] {
      std::vector<std::size_t> kept;
      for (auto w : bag) {
        if (!drop(rng)) kept.push_back(w);
      }
      if (kept.empty()) kept.push_back(bag[std::uniform_int_distribution<std::size_t>(0, bag.size() - 1)(rng)]);
      return kept;
    };
    for (std::size_t c = 0; c < o.captions_per_language; ++c) {
      if (c > 0) std::shuffle(bag.begin(), bag.end(), rng);
      std::vector<std::string> xs, ys;
      for (auto w : mention()) xs.push_back(f.words_x[w]);
      for (auto w : mention()) ys.push_back(f.words_y[w]);
      if (o.reverse_y) std::reverse(ys.begin(), ys.end());
      out.push_back({id, o.language_x, join(xs)});
      out.push_back({id, o.language_y, join(ys)});
    }
  }
  f.features = ImageFeatureSet(std::move(ids), std::move(features));
  if (o.val_images == 0) f.val_captions = f.train_captions;

  std::vector<std::size_t> order(o.words);
  for (std::size_t i = 0; i < o.words; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t p = 0; p < o.lexicon_pairs; ++p) {
    auto& dst = p < o.lexicon_pairs - o.eval_pairs ? f.lexicon_train : f.lexicon_eval;
    dst.emplace_back(f.words_x[order[p]], f.words_y[order[p]]);
  }
  return f;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  namespace ff = fixture_files;
  save_captions(dir / ff::kTrainCaptions, fixture.train_captions);
  save_captions(dir / ff::kValCaptions, fixture.val_captions);
  save_features(dir / ff::kFeatures, fixture.features);
  save_embeddings(dir / ff::kEmbeddingsX, fixture.words_x, fixture.vectors_x);
  save_embeddings(dir / ff::kEmbeddingsY, fixture.words_y, fixture.vectors_y);
  auto write_pairs = [&](const char* name, const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::ofstream os(dir / name);
    if (!os) throw IoError("cannot write " + (dir / name).string());
    for (const auto& [a, b] : pairs) os << a << ' ' << b << '\n';
  };
  write_pairs(ff::kLexiconTrain, fixture.lexicon_train);
  write_pairs(ff::kLexiconEval, fixture.lexicon_eval);
}

}  // namespace ame
