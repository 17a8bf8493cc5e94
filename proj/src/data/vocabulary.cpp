// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/data/vocabulary.hpp"

#include "ame/error.hpp"

namespace ame {

Vocabulary::Vocabulary(std::string language) : language_(std::move(language)) {
  add(kPadToken);
  add(kUnkToken);
}

Vocabulary Vocabulary::build(std::string language, const std::vector<std::vector<std::string>>& sentences) {
  Vocabulary vocab(std::move(language));
  for (const auto& sentence : sentences)
    for (const auto& tok : sentence) vocab.add(tok);
  return vocab;
}

Vocabulary Vocabulary::from_tokens(std::string language, const std::vector<std::string>& tokens) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    throw FormatError("vocabulary for '" + language + "' does not start with the reserved tokens");
  }
  Vocabulary vocab(std::move(language));
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (vocab.add(tokens[i]) != i) throw FormatError("duplicate token '" + tokens[i] + "' in vocabulary");
  }
  return vocab;
}

TokenId Vocabulary::add(std::string_view token) {
  std::string key(token);
  auto it = token_to_index_.find(key);
  if (it != token_to_index_.end()) return it->second;
  const auto id = static_cast<TokenId>(index_to_token_.size());
  token_to_index_.emplace(key, id);
  index_to_token_.push_back(std::move(key));
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = token_to_index_.find(std::string(token));
  if (it == token_to_index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::lookup(std::string_view token) const { return find(token).value_or(kUnk); }

std::vector<TokenId> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lookup(t));
  return out;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= index_to_token_.size()) {
    throw ContractError("token index " + std::to_string(id) + " out of range for vocabulary '" + language_ + "'");
  }
  return index_to_token_[id];
}

std::uint64_t Vocabulary::content_hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& tok : index_to_token_) {
    for (unsigned char c : tok) mix(c);
    mix('\n');
  }
  return h;
}

}  // namespace ame
