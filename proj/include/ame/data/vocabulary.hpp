// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ame {

using TokenId = std::uint32_t;

// Bijective token <-> index map for one language. Index 0 is padding and
// index 1 the unknown token; real tokens start at 2.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kFirstWord = 2;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  explicit Vocabulary(std::string language = {});

  // Builds from tokenized sentences; tokens are indexed in order of first
  // appearance, every token seen at least once is kept.
  static Vocabulary build(std::string language, const std::vector<std::vector<std::string>>& sentences);
  // Rebuilds from the full index -> token list (reserved entries included).
  static Vocabulary from_tokens(std::string language, const std::vector<std::string>& tokens);

  TokenId add(std::string_view token);
  std::optional<TokenId> find(std::string_view token) const;
  // Unknown tokens map to kUnk.
  TokenId lookup(std::string_view token) const;
  std::vector<TokenId> encode(const std::vector<std::string>& tokens) const;

  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const noexcept { return index_to_token_; }
  std::size_t size() const noexcept { return index_to_token_.size(); }
  const std::string& language() const noexcept { return language_; }

  // FNV-1a over the newline-joined token list; guards checkpoints against
  // being loaded with a different vocabulary.
  std::uint64_t content_hash() const noexcept;

 private:
  std::string language_;
  std::unordered_map<std::string, TokenId> token_to_index_;
  std::vector<std::string> index_to_token_;
};

}  // namespace ame
