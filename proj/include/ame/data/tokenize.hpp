// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ame {

// Lowercases, splits on Unicode whitespace and strips leading/trailing
// punctuation from every token. Input is UTF-8; invalid bytes are kept
// as-is. Empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace ame
