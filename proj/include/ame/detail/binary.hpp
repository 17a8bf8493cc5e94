// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "ame/error.hpp"

// Explicit little-endian encoding for the binary file formats.
namespace ame::detail {

template <typename U>
void write_le(std::ostream& os, U value) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  os.write(buf, sizeof(U));
}

template <typename U>
U read_le(std::istream& is, const char* what) {
  unsigned char buf[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(U))) {
    throw FormatError(std::string("truncated file while reading ") + what);
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(buf[i]) << (8 * i);
  return value;
}

inline void write_f32(std::ostream& os, double value) {
  write_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(static_cast<float>(value)));
}

inline double read_f32(std::istream& is, const char* what) {
  return static_cast<double>(std::bit_cast<float>(read_le<std::uint32_t>(is, what)));
}

}  // namespace ame::detail
