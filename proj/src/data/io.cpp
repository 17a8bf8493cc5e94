// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/data/io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ame/detail/binary.hpp"
#include "ame/error.hpp"
#include "ame/numerics/ops.hpp"

namespace ame {

namespace {

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& language) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : language) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return seed ^ h;
}

// Seeded uniform draw for rows not found, then row normalisation. The
// padding row is left at zero.
void fill_missing(Tensor& out, const std::vector<bool>& found, const Vocabulary& vocab, std::uint64_t seed) {
  const std::size_t dim = out.cols();
  std::mt19937_64 rng(mix_seed(seed, vocab.language()));
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> uni(-bound, bound);
  for (std::size_t r = Vocabulary::kUnk; r < vocab.size(); ++r) {
    auto row = out.row(r);
    if (!found[r]) {
      for (double& x : row) x = uni(rng);
    }
    const double n = norm(row);
    if (!(n > 0.0)) throw DegenerateInputError("embedding for '" + vocab.token(static_cast<TokenId>(r)) + "' is zero");
    l2_normalize_inplace(row);
  }
}

}  // namespace

Tensor load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim,
                       std::uint64_t seed) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("embedding file '" + path.string() + "' is empty");
  const auto header = split_ws(line);
  std::size_t count = 0, file_dim = 0;
  if (header.size() != 2 || !parse_uint(header[0], count) || !parse_uint(header[1], file_dim)) {
    throw ParseError("embedding header must be '<count> <d>'", 1);
  }
  if (file_dim != dim) {
    throw FormatError("embedding file '" + path.string() + "' has d=" + std::to_string(file_dim) + ", expected " +
                      std::to_string(dim));
  }

  Tensor out({vocab.size(), dim});
  std::vector<bool> found(vocab.size(), false);
  std::size_t line_no = 1;
  std::size_t vectors = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    ++vectors;
    if (fields.size() != dim + 1) {
      throw ParseError("expected token and " + std::to_string(dim) + " values, got " +
                           std::to_string(fields.size() - 1) + " values",
                       line_no);
    }
    std::vector<double> row(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_double(fields[k + 1], row[k])) {
        throw ParseError("malformed float '" + std::string(fields[k + 1]) + "'", line_no);
      }
    }
    const auto id = vocab.find(fields[0]);
    if (!id || *id < Vocabulary::kFirstWord || found[*id]) continue;
    found[*id] = true;
    std::copy(row.begin(), row.end(), out.row(*id).begin());
  }
  if (vectors != count) {
    throw FormatError("embedding file '" + path.string() + "' declares " + std::to_string(count) + " vectors but has " +
                      std::to_string(vectors));
  }

  fill_missing(out, found, vocab, seed);
  return out;
}

Tensor random_embeddings(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  Tensor out({vocab.size(), dim});
  fill_missing(out, std::vector<bool>(vocab.size(), false), vocab, seed);
  return out;
}

void save_embeddings(const std::filesystem::path& path, const std::vector<std::string>& tokens,
                     const Tensor& vectors) {
  if (tokens.size() != vectors.rows()) throw DimensionError("save_embeddings: token count does not match rows");
  auto out = open_out(path);
  out << tokens.size() << ' ' << vectors.cols() << '\n';
  char buf[64];
  for (std::size_t r = 0; r < tokens.size(); ++r) {
    out << tokens[r];
    for (double x : vectors.row(r)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<TokenPair> load_lexicon(const std::filesystem::path& path, const Vocabulary& src,
                                    const Vocabulary& tgt) {
  auto in = open_in(path);
  std::vector<TokenPair> pairs;
  std::set<TokenPair> seen;
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_ws(line);
    if (fields.size() < 2) continue;
    const auto s = src.find(fields[0]);
    const auto t = tgt.find(fields[1]);
    if (!s || !t || *s < Vocabulary::kFirstWord || *t < Vocabulary::kFirstWord) continue;
    if (seen.insert({*s, *t}).second) pairs.emplace_back(*s, *t);
  }
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return pairs;
}

BilingualLexicon BilingualLexicon::make(std::vector<TokenPair> train, std::vector<TokenPair> eval) {
  const std::set<TokenPair> in_train(train.begin(), train.end());
  std::erase_if(eval, [&](const TokenPair& p) { return in_train.count(p) != 0; });
  return {std::move(train), std::move(eval)};
}

std::vector<RawCaption> load_captions(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<RawCaption> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError("caption line needs three tab-separated fields", line_no);
    RawCaption cap;
    if (!parse_uint(std::string_view(line).substr(0, t1), cap.image_id)) {
      throw ParseError("malformed image id '" + line.substr(0, t1) + "'", line_no);
    }
    cap.language = line.substr(t1 + 1, t2 - t1 - 1);
    if (cap.language.empty()) throw ParseError("empty language tag", line_no);
    cap.text = line.substr(t2 + 1);
    out.push_back(std::move(cap));
  }
  return out;
}

void save_captions(const std::filesystem::path& path, const std::vector<RawCaption>& captions) {
  auto out = open_out(path);
  for (const auto& c : captions) out << c.image_id << '\t' << c.language << '\t' << c.text << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ImageFeatureSet::ImageFeatureSet(std::vector<std::uint64_t> ids, Tensor features)
    : ids_(std::move(ids)), features_(std::move(features)) {
  if (features_.rows() != ids_.size() || features_.rank() != 2) {
    throw DimensionError("image feature matrix " + shape_str(features_.shape()) + " does not match " +
                         std::to_string(ids_.size()) + " ids");
  }
  require_finite(features_, "image features");
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!row_of_.emplace(ids_[i], i).second) {
      throw FormatError("duplicate image id " + std::to_string(ids_[i]) + " in feature set");
    }
  }
}

std::size_t ImageFeatureSet::row_of(std::uint64_t id) const {
  auto it = row_of_.find(id);
  if (it == row_of_.end()) throw ContractError("no features for image " + std::to_string(id));
  return it->second;
}

ImageFeatureSet load_features(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, "AMEFEAT1", 8) != 0) {
    throw FormatError("'" + path.string() + "' is not a feature file (bad magic)");
  }
  const auto count = detail::read_le<std::uint32_t>(in, "feature count");
  const auto dim = detail::read_le<std::uint32_t>(in, "feature dimension");
  std::vector<std::uint64_t> ids(count);
  Tensor features({count, dim});
  for (std::uint32_t i = 0; i < count; ++i) {
    ids[i] = detail::read_le<std::uint64_t>(in, "image id");
    for (std::uint32_t k = 0; k < dim; ++k) features(i, k) = detail::read_f32(in, "feature value");
  }
  return ImageFeatureSet(std::move(ids), std::move(features));
}

void save_features(const std::filesystem::path& path, const ImageFeatureSet& features) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write("AMEFEAT1", 8);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(features.size()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(features.dim()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    detail::write_le<std::uint64_t>(out, features.ids()[i]);
    for (double x : features.matrix().row(i)) detail::write_f32(out, x);
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace ame
