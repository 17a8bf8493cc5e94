// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/training/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "ame/detail/binary.hpp"
#include "ame/error.hpp"

namespace ame {

namespace {

constexpr char kMagic[8] = {'A', 'M', 'E', 'C', 'K', 'P', 'T', '1'};

struct TableSpec {
  std::string name;  // empty for W
  std::size_t cols;
  bool vector;  // stored as a rank-1 tensor
};

std::vector<TableSpec> table_specs(const ModelDims& dims) {
  const std::size_t d = dims.word_dim, m = dims.joint_dim, D = dims.feature_dim;
  return {
      {std::string(param::kEmbX), d, false},  {std::string(param::kEmbY), d, false},
      {std::string(param::kGruWz), d, false}, {std::string(param::kGruWr), d, false},
      {std::string(param::kGruWh), d, false}, {std::string(param::kGruUz), m, false},
      {std::string(param::kGruUr), m, false}, {std::string(param::kGruUh), m, false},
      {std::string(param::kGruBz), m, true},  {std::string(param::kGruBr), m, true},
      {std::string(param::kGruBh), m, true},  {std::string(param::kImgWeight), D, false},
      {std::string(param::kImgBias), m, true}, {std::string(), d, false},
  };
}

std::uint32_t narrow(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw FormatError(std::string(what) + " does not fit the checkpoint format");
  return static_cast<std::uint32_t>(v);
}

void write_table(std::ostream& os, const Tensor& t) {
  detail::write_le<std::uint32_t>(os, narrow(t.rows(), "table row count"));
  for (double v : t.values()) detail::write_f32(os, v);
}

Tensor read_table(std::istream& is, const TableSpec& spec, std::size_t expect_rows) {
  const std::uint32_t rows = detail::read_le<std::uint32_t>(is, "table row count");
  const char* label = spec.name.empty() ? "W" : spec.name.c_str();
  if (expect_rows != 0 && rows != expect_rows) {
    throw FormatError(std::string("checkpoint table ") + label + " has " + std::to_string(rows) + " rows, expected " +
                      std::to_string(expect_rows));
  }
  if (spec.vector && rows != 1) throw FormatError(std::string("checkpoint table ") + label + " must have one row");
  Tensor t = spec.vector ? Tensor({spec.cols}) : Tensor({rows, spec.cols});
  for (double& v : t.values()) v = detail::read_f32(is, "table payload");
  if (!t.all_finite()) throw FormatError(std::string("checkpoint table ") + label + " holds non-finite values");
  return t;
}

}  // namespace

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write checkpoint " + path.string());
  const ModelDims& dims = c.model.dims;
  os.write(kMagic, sizeof kMagic);
  detail::write_le<std::uint32_t>(os, kCheckpointVersion);
  detail::write_le<std::uint32_t>(os, narrow(dims.word_dim, "d"));
  detail::write_le<std::uint32_t>(os, narrow(dims.joint_dim, "m"));
  detail::write_le<std::uint32_t>(os, narrow(dims.feature_dim, "D"));
  for (const auto& spec : table_specs(dims)) {
    write_table(os, spec.name.empty() ? c.model.map.w : c.model.params.value(spec.name));
  }
  detail::write_le<std::uint64_t>(os, c.vocab_x.content_hash());
  detail::write_le<std::uint64_t>(os, c.vocab_y.content_hash());

  nlohmann::json meta;
  meta["config"] = to_json(c.config);
  meta["mode"] = std::string(to_string(c.model.mode));
  meta["best_score"] = c.best_score;
  meta["step"] = c.step;
  meta["language_x"] = c.vocab_x.language();
  meta["language_y"] = c.vocab_y.language();
  meta["vocab_x"] = c.vocab_x.tokens();
  meta["vocab_y"] = c.vocab_y.tokens();
  const std::string text = meta.dump();
  detail::write_le<std::uint32_t>(os, narrow(text.size(), "metadata"));
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary* expect_x, const Vocabulary* expect_y) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw FormatError("not a checkpoint (bad magic): " + path.string());
  }
  const auto version = detail::read_le<std::uint32_t>(is, "version");
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint c;
  ModelDims& dims = c.model.dims;
  dims.word_dim = detail::read_le<std::uint32_t>(is, "d");
  dims.joint_dim = detail::read_le<std::uint32_t>(is, "m");
  dims.feature_dim = detail::read_le<std::uint32_t>(is, "D");
  if (dims.word_dim == 0 || dims.joint_dim == 0 || dims.feature_dim == 0) {
    throw FormatError("checkpoint has a zero dimension");
  }
  const std::size_t d = dims.word_dim, m = dims.joint_dim;
  for (const auto& spec : table_specs(dims)) {
    std::size_t rows = 0;  // embedding tables: any vocabulary size
    if (spec.name == param::kGruWz || spec.name == param::kGruWr || spec.name == param::kGruWh ||
        spec.name == param::kGruUz || spec.name == param::kGruUr || spec.name == param::kGruUh ||
        spec.name == param::kImgWeight) {
      rows = m;
    } else if (spec.vector) {
      rows = 1;
    } else if (spec.name.empty()) {
      rows = d;
    }
    Tensor t = read_table(is, spec, rows);
    if (spec.name.empty()) {
      c.model.map.w = std::move(t);
    } else {
      c.model.params.add(spec.name, std::move(t));
    }
  }
  const auto hash_x = detail::read_le<std::uint64_t>(is, "vocabulary hash");
  const auto hash_y = detail::read_le<std::uint64_t>(is, "vocabulary hash");
  const auto length = detail::read_le<std::uint32_t>(is, "metadata length");
  std::string text(length, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(length))) throw FormatError("truncated checkpoint metadata");

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(text);
    c.config = train_config_from_json(meta.at("config"));
    c.model.mode = parse_mode(meta.at("mode").get<std::string>());
    c.best_score = meta.at("best_score").get<double>();
    c.step = meta.at("step").get<std::int64_t>();
    c.vocab_x = Vocabulary::from_tokens(meta.at("language_x").get<std::string>(),
                                        meta.at("vocab_x").get<std::vector<std::string>>());
    c.vocab_y = Vocabulary::from_tokens(meta.at("language_y").get<std::string>(),
                                        meta.at("vocab_y").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt checkpoint metadata: ") + e.what());
  } catch (const Error& e) {
    throw FormatError(std::string("corrupt checkpoint metadata: ") + e.what());
  }

  if (c.vocab_x.content_hash() != hash_x || c.vocab_y.content_hash() != hash_y) {
    throw IncompatibleCheckpointError("checkpoint vocabulary hashes do not match its stored vocabularies");
  }
  if (c.model.table(Lang::X).rows() != c.vocab_x.size() || c.model.table(Lang::Y).rows() != c.vocab_y.size()) {
    throw FormatError("checkpoint embedding tables do not match its vocabularies");
  }
  if (expect_x && expect_x->content_hash() != hash_x) {
    throw IncompatibleCheckpointError("checkpoint was trained with a different " + expect_x->language() +
                                      " vocabulary");
  }
  if (expect_y && expect_y->content_hash() != hash_y) {
    throw IncompatibleCheckpointError("checkpoint was trained with a different " + expect_y->language() +
                                      " vocabulary");
  }
  return c;
}

}  // namespace ame
