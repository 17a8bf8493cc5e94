// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "ame/alignment/alignment.hpp"
#include "ame/error.hpp"
#include "ame/evaluation/evaluation.hpp"
#include "ame/losses/losses.hpp"
#include "ame/numerics/ops.hpp"
#include "ame/training/adam.hpp"

namespace ame {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CaptionRow {
  std::size_t unit;
  Lang lang;
  GruTrace trace;
  JointVector joint;
};

struct ImageRow {
  std::vector<double> pre;
  JointVector joint;
};

struct Forward {
  std::vector<CaptionRow> captions;
  std::vector<ImageRow> images;
  RankingLayout layout;
  Tensor caption_matrix;
  Tensor image_matrix;
  RankingLoss loss;
};

Tensor stack_rows(std::size_t rows, std::size_t m, auto&& get) {
  Tensor out({rows, m});
  for (std::size_t i = 0; i < rows; ++i) {
    const auto v = get(i);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

Forward forward(const ParamSet& params, const Batch& batch, Mode mode, double margin) {
  const GruView gru = gru_view(params);
  const ProjectorView proj = projector_view(params);
  const std::size_t m = gru.hidden_dim();
  Forward f;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ImageRow row;
    row.pre = project_image(batch.features.row(i), proj);
    row.joint = to_joint(row.pre, mode);
    f.images.push_back(std::move(row));
  }
  for (Lang lang : kLangs) {
    const SlotBatch& slot_batch = batch.slots[slot(lang)];
    const Tensor& table = params.value(table_param(lang));
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (slot_batch.lengths[i] == 0) continue;
      CaptionRow row{i, lang, {}, {}};
      const auto h = gru_forward(gru, table, slot_batch.sequence(i), &row.trace);
      row.joint = to_joint(h, mode);
      f.layout.gold_column.push_back(i);
      f.layout.group.push_back(static_cast<std::uint8_t>(slot(lang)));
      f.captions.push_back(std::move(row));
    }
  }
  if (f.captions.empty()) throw ConfigError("batch has no captions");
  f.layout.column_image = batch.image_ids;
  f.caption_matrix =
      stack_rows(f.captions.size(), m, [&](std::size_t r) { return f.captions[r].joint.values.values(); });
  f.image_matrix = stack_rows(f.images.size(), m, [&](std::size_t r) { return f.images[r].joint.values.values(); });
  f.loss = ranking_loss(similarity_matrix(f.caption_matrix, f.image_matrix, mode), f.layout, margin);
  return f;
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<TokenPair> sample_pairs(const std::vector<TokenPair>& pairs, std::size_t sample, std::uint64_t seed,
                                    std::int64_t step) {
  if (sample == 0 || sample >= pairs.size()) return pairs;
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), 0x616c6eu};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(sample);
  std::sort(order.begin(), order.end());
  std::vector<TokenPair> out;
  for (auto i : order) out.push_back(pairs[i]);
  return out;
}

void renormalize_rows(Tensor& table) {
  for (std::size_t r = Vocabulary::kFirstWord; r < table.rows(); ++r) l2_normalize_inplace(table.row(r));
  // The unknown row is trained like any word.
  if (table.rows() > Vocabulary::kUnk) l2_normalize_inplace(table.row(Vocabulary::kUnk));
}

void check_inputs(const TrainConfig& config, const AmeModel& model, const CaptionDataset& train_data,
                  const CaptionDataset& val_data, const BilingualLexicon& lexicon) {
  config.validate();
  if (model.dims.word_dim != config.embedding_dim || model.dims.joint_dim != config.joint_dim) {
    throw ConfigError("model dimensions (d=" + std::to_string(model.dims.word_dim) + ", m=" +
                      std::to_string(model.dims.joint_dim) + ") disagree with the configuration (d=" +
                      std::to_string(config.embedding_dim) + ", m=" + std::to_string(config.joint_dim) + ")");
  }
  if (model.mode != config.mode) throw ConfigError("model mode disagrees with the configuration");
  for (const CaptionDataset* d : {&train_data, &val_data}) {
    if (d->records().empty()) throw ConfigError("training and validation data must not be empty");
    if (d->images().dim() != model.dims.feature_dim) {
      throw ConfigError("image features have D=" + std::to_string(d->images().dim()) + ", model expects D=" +
                        std::to_string(model.dims.feature_dim));
    }
    if (!d->has_language(Lang::X)) throw ConfigError("captions in the first language are required");
  }
  if (config.bilingual() && !train_data.has_language(Lang::Y)) {
    throw ConfigError(std::string(to_string(config.ablation)) + " training needs captions in both languages");
  }
  if (config.uses_alignment()) {
    if (lexicon.train.empty()) throw ConfigError("alignment training needs a non-empty training lexicon");
    const std::size_t pool = std::min(full_pool(model.table(Lang::X)).size(), full_pool(model.table(Lang::Y)).size());
    if (config.knn > pool) {
      throw ConfigError("knn = " + std::to_string(config.knn) + " exceeds the vocabulary size " +
                        std::to_string(pool));
    }
  }
  for (const auto* pairs : {&lexicon.train, &lexicon.eval}) {
    for (const auto& [s, t] : *pairs) {
      if (s >= model.table(Lang::X).rows() || t >= model.table(Lang::Y).rows()) {
        throw ConfigError("lexicon index outside the embedding tables");
      }
    }
  }
}

}  // namespace

double ranking_batch_loss(const ParamSet& params, const Batch& batch, Mode mode, double margin) {
  return forward(params, batch, mode, margin).loss.value;
}

BatchLoss ranking_batch_backward(ParamSet& params, const Batch& batch, Mode mode, double margin, bool table_grads) {
  const Forward f = forward(params, batch, mode, margin);
  const SimilarityGrads g = similarity_matrix_backward(f.caption_matrix, f.image_matrix, f.loss.grad, mode);

  const GruView gru = gru_view(params);
  GruGrads gru_g = gru_grads(params);
  for (std::size_t r = 0; r < f.captions.size(); ++r) {
    const CaptionRow& row = f.captions[r];
    const auto d_h = to_joint_backward(row.trace.h, row.joint, g.captions.row(r));
    const std::string& name = table_param(row.lang);
    gru_backward(gru, params.value(name), row.trace, d_h, &gru_g, table_grads ? &params.grad(name) : nullptr);
  }
  ProjectorGrads proj_g = projector_grads(params);
  for (std::size_t i = 0; i < f.images.size(); ++i) {
    const auto d_pre = to_joint_backward(f.images[i].pre, f.images[i].joint, g.images.row(i));
    project_image_backward(batch.features.row(i), d_pre, proj_g);
  }
  return {f.loss.value, f.loss.active_hinges, f.captions.size()};
}

TrainResult train(const TrainConfig& config, AmeModel model, const CaptionDataset& train_data,
                  const CaptionDataset& val_data, const BilingualLexicon& lexicon, const EpochCallback& on_epoch) {
  check_inputs(config, model, train_data, val_data, lexicon);
  const bool bilingual = config.bilingual();
  const CaptionDataset mono_train = bilingual ? CaptionDataset() : train_data.only_language(Lang::X);
  const CaptionDataset& data = bilingual ? train_data : mono_train;
  const double margin = config.resolved_margin();

  std::vector<std::string> trainable;
  for (const auto& name : model.params.names()) {
    const bool is_table = name == param::kEmbX || name == param::kEmbY;
    if (!is_table || (config.trains_tables() && (bilingual || name == param::kEmbX))) trainable.push_back(name);
  }
  if (!config.uses_alignment()) model.map = LinearMap::identity(model.dims.word_dim);

  std::vector<TokenPair> align_pairs = lexicon.train;
  if (config.align_with_eval_pairs) {
    align_pairs.insert(align_pairs.end(), lexicon.eval.begin(), lexicon.eval.end());
    std::sort(align_pairs.begin(), align_pairs.end());
  }

  const Batcher batcher(data, config.batch_size, config.seed);
  AdamState adam;
  TrainResult result;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::int64_t step = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = epoch >= config.decay_epoch ? config.learning_rate / config.decay_factor : config.learning_rate;
    double loss_sum = 0.0;
    const auto batches = batcher.epoch(epoch - 1);
    for (const Batch& batch : batches) {
      model.params.zero_grad();
      loss_sum += ranking_batch_backward(model.params, batch, config.mode, margin, config.trains_tables()).value;
      if (config.clip_norm > 0.0) {
        const double norm = model.params.grad_norm();
        if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm at step " + std::to_string(step + 1));
        if (norm > config.clip_norm) model.params.scale_grads(config.clip_norm / norm);
      }
      adam_step(model.params, adam, lr, trainable);
      if (config.trains_tables()) {
        renormalize_rows(model.table(Lang::X));
        if (bilingual) renormalize_rows(model.table(Lang::Y));
      }
      ++step;
      if (config.uses_alignment() && step % static_cast<std::int64_t>(config.align_interval) == 0) {
        const auto pairs = sample_pairs(align_pairs, config.align_sample, config.seed, step);
        alignment_update(model.table(Lang::X), model.table(Lang::Y), model.map, pairs,
                         {config.knn, config.lr_align, true}, step / static_cast<std::int64_t>(config.align_interval));
      }
    }

    EpochMetrics row;
    row.epoch = epoch;
    row.step = step;
    row.lr = lr;
    row.loss_ranking = loss_sum / static_cast<double>(batches.size());
    const EvalOptions opts{1, Lang::X, CaptionOrientation::CandidateAsImage};
    const RetrievalReport i2t = evaluate_retrieval(model, val_data, Direction::I2T, opts);
    const RetrievalReport t2i = evaluate_retrieval(model, val_data, Direction::T2I, opts);
    row.r1_i2t = i2t.r1;
    row.r5_i2t = i2t.r5;
    row.r10_i2t = i2t.r10;
    row.mr_i2t = i2t.median_rank;
    row.r1_t2i = t2i.r1;
    row.r5_t2i = t2i.r5;
    row.r10_t2i = t2i.r10;
    row.mr_t2i = t2i.median_rank;
    row.alignment_ratio = kNaN;
    row.loss_align = kNaN;
    if (bilingual) {
      const Tensor& x = model.table(Lang::X);
      const Tensor& y = model.table(Lang::Y);
      if (!lexicon.eval.empty()) {
        const CslsIndex index(x, y, model.map, config.knn, full_pool(x), full_pool(y));
        row.alignment_ratio = alignment_ratio(lexicon.eval, index);
      }
      if (!align_pairs.empty()) {
        const auto cache = compute_neighborhoods(x, y, align_pairs, model.map, config.knn, full_pool(x),
                                                 full_pool(y), step);
        row.loss_align = rcsls_loss(x, y, align_pairs, model.map, cache, config.knn).value;
      }
    }
    result.log.push_back(row);
    if (on_epoch) on_epoch(row);

    if (row.score() > best) {
      best = row.score();
      result.best = model;
      result.best_step = step;
      stale = 0;
    } else if (++stale >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }
  result.best_score = best;
  result.steps = step;
  result.last = std::move(model);
  return result;
}

void write_metrics_csv(std::ostream& os, const std::vector<EpochMetrics>& log) {
  os << kMetricsHeader << '\n';
  for (const auto& r : log) {
    os << r.epoch << ',' << r.step << ',' << fixed(r.loss_ranking, 6) << ',' << fixed(r.loss_align, 6) << ','
       << fixed(r.r1_i2t, 4) << ',' << fixed(r.r1_t2i, 4) << ',' << fixed(r.r5_i2t, 4) << ',' << fixed(r.r5_t2i, 4)
       << ',' << fixed(r.mr_i2t, 1) << ',' << fixed(r.mr_t2i, 1) << ',' << fixed(r.alignment_ratio, 6) << ','
       << fixed(r.lr, 10) << '\n';
  }
}

}  // namespace ame
