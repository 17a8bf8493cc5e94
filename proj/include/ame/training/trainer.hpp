// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "ame/data/dataset.hpp"
#include "ame/data/io.hpp"
#include "ame/encoders/model.hpp"
#include "ame/training/config.hpp"

namespace ame {

struct BatchLoss {
  double value = 0.0;
  std::size_t active_hinges = 0;
  std::size_t caption_rows = 0;
};

// Ranking loss of one batch: captions of both language slots against the
// batch images, negatives chosen by image id. The backward variant adds
// the gradients of every encoder parameter to `params`; embedding tables
// only receive gradients when `table_grads` is set.
double ranking_batch_loss(const ParamSet& params, const Batch& batch, Mode mode, double margin);
BatchLoss ranking_batch_backward(ParamSet& params, const Batch& batch, Mode mode, double margin, bool table_grads);

// One row of the metrics log. Recalls are percentages, losses are means
// over the epoch's batches (ranking) or the alignment loss on the training
// lexicon at validation time. NaN marks a quantity the ablation lacks.
struct EpochMetrics {
  std::size_t epoch = 0;
  std::int64_t step = 0;
  double loss_ranking = 0.0;
  double loss_align = 0.0;
  double r1_i2t = 0.0, r1_t2i = 0.0;
  double r5_i2t = 0.0, r5_t2i = 0.0;
  double r10_i2t = 0.0, r10_t2i = 0.0;
  double mr_i2t = 0.0, mr_t2i = 0.0;
  double alignment_ratio = 0.0;  // fraction in [0, 1]
  double lr = 0.0;

  // Early-stopping criterion: sum of R@1, R@5, R@10 over both directions.
  double score() const { return r1_i2t + r5_i2t + r10_i2t + r1_t2i + r5_t2i + r10_t2i; }
};

struct TrainResult {
  AmeModel best;   // model at the best validation score
  AmeModel last;   // model after the final step
  std::vector<EpochMetrics> log;
  double best_score = 0.0;
  std::int64_t best_step = 0;
  std::int64_t steps = 0;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Adam on the ranking loss every step, an alignment update every
// `align_interval` steps (ame only), validation after every epoch,
// learning-rate decay from `decay_epoch` on, early stopping on the
// validation score after `patience` passes without strict improvement.
// Inconsistent data or configuration raises ConfigError before the first step.
TrainResult train(const TrainConfig& config, AmeModel model, const CaptionDataset& train_data,
                  const CaptionDataset& val_data, const BilingualLexicon& lexicon, const EpochCallback& on_epoch = {});

inline constexpr const char* kMetricsHeader =
    "epoch,step,loss_ranking,loss_align,r1_i2t,r1_t2i,r5_i2t,r5_t2i,mr_i2t,mr_t2i,alignment_ratio,lr";

// Fixed-precision CSV so identical runs give identical bytes.
void write_metrics_csv(std::ostream& os, const std::vector<EpochMetrics>& log);

}  // namespace ame
