// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "ame/alignment/alignment.hpp"
#include "ame/cli/run_config.hpp"
#include "ame/data/tokenize.hpp"
#include "ame/error.hpp"
#include "ame/evaluation/evaluation.hpp"
#include "ame/training/checkpoint.hpp"
#include "ame/training/trainer.hpp"

namespace ame::cli {

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

std::uint64_t seed_override(std::uint64_t fallback, std::ostream& err) {
  const char* env = std::getenv("AME_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) throw ConfigError(std::string("AME_SEED is not an unsigned integer: ") + env);
  err << "seed overridden by AME_SEED=" << seed << '\n';
  return seed;
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DegenerateInputError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

TrainConfig fixture_train_config(Mode mode, Ablation ablation) {
  TrainConfig c = TrainConfig::defaults(Preset::Multi30k, mode);
  c.ablation = ablation;
  c.batch_size = 16;
  c.joint_dim = 32;
  c.embedding_dim = 16;
  c.learning_rate = 0.01;
  c.epochs = 200;
  c.decay_epoch = 150;
  c.align_interval = 4;
  c.lr_align = 1.0;
  c.knn = 4;
  c.seed = 1;
  c.patience = 200;
  c.align_with_eval_pairs = true;
  return c;
}

int cmd_fixture(const FixtureArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Fixture fixture = make_fixture(args.options);
    write_fixture(fixture, args.dir);
    RunConfig rc;
    rc.train = fixture_train_config(parse_mode(args.mode), parse_ablation(args.ablation));
    rc.language_x = args.options.language_x;
    rc.language_y = args.options.language_y;
    namespace ff = fixture_files;
    nlohmann::json j = ame::to_json(rc.train);
    j["train_captions"] = ff::kTrainCaptions;
    j["val_captions"] = ff::kValCaptions;
    j["features"] = ff::kFeatures;
    j["embeddings_x"] = ff::kEmbeddingsX;
    j["embeddings_y"] = ff::kEmbeddingsY;
    j["lexicon_train"] = ff::kLexiconTrain;
    j["lexicon_eval"] = ff::kLexiconEval;
    j["language_x"] = rc.language_x;
    j["language_y"] = rc.language_y;
    j["output_dir"] = "out";
    open_output(args.dir / "config.json") << j.dump(2) << '\n';
    out << "wrote fixture (" << args.options.images << " images, " << args.options.words << " words) to "
        << args.dir.string() << '\n';
    return kExitOk;
  });
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig rc = RunConfig::load(args.config);
    if (args.out) rc.output_dir = *args.out;
    rc.train.seed = seed_override(rc.train.seed, err);
    PreparedRun run = prepare_run(rc);
    fs::create_directories(rc.output_dir);

    const TrainResult result = train(rc.train, std::move(run.model), run.train, run.val, run.lexicon,
                                     [&](const EpochMetrics& m) {
                                       err << "epoch " << m.epoch << " step " << m.step << " loss "
                                           << format("%.4f", m.loss_ranking) << " R@1 i2t "
                                           << format("%.1f", m.r1_i2t) << " t2i " << format("%.1f", m.r1_t2i)
                                           << " align " << format("%.3f", m.alignment_ratio) << '\n';
                                     });

    {
      auto os = open_output(rc.output_dir / kMetricsFile);
      write_metrics_csv(os, result.log);
    }
    {
      std::vector<double> ratios;
      for (const auto& m : result.log) ratios.push_back(m.alignment_ratio);
      auto os = open_output(rc.output_dir / kCurveFile);
      write_alignment_svg(os, ratios, "Alignment ratio per validation step (" +
                                          std::string(to_string(rc.train.ablation)) + ", " +
                                          std::string(to_string(rc.train.mode)) + ")");
    }
    Checkpoint ckpt;
    ckpt.model = result.best;
    ckpt.config = rc.train;
    ckpt.vocab_x = run.vocab_x;
    ckpt.vocab_y = run.vocab_y;
    ckpt.best_score = result.best_score;
    ckpt.step = result.best_step;
    save_checkpoint(ckpt, rc.output_dir / kCheckpointFile);

    out << "trained " << result.log.size() << " epochs (" << result.steps << " steps"
        << (result.stopped_early ? ", stopped early" : "") << "); best score " << format("%.2f", result.best_score)
        << " at step " << result.best_step << "\n";
    out << "wrote " << (rc.output_dir / kMetricsFile).string() << ", " << (rc.output_dir / kCurveFile).string()
        << ", " << (rc.output_dir / kCheckpointFile).string() << '\n';
    return kExitOk;
  });
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.task != "retrieval" && args.task != "caption") {
      throw ConfigError("--task must be retrieval or caption, got '" + args.task + "'");
    }
    const Checkpoint ckpt = load_checkpoint(args.checkpoint);
    auto images = std::make_shared<const ImageFeatureSet>(load_features(args.features));
    if (images->dim() != ckpt.model.dims.feature_dim) {
      throw IncompatibleCheckpointError("features have D=" + std::to_string(images->dim()) +
                                        " but the checkpoint expects D=" +
                                        std::to_string(ckpt.model.dims.feature_dim));
    }
    const CaptionDataset data =
        CaptionDataset::from_raw(load_captions(args.captions), ckpt.vocab_x, &ckpt.vocab_y, images, Split::Test);

    std::vector<std::string> dirs = args.directions;
    if (dirs.empty()) dirs = args.task == "retrieval" ? std::vector<std::string>{"i2t", "t2i"}
                                                      : std::vector<std::string>{"x2y", "y2x"};
    EvalOptions opts;
    opts.folds = args.folds;
    if (args.orientation == "candidate") {
      opts.orientation = CaptionOrientation::CandidateAsImage;
    } else if (args.orientation == "query") {
      opts.orientation = CaptionOrientation::QueryAsImage;
    } else {
      throw ConfigError("--orientation must be candidate or query");
    }

    double alignment = std::nan("");
    if (args.lexicon) {
      const auto pairs = load_lexicon(*args.lexicon, ckpt.vocab_x, ckpt.vocab_y);
      const Tensor& x = ckpt.model.table(Lang::X);
      const Tensor& y = ckpt.model.table(Lang::Y);
      alignment = 100.0 * alignment_ratio(pairs, x, y, ckpt.model.map, ckpt.config.knn);
    }

    std::vector<RetrievalReport> reports;
    fs::create_directories(args.out);
    for (const auto& name : dirs) {
      const Direction d = parse_direction(name);
      const bool caption_dir = d == Direction::X2Y || d == Direction::Y2X;
      if (caption_dir != (args.task == "caption")) {
        throw ConfigError("direction " + name + " does not belong to task " + args.task);
      }
      RetrievalReport r = args.task == "retrieval" ? evaluate_retrieval(ckpt.model, data, d, opts)
                                                   : caption_caption_eval(ckpt.model, data, d, opts);
      r.alignment = alignment;
      auto os = open_output(args.out / ("report_" + args.task + "_" + name + ".csv"));
      write_report_csv(os, args.task, {r});
      reports.push_back(r);
    }
    write_report_table(out, reports);
    return kExitOk;
  });
}

int cmd_translate(const TranslateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Checkpoint ckpt = load_checkpoint(args.checkpoint);
    const auto id = ckpt.vocab_x.find(args.word);
    if (!id || *id < Vocabulary::kFirstWord) {
      throw ConfigError("'" + args.word + "' is not in the " + ckpt.vocab_x.language() + " vocabulary");
    }
    if (args.topk == 0) throw ConfigError("--topk must be at least 1");
    const Tensor& x = ckpt.model.table(Lang::X);
    const Tensor& y = ckpt.model.table(Lang::Y);
    const Pool src_pool = full_pool(x), tgt_pool = full_pool(y);
    if (tgt_pool.empty()) throw ConfigError("the target vocabulary is empty");
    const std::size_t k = std::min({ckpt.config.knn, src_pool.size(), tgt_pool.size()});
    const CslsIndex index(x, y, ckpt.model.map, k, src_pool, tgt_pool);
    std::size_t topk = args.topk;
    if (topk > tgt_pool.size()) {
      err << "warning: --topk " << topk << " exceeds the " << tgt_pool.size() << " target words; showing all\n";
      topk = tgt_pool.size();
    }
    const auto ranked = index.translate(*id);
    for (std::size_t i = 0; i < topk; ++i) {
      out << i + 1 << '\t' << ckpt.vocab_y.token(ranked[i].target) << '\t' << format("%.6f", ranked[i].score)
          << '\n';
    }
    return kExitOk;
  });
}

}  // namespace ame::cli
