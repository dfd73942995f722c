// Copyright 2026 The agrp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agrp/checkpoint.hpp"
#include "agrp/evaluator.hpp"
#include "agrp/experiment.hpp"
#include "agrp/grad_suite.hpp"
#include "agrp/idx.hpp"
#include "agrp/sweep.hpp"
#include "agrp/trainer.hpp"

namespace {

// Exit codes: 0 success, 2 config/validation, 3 numeric failure,
// 4 artifact mismatch.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitArtifact = 4;

struct GenDataArgs {
  int classes = 5;
  int per_class = 200;
  int image_side = 12;
  double noise_level = 0.4;
  std::uint64_t seed = 1;
  std::string out;
  std::string idx_images;
  std::string idx_labels;
  std::string distractor_images;
  std::string distractor_labels;
};

int cmd_gen_data(const GenDataArgs& args) {
  agrp::NoisyDataset ds;
  if (!args.idx_images.empty()) {
    if (args.idx_labels.empty()) {
      throw agrp::ConfigError("--idx-images requires --idx-labels");
    }
    std::vector<agrp::LabeledImage> clean = agrp::load_idx(args.idx_images, args.idx_labels);
    std::vector<agrp::LabeledImage> distractors;
    if (!args.distractor_images.empty()) {
      if (args.distractor_labels.empty()) {
        throw agrp::ConfigError("--distractor-images requires --distractor-labels");
      }
      distractors = agrp::load_idx(args.distractor_images, args.distractor_labels);
      for (agrp::LabeledImage& im : distractors) im.given_label = -1;
    }
    ds = agrp::inject_noise(clean, args.noise_level, distractors, args.seed);
  } else {
    ds = agrp::gen_synthetic(args.classes, args.per_class, args.image_side, args.noise_level,
                             args.seed);
  }
  agrp::validate_dataset(ds);
  agrp::save_dataset(ds, args.out);
  std::printf("dataset=%s\n", args.out.c_str());
  return kExitOk;
}

int cmd_train(const std::string& config_path) {
  const agrp::ExperimentConfig config = agrp::load_experiment_config(config_path);
  agrp::TrainConfig tc = config.train.normalized();
  tc.validate();
  agrp::echo_resolved_config(config);
  const agrp::NoisyDataset ds = agrp::materialize_dataset(config.dataset);
  auto [model, history] = agrp::train(tc, ds);
  const auto checkpoint_path = config.output_dir / "checkpoint.agrp";
  const auto history_path = config.output_dir / "history.csv";
  agrp::save_checkpoint(model, checkpoint_path);
  agrp::write_history_csv(history, history_path);
  std::printf("history=%s\n", history_path.c_str());
  std::printf("checkpoint=%s\n", checkpoint_path.c_str());
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& data_dir,
             const std::string& out_csv) {
  const agrp::ModelState model = agrp::load_checkpoint(checkpoint);
  const agrp::NoisyDataset ds = agrp::load_dataset(data_dir);
  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw agrp::IoError("cannot write " + out_csv);
    out << "image_id,true_label,predicted\n";
    for (const agrp::LabeledImage& im : ds.test) {
      const agrp::Tensor logits = agrp::predict(model, im.pixels);
      int best = 0;
      for (int c = 1; c < logits.dim(0); ++c) {
        if (logits[static_cast<std::size_t>(c)] > logits[static_cast<std::size_t>(best)]) {
          best = c;
        }
      }
      out << im.id << "," << im.true_label << "," << best << "\n";
    }
  }
  std::printf("accuracy=%.17g\n", agrp::accuracy(model, ds.test));
  return kExitOk;
}

int cmd_rerank(const std::string& checkpoint, const std::string& data_dir,
               const std::string& out_dir) {
  const agrp::ModelState model = agrp::load_checkpoint(checkpoint);
  const agrp::NoisyDataset ds = agrp::load_dataset(data_dir);
  const agrp::RankingResult result = agrp::rerank(model, ds);
  std::filesystem::create_directories(out_dir);
  agrp::write_ranking_csv(result, std::filesystem::path(out_dir) / "ranking.csv");
  agrp::write_ranking_summary_csv(result,
                                  std::filesystem::path(out_dir) / "ranking_summary.csv");
  if (result.skipped_classes > 0) {
    std::fprintf(stderr, "warning: %d class(es) had no positives and were excluded from MAP\n",
                 result.skipped_classes);
  }
  std::printf("map=%.17g\n", result.mean_average_precision);
  return kExitOk;
}

int cmd_attmap(const std::string& checkpoint, const std::string& data_dir, int image_id,
               const std::string& out_pgm) {
  const agrp::ModelState model = agrp::load_checkpoint(checkpoint);
  const agrp::NoisyDataset ds = agrp::load_dataset(data_dir);
  const agrp::LabeledImage* image = nullptr;
  for (const auto* split : {&ds.train, &ds.negatives, &ds.test}) {
    for (const agrp::LabeledImage& im : *split) {
      if (im.id == image_id) image = &im;
    }
  }
  if (image == nullptr) {
    throw agrp::StateError("image id " + std::to_string(image_id) + " not in dataset");
  }
  const agrp::Tensor heatmap = agrp::attention_heatmap(model, image->pixels);
  agrp::write_pgm(heatmap, out_pgm);
  std::printf("heatmap=%s\n", out_pgm.c_str());
  return kExitOk;
}

int cmd_sweep(const std::string& config_path) {
  const agrp::ExperimentConfig config = agrp::load_experiment_config(config_path);
  agrp::echo_resolved_config(config);
  const agrp::SweepOutcome outcome = agrp::run_sweep(config);
  for (const std::string& failure : outcome.failures) {
    std::fprintf(stderr, "diverged: %s\n", failure.c_str());
  }
  std::printf("results=%s\n", outcome.csv_path.c_str());
  std::printf("completed=%d skipped=%d failed=%zu\n", outcome.completed, outcome.skipped,
              outcome.failures.size());
  return outcome.failures.empty() ? kExitOk : kExitNumeric;
}

int cmd_gradcheck(int seeds, double fd_step, double perturb) {
  const std::vector<agrp::ComponentReport> reports =
      agrp::run_grad_suite(seeds, fd_step, perturb);
  for (const agrp::ComponentReport& r : reports) {
    std::printf("component=%s cases=%d max_rel_error=%.3e %s\n", r.name.c_str(), r.cases,
                r.max_rel_error, r.max_rel_error < agrp::kGradPassThreshold ? "pass" : "FAIL");
  }
  return agrp::all_components_pass(reports) ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise-robust weakly supervised training on grouped instances"};
  app.require_subcommand(1);

  GenDataArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate or ingest a noisy dataset");
  gen_cmd->add_option("--classes", gen.classes, "Synthetic class count");
  gen_cmd->add_option("--per-class", gen.per_class, "Synthetic images per class");
  gen_cmd->add_option("--image-side", gen.image_side, "Synthetic image side length");
  gen_cmd->add_option("--noise-level", gen.noise_level, "Corrupted fraction in [0,1)");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Output dataset directory")->required();
  gen_cmd->add_option("--idx-images", gen.idx_images, "IDX image file (ingestion mode)");
  gen_cmd->add_option("--idx-labels", gen.idx_labels, "IDX label file (ingestion mode)");
  gen_cmd->add_option("--distractor-images", gen.distractor_images,
                      "IDX images for the negative pool");
  gen_cmd->add_option("--distractor-labels", gen.distractor_labels,
                      "IDX labels for the negative pool");

  std::string train_config;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model from a JSON config");
  train_cmd->add_option("config", train_config, "Experiment config path")->required();

  std::string eval_checkpoint, eval_data, eval_out;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Test-set accuracy of a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint path")->required();
  eval_cmd->add_option("--data", eval_data, "Dataset directory")->required();
  eval_cmd->add_option("--out", eval_out, "Optional per-image prediction CSV");

  std::string rr_checkpoint, rr_data, rr_out;
  CLI::App* rerank_cmd = app.add_subcommand("rerank", "Rank training images by class score");
  rerank_cmd->add_option("--checkpoint", rr_checkpoint, "Checkpoint path")->required();
  rerank_cmd->add_option("--data", rr_data, "Dataset directory")->required();
  rerank_cmd->add_option("--out-dir", rr_out, "Directory for ranking CSVs")->required();

  std::string am_checkpoint, am_data, am_out;
  int am_image_id = 0;
  CLI::App* attmap_cmd = app.add_subcommand("attmap", "Export an attention heatmap as PGM");
  attmap_cmd->add_option("--checkpoint", am_checkpoint, "Checkpoint path")->required();
  attmap_cmd->add_option("--data", am_data, "Dataset directory")->required();
  attmap_cmd->add_option("--image-id", am_image_id, "Image id within the dataset")->required();
  attmap_cmd->add_option("--out", am_out, "Output PGM path")->required();

  std::string sweep_config;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Train a noise x group-size x seed grid");
  sweep_cmd->add_option("config", sweep_config, "Experiment config path")->required();

  int gc_seeds = 20;
  double gc_fd_step = 1e-6;
  double gc_perturb = 0.0;
  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "Finite-difference audit of every layer and loss");
  gradcheck_cmd->add_option("--seeds", gc_seeds, "Randomized cases per component");
  gradcheck_cmd->add_option("--fd-step", gc_fd_step, "Central difference step");
  gradcheck_cmd->add_option("--perturb", gc_perturb,
                            "Inject this bias into analytic gradients (forces failure)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_data(gen);
    if (train_cmd->parsed()) return cmd_train(train_config);
    if (eval_cmd->parsed()) return cmd_eval(eval_checkpoint, eval_data, eval_out);
    if (rerank_cmd->parsed()) return cmd_rerank(rr_checkpoint, rr_data, rr_out);
    if (attmap_cmd->parsed()) return cmd_attmap(am_checkpoint, am_data, am_image_id, am_out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_config);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(gc_seeds, gc_fd_step, gc_perturb);
  } catch (const agrp::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const agrp::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const agrp::GenerationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const agrp::DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const agrp::EvalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    // FormatError, IoError, StateError, DimensionError, CapabilityError.
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitArtifact;
  }
  return kExitOk;
}
