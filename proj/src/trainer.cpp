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

#include "agrp/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <unordered_map>

#include "agrp/grouping.hpp"
#include "agrp/losses.hpp"
#include "agrp/rng.hpp"

namespace agrp {

namespace {

// Fixed stream tag separating epoch plans from all other seed derivations.
constexpr std::uint64_t kEpochStream = 0x65706f6368;

std::unordered_map<int, const LabeledImage*> index_by_id(const NoisyDataset& dataset) {
  std::unordered_map<int, const LabeledImage*> index;
  index.reserve(dataset.train.size() + dataset.negatives.size());
  for (const LabeledImage& im : dataset.train) index.emplace(im.id, &im);
  for (const LabeledImage& im : dataset.negatives) index.emplace(im.id, &im);
  return index;
}

}  // namespace

EpochRecord train_epoch(ModelState& model, const NoisyDataset& dataset,
                        const TrainConfig& raw_config, int epoch_index) {
  const auto start = std::chrono::steady_clock::now();
  const TrainConfig config = raw_config.normalized();
  if (dataset.class_count < 2) {
    throw ConfigError("train_epoch: need at least 2 classes, got " +
                      std::to_string(dataset.class_count));
  }
  const bool with_attention = variant_has_attention(config.variant);
  const bool with_regularizer = variant_has_regularizer(config.variant);
  const double lr = learning_rate_at(config, epoch_index);

  const GroupPlan plan =
      plan_epoch(dataset, config.group_size, config.negatives_per_epoch,
                 mix_seed(config.seed, kEpochStream + static_cast<std::uint64_t>(epoch_index)));
  const auto index = index_by_id(dataset);

  EpochRecord record;
  record.epoch = epoch_index;
  record.learning_rate = lr;
  record.instance_count = static_cast<int>(plan.instances.size());

  double sum_l_class = 0.0;
  double sum_r = 0.0;
  double sum_total = 0.0;

  std::size_t cursor = 0;
  while (cursor < plan.instances.size()) {
    const std::size_t batch_end =
        std::min(cursor + static_cast<std::size_t>(config.batch_instances),
                 plan.instances.size());
    const double batch_scale = 1.0 / static_cast<double>(batch_end - cursor);
    ParamGrads batch_grads = ParamGrads::zeros_like(model);

    for (std::size_t n = cursor; n < batch_end; ++n) {
      const GroupedInstance& inst = plan.instances[n];
      const int k = static_cast<int>(inst.member_ids.size());

      std::vector<ExtractorTrace> traces;
      std::vector<Tensor> maps;
      traces.reserve(inst.member_ids.size());
      maps.reserve(inst.member_ids.size());
      for (int id : inst.member_ids) {
        const auto it = index.find(id);
        if (it == index.end()) {
          throw StateError("train_epoch: plan references unknown image id " +
                           std::to_string(id));
        }
        traces.push_back(extractor_forward(model, it->second->pixels));
        maps.push_back(traces.back().features);
      }
      const int d = maps.front().dim(0);
      const int c = maps.front().dim(2);

      ParamGrads inst_grads = ParamGrads::zeros_like(model);
      std::vector<Tensor> map_grads(maps.size());
      for (std::size_t m = 0; m < maps.size(); ++m) map_grads[m] = Tensor({d, d, c});

      double ce_loss = 0.0;
      double r_value = 0.0;

      AttentionTrace att_trace;
      Tensor linear_scores;
      if (inst.delta > 0) {
        Tensor pooled;
        if (with_attention) {
          att_trace = attention_forward(maps, model.attention, config.epsilon);
          ++record.attention_calls;
          pooled = att_trace.pooled;
          linear_scores = att_trace.linear_scores;
        } else {
          pooled = average_pool_forward(maps);
        }
        const Tensor logits =
            linear_forward(model.classifier_weight, pooled, model.classifier_bias);
        CrossEntropyResult ce = softmax_cross_entropy(logits, inst.label);
        ce_loss = ce.loss;
        LayerGrads lin =
            linear_backward(model.classifier_weight, pooled, ce.grad_logits);
        inst_grads.classifier_weight = std::move(lin.params.at("weight"));
        inst_grads.classifier_bias = std::move(lin.params.at("bias"));
        if (with_attention) {
          AttentionGrads ag = attention_backward(att_trace, maps, model.attention, lin.input);
          inst_grads.attention_w = std::move(ag.w);
          inst_grads.attention_b = ag.b;
          for (std::size_t m = 0; m < maps.size(); ++m) map_grads[m] = std::move(ag.maps[m]);
        } else {
          map_grads = average_pool_backward(k, d, c, lin.input);
        }
      } else if (with_regularizer) {
        // Negative instances feed the regularizer only; Eqs. 3-6 are skipped.
        linear_scores = attention_linear_scores(maps, model.attention);
      }

      if (with_regularizer) {
        HingeResult hinge = attention_hinge(linear_scores, inst.delta);
        r_value = hinge.r;
        if (r_value > 0.0) {
          for (double& v : hinge.grad_scores.values()) v *= config.lambda;
          AttentionGrads hg =
              linear_score_backward(maps, model.attention, hinge.grad_scores);
          for (std::size_t i = 0; i < inst_grads.attention_w.size(); ++i) {
            inst_grads.attention_w[i] += hg.w[i];
          }
          inst_grads.attention_b += hg.b;
          for (std::size_t m = 0; m < maps.size(); ++m) {
            Tensor& dst = map_grads[m];
            const Tensor& src = hg.maps[m];
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
          }
        }
      }

      const LossBreakdown breakdown =
          combine(ce_loss, r_value, with_regularizer ? config.lambda : 0.0);
      if (!std::isfinite(breakdown.total)) {
        throw DivergenceError("train_epoch: non-finite loss at epoch " +
                              std::to_string(epoch_index) + ", instance " + std::to_string(n));
      }
      sum_l_class += inst.delta > 0 ? ce_loss : 0.0;
      record.positive_count += inst.delta > 0 ? 1 : 0;
      sum_r += r_value;
      sum_total += breakdown.total;

      if (!model.blocks.empty()) {
        for (std::size_t m = 0; m < maps.size(); ++m) {
          ExtractorGrads eg = extractor_backward(model, traces[m], map_grads[m]);
          for (std::size_t bIdx = 0; bIdx < eg.blocks.size(); ++bIdx) {
            Tensor& kdst = inst_grads.blocks[bIdx].kernels;
            const Tensor& ksrc = eg.blocks[bIdx].kernels;
            for (std::size_t i = 0; i < kdst.size(); ++i) kdst[i] += ksrc[i];
            Tensor& bdst = inst_grads.blocks[bIdx].bias;
            const Tensor& bsrc = eg.blocks[bIdx].bias;
            for (std::size_t i = 0; i < bdst.size(); ++i) bdst[i] += bsrc[i];
          }
        }
      }

      batch_grads.add_scaled(inst_grads, batch_scale);
    }

    apply_update(model, batch_grads, lr);
    cursor = batch_end;
  }

  if (record.instance_count > 0) {
    record.mean_total = sum_total / record.instance_count;
    record.mean_r_term = sum_r / record.instance_count;
  }
  if (record.positive_count > 0) {
    record.mean_l_class = sum_l_class / record.positive_count;
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

std::pair<ModelState, TrainHistory> train(const TrainConfig& raw_config,
                                          const NoisyDataset& dataset) {
  const TrainConfig config = raw_config.normalized();
  config.validate();
  if (dataset.train.empty()) throw ConfigError("train: dataset has no training images");
  if (dataset.class_count < 2) throw ConfigError("train: need at least 2 classes");
  const Tensor& first = dataset.train.front().pixels;
  if (first.rank() != 3 || first.dim(0) != first.dim(1)) {
    throw DimensionError("train: images must be square h x h x c");
  }

  ModelState model =
      init_model(config, dataset.class_count, first.dim(0), first.dim(2), config.seed);
  TrainHistory history;
  history.epochs.reserve(static_cast<std::size_t>(config.epochs));
  for (int e = 0; e < config.epochs; ++e) {
    history.epochs.push_back(train_epoch(model, dataset, config, e));
  }
  return {std::move(model), std::move(history)};
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,l_class,r_term,total,lr\n";
  char line[256];
  for (const EpochRecord& r : history.epochs) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.mean_l_class,
                  r.mean_r_term, r.mean_total, r.learning_rate);
    out << line;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace agrp
