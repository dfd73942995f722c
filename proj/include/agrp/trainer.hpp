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

#ifndef AGRP_TRAINER_HPP_
#define AGRP_TRAINER_HPP_

#include <filesystem>
#include <utility>
#include <vector>

#include "agrp/dataset.hpp"
#include "agrp/model.hpp"

namespace agrp {

struct EpochRecord {
  int epoch = 0;
  double mean_l_class = 0.0;  // mean Eq. 6 loss over positive instances
  double mean_r_term = 0.0;   // mean raw hinge over instances (R variants)
  double mean_total = 0.0;    // mean combined objective over instances
  double learning_rate = 0.0;
  double wall_seconds = 0.0;
  long attention_calls = 0;   // attention_forward invocations this epoch
  int instance_count = 0;
  int positive_count = 0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

// One full pass: plans groups with a seed derived from (config.seed, epoch),
// runs forward/backward per instance, and applies one SGD step per
// minibatch with gradients averaged over the batch.
EpochRecord train_epoch(ModelState& model, const NoisyDataset& dataset,
                        const TrainConfig& config, int epoch_index);

std::pair<ModelState, TrainHistory> train(const TrainConfig& config,
                                          const NoisyDataset& dataset);

// Columns: epoch,l_class,r_term,total,lr
void write_history_csv(const TrainHistory& history, const std::filesystem::path& path);

}  // namespace agrp

#endif  // AGRP_TRAINER_HPP_
