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

#include "agrp/grouping.hpp"

#include <cmath>
#include <string>

#include "agrp/rng.hpp"

namespace agrp {

double group_label_accuracy(double xi, int k) {
  if (xi < 0.0 || xi > 1.0) throw DomainError("group_label_accuracy: xi must lie in [0,1]");
  if (k < 1) throw DomainError("group_label_accuracy: K must be >= 1");
  return 1.0 - std::pow(xi, static_cast<double>(k));
}

double monte_carlo_group_accuracy(double xi, int k, int trials, std::uint64_t seed) {
  if (xi < 0.0 || xi > 1.0) throw DomainError("monte_carlo_group_accuracy: xi must lie in [0,1]");
  if (k < 1) throw DomainError("monte_carlo_group_accuracy: K must be >= 1");
  if (trials < 1) throw DomainError("monte_carlo_group_accuracy: trials must be >= 1");
  Rng rng(seed);
  long hits = 0;
  for (int t = 0; t < trials; ++t) {
    bool any_correct = false;
    for (int j = 0; j < k; ++j) {
      // bernoulli(1-xi): member keeps its correct label.
      if (!rng.bernoulli(xi)) any_correct = true;
    }
    hits += any_correct ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

GroupPlan plan_epoch(const NoisyDataset& dataset, int k, int negatives_per_epoch,
                     std::uint64_t seed) {
  if (k < 1 || k > kMaxGroupSize) {
    throw DomainError("plan_epoch: K must lie in [1," + std::to_string(kMaxGroupSize) + "]");
  }
  if (negatives_per_epoch < 0) throw DomainError("plan_epoch: negatives_per_epoch must be >= 0");
  if (dataset.class_count < 1) throw ConfigError("plan_epoch: dataset declares no classes");

  std::vector<std::vector<int>> ids_by_class(static_cast<std::size_t>(dataset.class_count));
  for (const LabeledImage& im : dataset.train) {
    if (im.given_label < 0 || im.given_label >= dataset.class_count) {
      throw StateError("plan_epoch: train image " + std::to_string(im.id) +
                       " has out-of-range label");
    }
    ids_by_class[static_cast<std::size_t>(im.given_label)].push_back(im.id);
  }
  for (int c = 0; c < dataset.class_count; ++c) {
    if (ids_by_class[static_cast<std::size_t>(c)].size() < static_cast<std::size_t>(k)) {
      throw ConfigError("plan_epoch: class " + std::to_string(c) + " has " +
                        std::to_string(ids_by_class[static_cast<std::size_t>(c)].size()) +
                        " images, needs at least K=" + std::to_string(k));
    }
  }
  if (negatives_per_epoch > 0 && dataset.negatives.empty()) {
    throw ConfigError("plan_epoch: negative pool is empty but negatives were requested");
  }

  Rng rng(seed);
  GroupPlan plan;
  plan.seed = seed;

  for (int c = 0; c < dataset.class_count; ++c) {
    std::vector<int>& ids = ids_by_class[static_cast<std::size_t>(c)];
    rng.shuffle(ids);
    const std::size_t whole = ids.size() / static_cast<std::size_t>(k);
    for (std::size_t g = 0; g < whole; ++g) {
      GroupedInstance inst;
      inst.label = c;
      inst.delta = +1;
      inst.member_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(g * k),
                             ids.begin() + static_cast<std::ptrdiff_t>((g + 1) * k));
      plan.instances.push_back(std::move(inst));
    }
  }

  if (negatives_per_epoch > 0) {
    std::vector<int> pool;
    pool.reserve(dataset.negatives.size());
    for (const LabeledImage& im : dataset.negatives) pool.push_back(im.id);
    rng.shuffle(pool);
    std::size_t cursor = 0;
    for (int n = 0; n < negatives_per_epoch; ++n) {
      GroupedInstance inst;
      inst.label = -1;
      inst.delta = -1;
      inst.member_ids.reserve(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) {
        if (cursor == pool.size()) {
          rng.shuffle(pool);
          cursor = 0;
        }
        inst.member_ids.push_back(pool[cursor++]);
      }
      plan.instances.push_back(std::move(inst));
    }
  }

  rng.shuffle(plan.instances);
  return plan;
}

}  // namespace agrp
