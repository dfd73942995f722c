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

#ifndef AGRP_GROUPING_HPP_
#define AGRP_GROUPING_HPP_

#include <cstdint>
#include <vector>

#include "agrp/dataset.hpp"

namespace agrp {

inline constexpr int kMaxGroupSize = 5;

// One training instance: K member image ids, a shared label, and a polarity
// flag. delta = +1 for a same-label group, -1 for a negative-pool group
// (label is -1 and unused in that case).
struct GroupedInstance {
  std::vector<int> member_ids;
  int label = -1;
  int delta = +1;
};

struct GroupPlan {
  std::vector<GroupedInstance> instances;
  std::uint64_t seed = 0;
};

// Probability that a group of K images at noise level xi carries a correct
// label, 1 - xi^K.
double group_label_accuracy(double xi, int k);

// Empirical oracle for group_label_accuracy by direct simulation.
double monte_carlo_group_accuracy(double xi, int k, int trials, std::uint64_t seed);

// Partitions each class into disjoint groups of K (shuffled, remainder
// dropped), appends negatives_per_epoch homogeneous negative instances drawn
// from the negative pool, and returns all instances in one shuffled order.
// Pure function of its arguments.
GroupPlan plan_epoch(const NoisyDataset& dataset, int k, int negatives_per_epoch,
                     std::uint64_t seed);

}  // namespace agrp

#endif  // AGRP_GROUPING_HPP_
