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

#ifndef AGRP_EXPERIMENT_HPP_
#define AGRP_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "agrp/config.hpp"
#include "agrp/dataset.hpp"

namespace agrp {

struct SyntheticSpec {
  int classes = 5;
  int per_class = 200;
  int image_side = 12;
  double noise_level = 0.4;
  std::uint64_t seed = 1;
};

// Where the training data comes from: generated on the fly, a saved dataset
// directory, or a pair of IDX files polluted by inject_noise.
struct DatasetSpec {
  enum class Source { kSynthetic, kDir, kIdx };
  Source source = Source::kSynthetic;
  SyntheticSpec synthetic;
  std::filesystem::path dir;
  std::filesystem::path idx_images;
  std::filesystem::path idx_labels;
  std::filesystem::path idx_distractor_images;
  std::filesystem::path idx_distractor_labels;
  double idx_noise_level = 0.0;
  std::uint64_t idx_seed = 1;
};

struct SweepAxes {
  std::vector<int> group_sizes = {1, 2, 3, 4};
  std::vector<double> noise_levels = {0.2, 0.4, 0.6};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
};

// Top-level JSON config consumed by the train/eval/sweep commands. Unknown
// keys are rejected; missing keys take the defaults above. The resolved
// form is echoed into the output directory.
struct ExperimentConfig {
  std::filesystem::path output_dir = "agrp_out";
  DatasetSpec dataset;
  TrainConfig train;
  SweepAxes sweep;
};

ExperimentConfig experiment_from_json_text(const std::string& text);
std::string experiment_to_json_text(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Writes resolved_config.json into config.output_dir (creating it).
void echo_resolved_config(const ExperimentConfig& config);

NoisyDataset materialize_dataset(const DatasetSpec& spec);

}  // namespace agrp

#endif  // AGRP_EXPERIMENT_HPP_
