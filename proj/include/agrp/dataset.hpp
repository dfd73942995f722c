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

#ifndef AGRP_DATASET_HPP_
#define AGRP_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agrp/tensor.hpp"

namespace agrp {

// Ground-truth status of a training label.
//   kCorrect       - given label matches the content.
//   kCrossDomain   - content belongs to no learned category at all.
//   kCrossCategory - content belongs to a different learned category.
enum class Truth { kCorrect, kCrossDomain, kCrossCategory };

const char* truth_name(Truth t);
Truth truth_from_name(const std::string& name);

// Pixel rectangle, [row, row+height) x [col, col+width).
struct Box {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;
};

struct LabeledImage {
  int id = 0;
  Tensor pixels;                    // h x w x c, values in [0,1]
  int given_label = -1;
  Truth truth = Truth::kCorrect;
  int true_label = -1;              // -1 when the content is out of domain
  std::optional<Box> signature_box; // synthetic data only
};

struct NoisyDataset {
  std::vector<LabeledImage> train;
  std::vector<LabeledImage> negatives;  // all cross-domain, labels unused
  std::vector<LabeledImage> test;       // all correct
  int class_count = 0;
  double noise_level = 0.0;
};

// Throws if any per-image or per-split invariant is violated.
void validate_dataset(const NoisyDataset& ds);

// Synthetic benchmark with per-image ground truth. Each class is defined by
// a fixed 3x3 signature patch stamped at a random location on an i.i.d.
// uniform background; corruption splits 1:1 between relabel-style
// (cross-category) and content-swap (cross-domain) noise. Also produces a
// background-only negative pool of size per_class and a clean test split of
// per_class/2 images per class.
NoisyDataset gen_synthetic(int classes, int per_class, int image_side, double xi,
                           std::uint64_t seed);

// Pollutes a clean fragment at noise level xi: floor(xi*n) images are chosen
// uniformly; half get their label reassigned to a different class
// (cross-category), half get their pixels replaced by a distractor image
// (cross-domain). Distractor labels must be disjoint from the clean classes.
// Unused distractors become the negative pool; the test split is left empty.
NoisyDataset inject_noise(const std::vector<LabeledImage>& clean, double xi,
                          const std::vector<LabeledImage>& distractors, std::uint64_t seed);

// Directory layout: manifest.json plus one binary tensor file per split.
void save_dataset(const NoisyDataset& ds, const std::filesystem::path& dir);
NoisyDataset load_dataset(const std::filesystem::path& dir);

}  // namespace agrp

#endif  // AGRP_DATASET_HPP_
