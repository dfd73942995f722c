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

#ifndef AGRP_EVALUATOR_HPP_
#define AGRP_EVALUATOR_HPP_

#include <filesystem>
#include <vector>

#include "agrp/dataset.hpp"
#include "agrp/model.hpp"

namespace agrp {

// Single-image inference: extractor, pooling as trained (attention with
// K = 1 for AT variants, plain average otherwise), classifier logits.
Tensor predict(const ModelState& model, const Tensor& image);

// Fraction of test images whose argmax logit (ties to the lowest class
// index) equals true_label.
double accuracy(const ModelState& model, const std::vector<LabeledImage>& test_set);

struct RankEntry {
  int image_id = 0;
  double score = 0.0;
  bool positive = false;  // truth == correct
};

struct ClassRanking {
  int class_index = 0;
  std::vector<RankEntry> entries;  // score descending, ties by id ascending
  int positive_count = 0;
  double average_precision = 0.0;  // meaningful when positive_count > 0
};

struct RankingResult {
  std::vector<ClassRanking> classes;
  double mean_average_precision = 0.0;  // over classes with positives
  int skipped_classes = 0;              // classes with zero positives
};

// Scores every train image under its own given label and ranks per class.
// AP = (1/P) sum over positive ranks r of precision@r.
RankingResult rerank(const ModelState& model, const NoisyDataset& dataset);

// Columns: class,rank,image_id,score,truth with truth in {1,-1}.
void write_ranking_csv(const RankingResult& result, const std::filesystem::path& path);
// Per-class AP rows followed by one "map" row.
void write_ranking_summary_csv(const RankingResult& result, const std::filesystem::path& path);

// Normalized single-image attention map a (d x d, sums to 1). Requires an
// AT-variant model.
Tensor attention_map(const ModelState& model, const Tensor& image);

// attention_map min-max rescaled to [0,1] for export; a constant map
// rescales to all zeros.
Tensor attention_heatmap(const ModelState& model, const Tensor& image);

// Binary PGM (P5, maxval 255). Values in [0,1] quantize as round(v*255).
void write_pgm(const Tensor& map01, const std::filesystem::path& path);
// Returns the stored gray levels (0..255) as a rank-2 tensor.
Tensor read_pgm(const std::filesystem::path& path);

// Mean over images of the attention mass on cells whose receptive-field
// center falls inside the image's signature_box.
double localization_score(const ModelState& model, const std::vector<LabeledImage>& images);
// Same quantity under uniform attention (the box's share of cell centers).
double localization_uniform_baseline(const ModelState& model,
                                     const std::vector<LabeledImage>& images);

}  // namespace agrp

#endif  // AGRP_EVALUATOR_HPP_
