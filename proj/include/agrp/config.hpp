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

#ifndef AGRP_CONFIG_HPP_
#define AGRP_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace agrp {

// The six ablation variants. AP-family trains on single images (K = 1),
// RGT-family on groups of K >= 2. AT adds the attention detector, R the
// hinge regularizer (R always implies AT).
enum class Variant {
  kAP,
  kRGT,
  kAPAT,
  kRGTAT,
  kAPATR,
  kRGTATR,
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);
bool variant_is_grouped(Variant v);
bool variant_has_attention(Variant v);
bool variant_has_regularizer(Variant v);
std::vector<Variant> all_variants();

// Feature extractor shape: each entry is one conv3x3 (valid) -> relu ->
// maxpool2 block's output channel count. Empty list means the identity
// extractor (features are the raw pixels).
struct ExtractorSpec {
  std::vector<int> block_channels;

  bool operator==(const ExtractorSpec&) const = default;
};

struct TrainConfig {
  Variant variant = Variant::kRGTATR;
  int group_size = 2;
  double lambda = 0.1;
  double epsilon = 0.1;
  double lr0 = 0.001;
  int lr_drop_epoch = 5;
  double lr_drop_factor = 0.1;
  int epochs = 10;
  int batch_instances = 16;
  int negatives_per_epoch = 0;
  std::uint64_t seed = 0;
  ExtractorSpec extractor;

  // Canonical form: AP-family forces group_size = 1, variants without R
  // force negatives_per_epoch = 0 (lambda is retained but unused).
  TrainConfig normalized() const;
  // Throws ConfigError on any violated invariant. Expects normalized form
  // for the family/group-size coupling.
  void validate() const;
};

// Strict JSON (de)serialization: unknown keys rejected, missing keys take
// the defaults above. Field names match the struct members.
TrainConfig train_config_from_json_text(const std::string& text);
std::string train_config_to_json_text(const TrainConfig& config);

double learning_rate_at(const TrainConfig& config, int epoch_index);

}  // namespace agrp

#endif  // AGRP_CONFIG_HPP_
