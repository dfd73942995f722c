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

#ifndef AGRP_MODEL_HPP_
#define AGRP_MODEL_HPP_

#include <cstdint>
#include <vector>

#include "agrp/attention.hpp"
#include "agrp/config.hpp"
#include "agrp/ops.hpp"
#include "agrp/tensor.hpp"

namespace agrp {

// One extractor block: conv3x3 (valid) -> relu -> maxpool2.
struct ConvBlockParams {
  Tensor kernels;  // 3 x 3 x cin x cout
  Tensor bias;     // cout
};

struct ModelState {
  TrainConfig config;  // normalized snapshot
  int class_count = 0;
  int input_side = 0;
  int input_channels = 0;
  std::vector<ConvBlockParams> blocks;
  AttentionParams attention;
  Tensor classifier_weight;  // C x c
  Tensor classifier_bias;    // C
  long step = 0;

  bool all_finite() const;
};

// Extractor and classifier weights uniform in +-sqrt(3/fan_in), biases zero,
// attention zero (first forward is exactly uniform attention).
ModelState init_model(const TrainConfig& config, int class_count, int input_side,
                      int input_channels, std::uint64_t seed);

// Spatial side and channel count of the extractor output.
int feature_side(const ModelState& model);
int feature_channels(const ModelState& model);

// Per-block intermediates of one extractor forward, kept for the backward
// pass. conv_inputs[i] feeds block i's convolution.
struct ExtractorTrace {
  std::vector<Tensor> conv_inputs;
  std::vector<Tensor> conv_outputs;  // pre-relu
  std::vector<Tensor> relu_outputs;  // pre-pool
  Tensor features;
};

ExtractorTrace extractor_forward(const ModelState& model, const Tensor& image);

struct ExtractorGrads {
  std::vector<ConvBlockParams> blocks;  // same shapes as the model blocks
};

// Gradient of a scalar through the extractor given d(scalar)/d(features).
// Image pixels are leaves, so no input gradient is returned.
ExtractorGrads extractor_backward(const ModelState& model, const ExtractorTrace& trace,
                                  const Tensor& grad_features);

// Full gradient accumulator matching ModelState's parameters.
struct ParamGrads {
  std::vector<ConvBlockParams> blocks;
  Tensor attention_w;
  double attention_b = 0.0;
  Tensor classifier_weight;
  Tensor classifier_bias;

  static ParamGrads zeros_like(const ModelState& model);
  void add_scaled(const ParamGrads& other, double factor);
};

// Plain SGD: p -= lr * g; bumps the step counter. Throws DivergenceError if
// any parameter leaves the finite range.
void apply_update(ModelState& model, const ParamGrads& grads, double lr);

// Pixel coordinate (continuous, pixel i spans [i, i+1)) of feature cell q's
// receptive-field center along one axis.
double receptive_field_center(const ModelState& model, int q);

}  // namespace agrp

#endif  // AGRP_MODEL_HPP_
