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

#include "agrp/model.hpp"

#include <cmath>
#include <string>

#include "agrp/rng.hpp"

namespace agrp {

namespace {
constexpr int kConvSide = 3;
constexpr double kClassifierInitScale = 0.5;

void fill_fan_in_uniform(Tensor& t, int fan_in, Rng& rng) {
  const double limit = std::sqrt(3.0 / static_cast<double>(fan_in));
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
}

// Side length after each block, throwing when a block would exhaust it.
int side_after_blocks(int input_side, std::size_t block_count) {
  int side = input_side;
  for (std::size_t i = 0; i < block_count; ++i) {
    if (side < kConvSide) {
      throw ConfigError("extractor block " + std::to_string(i) + " needs side >= " +
                        std::to_string(kConvSide) + ", got " + std::to_string(side));
    }
    side = (side - kConvSide + 1) / 2;
    if (side < 1) {
      throw ConfigError("extractor block " + std::to_string(i) + " pools the map away");
    }
  }
  return side;
}

}  // namespace

bool ModelState::all_finite() const {
  for (const ConvBlockParams& b : blocks) {
    if (!b.kernels.all_finite() || !b.bias.all_finite()) return false;
  }
  return attention.w.all_finite() && std::isfinite(attention.b) &&
         classifier_weight.all_finite() && classifier_bias.all_finite();
}

ModelState init_model(const TrainConfig& config, int class_count, int input_side,
                      int input_channels, std::uint64_t seed) {
  if (class_count < 2) throw ConfigError("init_model: need at least 2 classes");
  if (input_side < 1 || input_channels < 1) {
    throw ConfigError("init_model: input dimensions must be positive");
  }
  ModelState m;
  m.config = config.normalized();
  m.class_count = class_count;
  m.input_side = input_side;
  m.input_channels = input_channels;

  side_after_blocks(input_side, m.config.extractor.block_channels.size());

  Rng rng(mix_seed(seed, 0x6d6f64656c));
  int cin = input_channels;
  for (int cout : m.config.extractor.block_channels) {
    ConvBlockParams block;
    block.kernels = Tensor({kConvSide, kConvSide, cin, cout});
    fill_fan_in_uniform(block.kernels, kConvSide * kConvSide * cin, rng);
    block.bias = Tensor({cout});
    m.blocks.push_back(std::move(block));
    cin = cout;
  }
  m.attention.w = Tensor({cin});
  m.attention.b = 0.0;
  m.classifier_weight = Tensor({class_count, cin});
  fill_fan_in_uniform(m.classifier_weight, cin, rng);
  // A small base scale keeps initial per-class logit spread low; the output
  // layer recovers its working scale within the first epochs.
  double gain = kClassifierInitScale;
  if (variant_has_attention(m.config.variant)) {
    // The attention-pooled h carries a literal 1/(d*d*K) factor on top of the
    // per-image normalization; the classifier init absorbs it so both pooling
    // paths start with logits on the same scale and comparable gradient flow.
    const int d = side_after_blocks(input_side, m.config.extractor.block_channels.size());
    gain *= static_cast<double>(d) * static_cast<double>(d) *
            static_cast<double>(m.config.group_size);
  }
  for (double& v : m.classifier_weight.values()) v *= gain;
  m.classifier_bias = Tensor({class_count});
  return m;
}

int feature_side(const ModelState& model) {
  return side_after_blocks(model.input_side, model.blocks.size());
}

int feature_channels(const ModelState& model) {
  return model.blocks.empty() ? model.input_channels
                              : model.blocks.back().bias.dim(0);
}

ExtractorTrace extractor_forward(const ModelState& model, const Tensor& image) {
  if (image.rank() != 3 || image.dim(0) != model.input_side ||
      image.dim(1) != model.input_side || image.dim(2) != model.input_channels) {
    throw DimensionError("extractor_forward: image dims do not match the model input spec");
  }
  ExtractorTrace trace;
  Tensor current = image;
  for (const ConvBlockParams& block : model.blocks) {
    trace.conv_inputs.push_back(current);
    Tensor conv = conv2d_forward(current, block.kernels, block.bias);
    Tensor activated = relu(conv);
    current = maxpool2_forward(activated);
    trace.conv_outputs.push_back(std::move(conv));
    trace.relu_outputs.push_back(std::move(activated));
  }
  trace.features = std::move(current);
  return trace;
}

ExtractorGrads extractor_backward(const ModelState& model, const ExtractorTrace& trace,
                                  const Tensor& grad_features) {
  if (trace.conv_inputs.size() != model.blocks.size()) {
    throw StateError("extractor_backward: trace does not match the model");
  }
  ExtractorGrads grads;
  grads.blocks.resize(model.blocks.size());
  Tensor g = grad_features;
  for (std::size_t i = model.blocks.size(); i-- > 0;) {
    g = maxpool2_backward(trace.relu_outputs[i], g);
    g = relu_backward(trace.conv_outputs[i], g);
    LayerGrads conv = conv2d_backward(trace.conv_inputs[i], model.blocks[i].kernels, 1, g);
    grads.blocks[i].kernels = std::move(conv.params.at("kernels"));
    grads.blocks[i].bias = std::move(conv.params.at("bias"));
    g = std::move(conv.input);
  }
  return grads;
}

ParamGrads ParamGrads::zeros_like(const ModelState& model) {
  ParamGrads g;
  for (const ConvBlockParams& b : model.blocks) {
    ConvBlockParams zb;
    zb.kernels = Tensor(b.kernels.shape());
    zb.bias = Tensor(b.bias.shape());
    g.blocks.push_back(std::move(zb));
  }
  g.attention_w = Tensor(model.attention.w.shape());
  g.attention_b = 0.0;
  g.classifier_weight = Tensor(model.classifier_weight.shape());
  g.classifier_bias = Tensor(model.classifier_bias.shape());
  return g;
}

namespace {

void axpy(Tensor& dst, const Tensor& src, double factor) {
  if (!dst.same_shape(src)) throw DimensionError("gradient accumulation shape mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += factor * src[i];
}

}  // namespace

void ParamGrads::add_scaled(const ParamGrads& other, double factor) {
  if (blocks.size() != other.blocks.size()) {
    throw DimensionError("gradient accumulation block count mismatch");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    axpy(blocks[i].kernels, other.blocks[i].kernels, factor);
    axpy(blocks[i].bias, other.blocks[i].bias, factor);
  }
  axpy(attention_w, other.attention_w, factor);
  attention_b += factor * other.attention_b;
  axpy(classifier_weight, other.classifier_weight, factor);
  axpy(classifier_bias, other.classifier_bias, factor);
}

void apply_update(ModelState& model, const ParamGrads& grads, double lr) {
  if (grads.blocks.size() != model.blocks.size()) {
    throw DimensionError("apply_update: gradient block count mismatch");
  }
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    axpy(model.blocks[i].kernels, grads.blocks[i].kernels, -lr);
    axpy(model.blocks[i].bias, grads.blocks[i].bias, -lr);
  }
  axpy(model.attention.w, grads.attention_w, -lr);
  model.attention.b -= lr * grads.attention_b;
  axpy(model.classifier_weight, grads.classifier_weight, -lr);
  axpy(model.classifier_bias, grads.classifier_bias, -lr);
  ++model.step;
  if (!model.all_finite()) {
    throw DivergenceError("apply_update: parameters left the finite range at step " +
                          std::to_string(model.step));
  }
}

double receptive_field_center(const ModelState& model, int q) {
  if (q < 0) throw DomainError("receptive_field_center: cell index must be >= 0");
  // Identity map centers pixel i at i + 0.5; each conv3 shifts by one input
  // pixel, each maxpool2 doubles the stride and adds half of it.
  double scale = 1.0;
  double offset = 0.5;
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    offset += scale * (kConvSide - 1) / 2.0;
    offset += scale * 0.5;
    scale *= 2.0;
  }
  return scale * q + offset;
}

}  // namespace agrp
