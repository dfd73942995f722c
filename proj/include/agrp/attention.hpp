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

#ifndef AGRP_ATTENTION_HPP_
#define AGRP_ATTENTION_HPP_

#include <vector>

#include "agrp/tensor.hpp"

namespace agrp {

// The shared linear attention detector scoring every spatial cell of a
// feature map. One detector serves all classes.
struct AttentionParams {
  Tensor w;   // c-vector
  double b = 0.0;
};

// Every intermediate of one attention-pooling forward pass over a group of
// K feature maps of shape d x d x c:
//   linear_scores  u = w.x + b            (K x d x d)
//   scores         s = softplus(u)        (K x d x d, strictly positive)
//   normalized     a = (s+eps)/sum_ij(s+eps), per-image denominator
//   attended       x^ = a * x             (K x d x d x c)
//   pooled         h = sum(x^) / (d^2 K)  (c-vector)
struct AttentionTrace {
  Tensor linear_scores;
  Tensor scores;
  Tensor normalized;
  Tensor attended;
  Tensor pooled;
  double epsilon = 0.0;
};

AttentionTrace attention_forward(const std::vector<Tensor>& maps,
                                 const AttentionParams& params, double epsilon);

// Raw linear scores u = w.x + b only (K x d x d), for callers that need the
// regularizer input without the normalization pipeline.
Tensor attention_linear_scores(const std::vector<Tensor>& maps, const AttentionParams& params);

struct AttentionGrads {
  std::vector<Tensor> maps;   // one d x d x c gradient per group member
  Tensor w;                   // c-vector
  double b = 0.0;

  AttentionGrads& operator+=(const AttentionGrads& other);
};

// Exact gradients of grad_pooled . h through scoring, normalization,
// weighting and pooling, with respect to the feature maps and the detector.
// The trace must come from attention_forward on the same maps and params.
AttentionGrads attention_backward(const AttentionTrace& trace,
                                  const std::vector<Tensor>& maps,
                                  const AttentionParams& params, const Tensor& grad_pooled);

// Backward of the raw linear scores u = w.x + b alone, for losses that act
// on u directly (the hinge regularizer). grad_scores is K x d x d.
AttentionGrads linear_score_backward(const std::vector<Tensor>& maps,
                                     const AttentionParams& params,
                                     const Tensor& grad_scores);

// Plain pooling used by the no-attention variants:
// h = sum_ijk(x) / (d^2 K).
Tensor average_pool_forward(const std::vector<Tensor>& maps);
std::vector<Tensor> average_pool_backward(int group_size, int side, int channels,
                                          const Tensor& grad_pooled);

}  // namespace agrp

#endif  // AGRP_ATTENTION_HPP_
