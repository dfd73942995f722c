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

#ifndef AGRP_LOSSES_HPP_
#define AGRP_LOSSES_HPP_

#include "agrp/tensor.hpp"

namespace agrp {

// total = l_class + lambda * r_term.
struct LossBreakdown {
  double l_class = 0.0;
  double r_term = 0.0;
  double total = 0.0;
  double lambda = 0.0;
};

struct CrossEntropyResult {
  double loss = 0.0;
  Tensor grad_logits;
};

// Multi-class cross entropy over C >= 2 logits, max-subtracted softmax.
// grad = softmax(logits) - onehot(label).
CrossEntropyResult softmax_cross_entropy(const Tensor& logits, int label);

struct HingeResult {
  double r = 0.0;
  Tensor grad_scores;
};

// Margin penalty on the max raw attention score of an instance:
//   r = max(0, 1 - delta * max(u)).
// delta = +1 for class instances, -1 for negative-pool instances. The
// subgradient touches only the argmax coordinate (ties to the lowest linear
// index) and is zero at the kink.
HingeResult attention_hinge(const Tensor& linear_scores, int delta);

LossBreakdown combine(double l_class, double r, double lambda);

}  // namespace agrp

#endif  // AGRP_LOSSES_HPP_
