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

#include "agrp/losses.hpp"

#include <cmath>
#include <string>

namespace agrp {

CrossEntropyResult softmax_cross_entropy(const Tensor& logits, int label) {
  if (logits.rank() != 1 || logits.dim(0) < 2) {
    throw DomainError("softmax_cross_entropy: need a rank-1 logit vector with C >= 2");
  }
  const int c = logits.dim(0);
  if (label < 0 || label >= c) {
    throw DomainError("softmax_cross_entropy: label " + std::to_string(label) +
                      " outside [0," + std::to_string(c) + ")");
  }
  if (!logits.all_finite()) {
    throw EvalError("softmax_cross_entropy: non-finite logits");
  }
  double max_logit = logits[0];
  for (int i = 1; i < c; ++i) max_logit = std::max(max_logit, logits[static_cast<std::size_t>(i)]);
  double z = 0.0;
  for (int i = 0; i < c; ++i) z += std::exp(logits[static_cast<std::size_t>(i)] - max_logit);

  CrossEntropyResult out;
  out.grad_logits = Tensor({c});
  for (int i = 0; i < c; ++i) {
    out.grad_logits[static_cast<std::size_t>(i)] =
        std::exp(logits[static_cast<std::size_t>(i)] - max_logit) / z;
  }
  out.loss = -(logits[static_cast<std::size_t>(label)] - max_logit - std::log(z));
  out.grad_logits[static_cast<std::size_t>(label)] -= 1.0;
  return out;
}

HingeResult attention_hinge(const Tensor& linear_scores, int delta) {
  if (delta != 1 && delta != -1) {
    throw DomainError("attention_hinge: delta must be +1 or -1");
  }
  if (linear_scores.size() == 0) {
    throw DomainError("attention_hinge: empty score tensor");
  }
  std::size_t argmax = 0;
  double m = linear_scores[0];
  for (std::size_t i = 1; i < linear_scores.size(); ++i) {
    if (linear_scores[i] > m) {  // strict: ties keep the lowest linear index
      m = linear_scores[i];
      argmax = i;
    }
  }
  HingeResult out;
  out.grad_scores = Tensor(linear_scores.shape());
  const double margin = 1.0 - delta * m;
  if (margin > 0.0) {
    out.r = margin;
    out.grad_scores[argmax] = -static_cast<double>(delta);
  }
  return out;
}

LossBreakdown combine(double l_class, double r, double lambda) {
  if (lambda < 0.0) throw DomainError("combine: lambda must be non-negative");
  LossBreakdown b;
  b.l_class = l_class;
  b.r_term = r;
  b.lambda = lambda;
  b.total = l_class + lambda * r;
  return b;
}

}  // namespace agrp
