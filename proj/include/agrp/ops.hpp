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

#ifndef AGRP_OPS_HPP_
#define AGRP_OPS_HPP_

#include <map>
#include <string>

#include "agrp/tensor.hpp"

namespace agrp {

// Gradients produced by a layer's backward pass: one tensor per parameter,
// keyed by name, plus the gradient with respect to the layer input. Every
// gradient has the same shape as the thing it differentiates.
struct LayerGrads {
  std::map<std::string, Tensor> params;
  Tensor input;
};

// Numerically stable ln(1 + exp(x)). Exact asymptotes at both ends.
double softplus(double x);
// Logistic sigmoid, the softplus derivative.
double sigmoid(double x);

Tensor softplus(const Tensor& x);
// grad_in = sigmoid(x) * grad_out, elementwise.
Tensor softplus_backward(const Tensor& x, const Tensor& grad_out);

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& grad_out);

// 2x2 stride-2 max pooling over an h x w x c map. Odd trailing rows/columns
// are dropped. Ties route to the lowest linear index in the backward pass.
Tensor maxpool2_forward(const Tensor& input);
Tensor maxpool2_backward(const Tensor& input, const Tensor& grad_out);

// Valid-padding cross-correlation of an h x w x cin input (square, h == w)
// with k x k x cin x cout kernels plus per-channel bias.
// Output side = (h - k) / stride + 1.
Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias,
                      int stride = 1);
// Returns params["kernels"], params["bias"] and the input gradient.
LayerGrads conv2d_backward(const Tensor& input, const Tensor& kernels, int stride,
                           const Tensor& grad_out);

// y = W x + bias with W of shape out x in.
Tensor linear_forward(const Tensor& weight, const Tensor& x, const Tensor& bias);
// Returns params["weight"], params["bias"] and the input gradient.
LayerGrads linear_backward(const Tensor& weight, const Tensor& x, const Tensor& grad_out);

}  // namespace agrp

#endif  // AGRP_OPS_HPP_
