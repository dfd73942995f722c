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

#include "agrp/ops.hpp"

#include <cmath>
#include <string>

namespace agrp {

double softplus(double x) {
  // For large x, ln(1+e^x) = x + ln(1+e^-x); keeps the exp argument negative.
  if (x > 30.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor softplus(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = softplus(v);
  return y;
}

Tensor softplus_backward(const Tensor& x, const Tensor& grad_out) {
  if (!x.same_shape(grad_out)) {
    throw DimensionError("softplus_backward: grad shape does not match input shape");
  }
  Tensor g = x;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = sigmoid(x[i]) * grad_out[i];
  return g;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& grad_out) {
  if (!x.same_shape(grad_out)) {
    throw DimensionError("relu_backward: grad shape does not match input shape");
  }
  Tensor g = x;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = x[i] > 0.0 ? grad_out[i] : 0.0;
  return g;
}

namespace {

void check_map3(const Tensor& t, const char* who) {
  if (t.rank() != 3) {
    throw DimensionError(std::string(who) + ": expected rank-3 h x w x c tensor, got rank " +
                         std::to_string(t.rank()));
  }
}

// Argmax of a 2x2 window, ties to the lowest linear index.
std::size_t window_argmax(const Tensor& in, int i0, int j0, int ch) {
  const int w = in.dim(1);
  const int c = in.dim(2);
  std::size_t best = (static_cast<std::size_t>(i0) * w + j0) * c + ch;
  double best_v = in[best];
  for (int di = 0; di < 2; ++di) {
    for (int dj = 0; dj < 2; ++dj) {
      const std::size_t idx = (static_cast<std::size_t>(i0 + di) * w + (j0 + dj)) * c + ch;
      if (in[idx] > best_v) {
        best_v = in[idx];
        best = idx;
      }
    }
  }
  return best;
}

}  // namespace

Tensor maxpool2_forward(const Tensor& input) {
  check_map3(input, "maxpool2_forward");
  const int h = input.dim(0), w = input.dim(1), c = input.dim(2);
  if (h < 2 || w < 2) {
    throw DimensionError("maxpool2_forward: spatial dims must be >= 2, got " +
                         std::to_string(h) + "x" + std::to_string(w));
  }
  const int oh = h / 2, ow = w / 2;
  Tensor out({oh, ow, c});
  for (int i = 0; i < oh; ++i) {
    for (int j = 0; j < ow; ++j) {
      for (int ch = 0; ch < c; ++ch) {
        out.at(i, j, ch) = input[window_argmax(input, 2 * i, 2 * j, ch)];
      }
    }
  }
  return out;
}

Tensor maxpool2_backward(const Tensor& input, const Tensor& grad_out) {
  check_map3(input, "maxpool2_backward");
  const int h = input.dim(0), w = input.dim(1), c = input.dim(2);
  const int oh = h / 2, ow = w / 2;
  if (grad_out.rank() != 3 || grad_out.dim(0) != oh || grad_out.dim(1) != ow ||
      grad_out.dim(2) != c) {
    throw DimensionError("maxpool2_backward: grad shape does not match pooled output");
  }
  Tensor grad_in(input.shape());
  for (int i = 0; i < oh; ++i) {
    for (int j = 0; j < ow; ++j) {
      for (int ch = 0; ch < c; ++ch) {
        grad_in[window_argmax(input, 2 * i, 2 * j, ch)] += grad_out.at(i, j, ch);
      }
    }
  }
  return grad_in;
}

namespace {

struct ConvDims {
  int h, w, cin, k, cout, out;
};

ConvDims check_conv(const Tensor& input, const Tensor& kernels, const Tensor* bias,
                    int stride) {
  check_map3(input, "conv2d");
  if (kernels.rank() != 4) {
    throw DimensionError("conv2d: expected rank-4 k x k x cin x cout kernels, got rank " +
                         std::to_string(kernels.rank()));
  }
  ConvDims d{};
  d.h = input.dim(0);
  d.w = input.dim(1);
  d.cin = input.dim(2);
  d.k = kernels.dim(0);
  d.cout = kernels.dim(3);
  if (d.h != d.w) {
    throw DimensionError("conv2d: input must be square, got height " + std::to_string(d.h) +
                         " vs width " + std::to_string(d.w));
  }
  if (kernels.dim(0) != kernels.dim(1)) {
    throw DimensionError("conv2d: kernels must be square, got axis0 " +
                         std::to_string(kernels.dim(0)) + " vs axis1 " +
                         std::to_string(kernels.dim(1)));
  }
  if (kernels.dim(2) != d.cin) {
    throw DimensionError("conv2d: kernel input-channel axis " + std::to_string(kernels.dim(2)) +
                         " does not match input channel axis " + std::to_string(d.cin));
  }
  if (bias != nullptr && (bias->rank() != 1 || bias->dim(0) != d.cout)) {
    throw DimensionError("conv2d: bias axis must equal kernel output-channel axis " +
                         std::to_string(d.cout));
  }
  if (stride < 1) throw DimensionError("conv2d: stride must be positive");
  if (d.k > d.h) {
    throw DimensionError("conv2d: kernel side " + std::to_string(d.k) +
                         " exceeds input side " + std::to_string(d.h));
  }
  d.out = (d.h - d.k) / stride + 1;
  return d;
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias,
                      int stride) {
  const ConvDims d = check_conv(input, kernels, &bias, stride);
  Tensor out({d.out, d.out, d.cout});
  const double* x = input.data();
  const double* ker = kernels.data();
  double* y = out.data();
  for (int oi = 0; oi < d.out; ++oi) {
    for (int oj = 0; oj < d.out; ++oj) {
      for (int co = 0; co < d.cout; ++co) {
        double acc = bias[static_cast<std::size_t>(co)];
        for (int ki = 0; ki < d.k; ++ki) {
          for (int kj = 0; kj < d.k; ++kj) {
            const std::size_t xbase =
                (static_cast<std::size_t>(oi * stride + ki) * d.w + (oj * stride + kj)) * d.cin;
            const std::size_t kbase =
                ((static_cast<std::size_t>(ki) * d.k + kj) * d.cin) * d.cout + co;
            for (int ci = 0; ci < d.cin; ++ci) {
              acc += x[xbase + ci] * ker[kbase + static_cast<std::size_t>(ci) * d.cout];
            }
          }
        }
        y[(static_cast<std::size_t>(oi) * d.out + oj) * d.cout + co] = acc;
      }
    }
  }
  return out;
}

LayerGrads conv2d_backward(const Tensor& input, const Tensor& kernels, int stride,
                           const Tensor& grad_out) {
  const ConvDims d = check_conv(input, kernels, nullptr, stride);
  if (grad_out.rank() != 3 || grad_out.dim(0) != d.out || grad_out.dim(1) != d.out ||
      grad_out.dim(2) != d.cout) {
    throw DimensionError("conv2d_backward: grad shape does not match forward output");
  }
  LayerGrads g;
  g.input = Tensor(input.shape());
  Tensor gk(kernels.shape());
  Tensor gb({d.cout});
  const double* x = input.data();
  const double* ker = kernels.data();
  const double* go = grad_out.data();
  double* gx = g.input.data();
  double* gkp = gk.data();
  double* gbp = gb.data();
  for (int oi = 0; oi < d.out; ++oi) {
    for (int oj = 0; oj < d.out; ++oj) {
      for (int co = 0; co < d.cout; ++co) {
        const double gv = go[(static_cast<std::size_t>(oi) * d.out + oj) * d.cout + co];
        gbp[co] += gv;
        for (int ki = 0; ki < d.k; ++ki) {
          for (int kj = 0; kj < d.k; ++kj) {
            const std::size_t xbase =
                (static_cast<std::size_t>(oi * stride + ki) * d.w + (oj * stride + kj)) * d.cin;
            const std::size_t kbase =
                ((static_cast<std::size_t>(ki) * d.k + kj) * d.cin) * d.cout + co;
            for (int ci = 0; ci < d.cin; ++ci) {
              const std::size_t ko = kbase + static_cast<std::size_t>(ci) * d.cout;
              gkp[ko] += x[xbase + ci] * gv;
              gx[xbase + ci] += ker[ko] * gv;
            }
          }
        }
      }
    }
  }
  g.params["kernels"] = std::move(gk);
  g.params["bias"] = std::move(gb);
  return g;
}

Tensor linear_forward(const Tensor& weight, const Tensor& x, const Tensor& bias) {
  if (weight.rank() != 2) throw DimensionError("linear: weight must be rank-2 out x in");
  if (x.rank() != 1 || x.dim(0) != weight.dim(1)) {
    throw DimensionError("linear: input axis " +
                         std::to_string(x.rank() == 1 ? x.dim(0) : -1) +
                         " does not match weight input axis " + std::to_string(weight.dim(1)));
  }
  if (bias.rank() != 1 || bias.dim(0) != weight.dim(0)) {
    throw DimensionError("linear: bias axis must equal weight output axis " +
                         std::to_string(weight.dim(0)));
  }
  const int out = weight.dim(0), in = weight.dim(1);
  Tensor y({out});
  for (int o = 0; o < out; ++o) {
    double acc = bias[static_cast<std::size_t>(o)];
    for (int i = 0; i < in; ++i) {
      acc += weight[static_cast<std::size_t>(o) * in + i] * x[static_cast<std::size_t>(i)];
    }
    y[static_cast<std::size_t>(o)] = acc;
  }
  return y;
}

LayerGrads linear_backward(const Tensor& weight, const Tensor& x, const Tensor& grad_out) {
  if (weight.rank() != 2 || x.rank() != 1 || x.dim(0) != weight.dim(1)) {
    throw DimensionError("linear_backward: weight/input shape mismatch");
  }
  if (grad_out.rank() != 1 || grad_out.dim(0) != weight.dim(0)) {
    throw DimensionError("linear_backward: grad axis must equal weight output axis");
  }
  const int out = weight.dim(0), in = weight.dim(1);
  LayerGrads g;
  Tensor gw(weight.shape());
  Tensor gb({out});
  g.input = Tensor(x.shape());
  for (int o = 0; o < out; ++o) {
    const double gv = grad_out[static_cast<std::size_t>(o)];
    gb[static_cast<std::size_t>(o)] = gv;
    for (int i = 0; i < in; ++i) {
      gw[static_cast<std::size_t>(o) * in + i] = gv * x[static_cast<std::size_t>(i)];
      g.input[static_cast<std::size_t>(i)] += gv * weight[static_cast<std::size_t>(o) * in + i];
    }
  }
  g.params["weight"] = std::move(gw);
  g.params["bias"] = std::move(gb);
  return g;
}

}  // namespace agrp
