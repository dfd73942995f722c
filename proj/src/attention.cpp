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

#include "agrp/attention.hpp"

#include <cmath>
#include <string>

#include "agrp/ops.hpp"

namespace agrp {

namespace {

struct GroupDims {
  int k, d, c;
};

GroupDims check_group(const std::vector<Tensor>& maps, const AttentionParams* params) {
  if (maps.empty()) throw DimensionError("attention: group must contain at least one map");
  const Tensor& first = maps.front();
  if (first.rank() != 3) {
    throw DimensionError("attention: feature maps must be rank-3 d x d x c");
  }
  GroupDims g{static_cast<int>(maps.size()), first.dim(0), first.dim(2)};
  if (first.dim(0) != first.dim(1)) {
    throw DimensionError("attention: feature maps must be square, got " +
                         std::to_string(first.dim(0)) + "x" + std::to_string(first.dim(1)));
  }
  for (const Tensor& m : maps) {
    if (!m.same_shape(first)) {
      throw DimensionError("attention: all maps in a group must share d and c");
    }
  }
  if (params != nullptr) {
    if (params->w.rank() != 1 || params->w.dim(0) != g.c) {
      throw DimensionError("attention: detector weight axis " +
                           std::to_string(params->w.rank() == 1 ? params->w.dim(0) : -1) +
                           " does not match feature channel axis " + std::to_string(g.c));
    }
  }
  return g;
}

}  // namespace

AttentionTrace attention_forward(const std::vector<Tensor>& maps,
                                 const AttentionParams& params, double epsilon) {
  const GroupDims g = check_group(maps, &params);
  if (epsilon < 0.0) throw DomainError("attention: epsilon must be non-negative");

  AttentionTrace t;
  t.epsilon = epsilon;
  t.linear_scores = Tensor({g.k, g.d, g.d});
  t.scores = Tensor({g.k, g.d, g.d});
  t.normalized = Tensor({g.k, g.d, g.d});
  t.attended = Tensor({g.k, g.d, g.d, g.c});
  t.pooled = Tensor({g.c});

  const double* w = params.w.data();
  for (int k = 0; k < g.k; ++k) {
    const double* x = maps[static_cast<std::size_t>(k)].data();
    double denom = 0.0;
    for (int i = 0; i < g.d; ++i) {
      for (int j = 0; j < g.d; ++j) {
        const double* xv = x + (static_cast<std::size_t>(i) * g.d + j) * g.c;
        double u = params.b;
        for (int c = 0; c < g.c; ++c) u += w[c] * xv[c];
        const double s = softplus(u);
        t.linear_scores.at(k, i, j) = u;
        t.scores.at(k, i, j) = s;
        denom += s + epsilon;
      }
    }
    if (denom == 0.0) {
      throw DomainError("attention: zero normalization denominator (all scores zero and "
                        "epsilon = 0)");
    }
    for (int i = 0; i < g.d; ++i) {
      for (int j = 0; j < g.d; ++j) {
        const double a = (t.scores.at(k, i, j) + epsilon) / denom;
        t.normalized.at(k, i, j) = a;
        const double* xv = x + (static_cast<std::size_t>(i) * g.d + j) * g.c;
        double* av = t.attended.data() +
                     ((static_cast<std::size_t>(k) * g.d + i) * g.d + j) * g.c;
        for (int c = 0; c < g.c; ++c) av[c] = a * xv[c];
      }
    }
  }

  const double scale = 1.0 / (static_cast<double>(g.d) * g.d * g.k);
  for (int k = 0; k < g.k; ++k) {
    for (int i = 0; i < g.d; ++i) {
      for (int j = 0; j < g.d; ++j) {
        const double* av = t.attended.data() +
                           ((static_cast<std::size_t>(k) * g.d + i) * g.d + j) * g.c;
        for (int c = 0; c < g.c; ++c) t.pooled[static_cast<std::size_t>(c)] += av[c];
      }
    }
  }
  for (int c = 0; c < g.c; ++c) t.pooled[static_cast<std::size_t>(c)] *= scale;
  return t;
}

Tensor attention_linear_scores(const std::vector<Tensor>& maps, const AttentionParams& params) {
  const GroupDims g = check_group(maps, &params);
  Tensor u({g.k, g.d, g.d});
  const double* w = params.w.data();
  for (int k = 0; k < g.k; ++k) {
    const double* x = maps[static_cast<std::size_t>(k)].data();
    for (int i = 0; i < g.d; ++i) {
      for (int j = 0; j < g.d; ++j) {
        const double* xv = x + (static_cast<std::size_t>(i) * g.d + j) * g.c;
        double dot = params.b;
        for (int c = 0; c < g.c; ++c) dot += w[c] * xv[c];
        u.at(k, i, j) = dot;
      }
    }
  }
  return u;
}

AttentionGrads& AttentionGrads::operator+=(const AttentionGrads& other) {
  if (maps.size() != other.maps.size() || !w.same_shape(other.w)) {
    throw DimensionError("AttentionGrads: incompatible shapes in +=");
  }
  for (std::size_t k = 0; k < maps.size(); ++k) {
    for (std::size_t i = 0; i < maps[k].size(); ++i) maps[k][i] += other.maps[k][i];
  }
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += other.w[i];
  b += other.b;
  return *this;
}

AttentionGrads attention_backward(const AttentionTrace& trace,
                                  const std::vector<Tensor>& maps,
                                  const AttentionParams& params, const Tensor& grad_pooled) {
  const GroupDims g = check_group(maps, &params);
  if (trace.linear_scores.rank() != 3 || trace.linear_scores.dim(0) != g.k ||
      trace.linear_scores.dim(1) != g.d ||
      trace.attended.rank() != 4 || trace.attended.dim(3) != g.c) {
    throw StateError("attention_backward: trace does not match the given maps");
  }
  if (grad_pooled.rank() != 1 || grad_pooled.dim(0) != g.c) {
    throw DimensionError("attention_backward: pooled gradient must be a c-vector");
  }

  AttentionGrads out;
  out.maps.assign(static_cast<std::size_t>(g.k), Tensor({g.d, g.d, g.c}));
  out.w = Tensor({g.c});
  out.b = 0.0;

  const double scale = 1.0 / (static_cast<double>(g.d) * g.d * g.k);
  const double* gp = grad_pooled.data();
  const double* w = params.w.data();

  for (int k = 0; k < g.k; ++k) {
    const double* x = maps[static_cast<std::size_t>(k)].data();
    double* gx = out.maps[static_cast<std::size_t>(k)].data();

    // dL/da_ij = scale * (gp . x_ij); denominator T_k = (s_ij + eps summed).
    Tensor grad_a({g.d, g.d});
    double denom = 0.0;
    double dot_ga_a = 0.0;  // sum_ij dL/da_ij * a_ij
    for (int i = 0; i < g.d; ++i) {
      for (int j = 0; j < g.d; ++j) {
        const double* xv = x + (static_cast<std::size_t>(i) * g.d + j) * g.c;
        double dot = 0.0;
        for (int c = 0; c < g.c; ++c) dot += gp[c] * xv[c];
        const double ga = scale * dot;
        grad_a.at(i, j) = ga;
        denom += trace.scores.at(k, i, j) + trace.epsilon;
        dot_ga_a += ga * trace.normalized.at(k, i, j);
      }
    }

    for (int i = 0; i < g.d; ++i) {
      for (int j = 0; j < g.d; ++j) {
        const double a = trace.normalized.at(k, i, j);
        const double u = trace.linear_scores.at(k, i, j);
        // Through the normalization quotient, then the softplus.
        const double grad_s = (grad_a.at(i, j) - dot_ga_a) / denom;
        const double grad_u = grad_s * sigmoid(u);
        out.b += grad_u;
        const double* xv = x + (static_cast<std::size_t>(i) * g.d + j) * g.c;
        double* gxv = gx + (static_cast<std::size_t>(i) * g.d + j) * g.c;
        for (int c = 0; c < g.c; ++c) {
          out.w[static_cast<std::size_t>(c)] += grad_u * xv[c];
          // Direct path through x^ = a*x plus the path through u = w.x + b.
          gxv[c] += scale * a * gp[c] + grad_u * w[c];
        }
      }
    }
  }
  return out;
}

AttentionGrads linear_score_backward(const std::vector<Tensor>& maps,
                                     const AttentionParams& params,
                                     const Tensor& grad_scores) {
  const GroupDims g = check_group(maps, &params);
  if (grad_scores.rank() != 3 || grad_scores.dim(0) != g.k || grad_scores.dim(1) != g.d ||
      grad_scores.dim(2) != g.d) {
    throw DimensionError("linear_score_backward: grad must be K x d x d");
  }
  AttentionGrads out;
  out.maps.assign(static_cast<std::size_t>(g.k), Tensor({g.d, g.d, g.c}));
  out.w = Tensor({g.c});
  out.b = 0.0;
  const double* w = params.w.data();
  for (int k = 0; k < g.k; ++k) {
    const double* x = maps[static_cast<std::size_t>(k)].data();
    double* gx = out.maps[static_cast<std::size_t>(k)].data();
    for (int i = 0; i < g.d; ++i) {
      for (int j = 0; j < g.d; ++j) {
        const double gu = grad_scores.at(k, i, j);
        if (gu == 0.0) continue;
        out.b += gu;
        const double* xv = x + (static_cast<std::size_t>(i) * g.d + j) * g.c;
        double* gxv = gx + (static_cast<std::size_t>(i) * g.d + j) * g.c;
        for (int c = 0; c < g.c; ++c) {
          out.w[static_cast<std::size_t>(c)] += gu * xv[c];
          gxv[c] += gu * w[c];
        }
      }
    }
  }
  return out;
}

Tensor average_pool_forward(const std::vector<Tensor>& maps) {
  const GroupDims g = check_group(maps, nullptr);
  Tensor pooled({g.c});
  for (int k = 0; k < g.k; ++k) {
    const double* x = maps[static_cast<std::size_t>(k)].data();
    for (int i = 0; i < g.d; ++i) {
      for (int j = 0; j < g.d; ++j) {
        const double* xv = x + (static_cast<std::size_t>(i) * g.d + j) * g.c;
        for (int c = 0; c < g.c; ++c) pooled[static_cast<std::size_t>(c)] += xv[c];
      }
    }
  }
  const double scale = 1.0 / (static_cast<double>(g.d) * g.d * g.k);
  for (int c = 0; c < g.c; ++c) pooled[static_cast<std::size_t>(c)] *= scale;
  return pooled;
}

std::vector<Tensor> average_pool_backward(int group_size, int side, int channels,
                                          const Tensor& grad_pooled) {
  if (group_size < 1 || side < 1 || channels < 1) {
    throw DimensionError("average_pool_backward: non-positive dimensions");
  }
  if (grad_pooled.rank() != 1 || grad_pooled.dim(0) != channels) {
    throw DimensionError("average_pool_backward: pooled gradient must be a c-vector");
  }
  const double scale = 1.0 / (static_cast<double>(side) * side * group_size);
  std::vector<Tensor> grads(static_cast<std::size_t>(group_size),
                            Tensor({side, side, channels}));
  for (Tensor& g : grads) {
    double* gx = g.data();
    for (int i = 0; i < side; ++i) {
      for (int j = 0; j < side; ++j) {
        double* gxv = gx + (static_cast<std::size_t>(i) * side + j) * channels;
        for (int c = 0; c < channels; ++c) gxv[c] = scale * grad_pooled[static_cast<std::size_t>(c)];
      }
    }
  }
  return grads;
}

}  // namespace agrp
