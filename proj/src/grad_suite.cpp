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

#include "agrp/grad_suite.hpp"

#include <algorithm>
#include <cmath>

#include "agrp/attention.hpp"
#include "agrp/grad_check.hpp"
#include "agrp/losses.hpp"
#include "agrp/ops.hpp"

namespace agrp {

namespace {

constexpr int kProbes = 24;

Tensor random_tensor(std::vector<int> shape, double lo, double hi, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

double dot_all(const Tensor& probe, const Tensor& value) {
  double s = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) s += probe[i] * value[i];
  return s;
}

// A case is one randomized instance: a point, its analytic gradient, and the
// scalar function both are checked against.
struct Case {
  ScalarFn f;
  std::vector<Tensor> point;
  std::vector<Tensor> analytic;
};

Case conv_case(Rng& rng) {
  Case c;
  Tensor input = random_tensor({6, 6, 2}, -1.0, 1.0, rng);
  Tensor kernels = random_tensor({3, 3, 2, 3}, -0.7, 0.7, rng);
  Tensor bias = random_tensor({3}, -0.3, 0.3, rng);
  const Tensor probe = random_tensor({4, 4, 3}, -1.0, 1.0, rng);
  LayerGrads grads = conv2d_backward(input, kernels, 1, probe);
  c.point = {std::move(input), std::move(kernels), std::move(bias)};
  c.analytic = {grads.input, grads.params.at("kernels"), grads.params.at("bias")};
  c.f = [probe](const std::vector<Tensor>& p) {
    return dot_all(probe, conv2d_forward(p[0], p[1], p[2]));
  };
  return c;
}

Case linear_case(Rng& rng) {
  Case c;
  Tensor weight = random_tensor({4, 6}, -1.0, 1.0, rng);
  Tensor x = random_tensor({6}, -1.0, 1.0, rng);
  Tensor bias = random_tensor({4}, -1.0, 1.0, rng);
  const Tensor probe = random_tensor({4}, -1.0, 1.0, rng);
  LayerGrads grads = linear_backward(weight, x, probe);
  c.analytic = {grads.params.at("weight"), grads.input, grads.params.at("bias")};
  c.point = {std::move(weight), std::move(x), std::move(bias)};
  c.f = [probe](const std::vector<Tensor>& p) {
    return dot_all(probe, linear_forward(p[0], p[1], p[2]));
  };
  return c;
}

Case relu_case(Rng& rng) {
  Case c;
  // Inputs kept off the kink at zero.
  Tensor x({24});
  for (double& v : x.values()) {
    const double mag = rng.uniform(0.2, 1.0);
    v = rng.bernoulli(0.5) ? mag : -mag;
  }
  const Tensor probe = random_tensor({24}, -1.0, 1.0, rng);
  c.analytic = {relu_backward(x, probe)};
  c.point = {std::move(x)};
  c.f = [probe](const std::vector<Tensor>& p) { return dot_all(probe, relu(p[0])); };
  return c;
}

Case softplus_case(Rng& rng) {
  Case c;
  Tensor x = random_tensor({24}, -3.0, 3.0, rng);
  const Tensor probe = random_tensor({24}, -1.0, 1.0, rng);
  c.analytic = {softplus_backward(x, probe)};
  c.point = {std::move(x)};
  c.f = [probe](const std::vector<Tensor>& p) { return dot_all(probe, softplus(p[0])); };
  return c;
}

Case maxpool_case(Rng& rng) {
  Case c;
  // Values in each 2x2 window must stay separated so finite differences
  // cannot flip the argmax.
  Tensor x({6, 6, 2});
  bool separated = false;
  while (!separated) {
    for (double& v : x.values()) v = rng.uniform(0.0, 1.0);
    separated = true;
    for (int i = 0; i + 1 < 6 && separated; i += 2) {
      for (int j = 0; j + 1 < 6 && separated; j += 2) {
        for (int ch = 0; ch < 2 && separated; ++ch) {
          const double w[4] = {x.at(i, j, ch), x.at(i, j + 1, ch), x.at(i + 1, j, ch),
                               x.at(i + 1, j + 1, ch)};
          for (int a = 0; a < 4 && separated; ++a) {
            for (int b = a + 1; b < 4; ++b) {
              if (std::abs(w[a] - w[b]) < 1e-3) {
                separated = false;
                break;
              }
            }
          }
        }
      }
    }
  }
  const Tensor probe = random_tensor({3, 3, 2}, -1.0, 1.0, rng);
  c.analytic = {maxpool2_backward(x, probe)};
  c.point = {std::move(x)};
  c.f = [probe](const std::vector<Tensor>& p) { return dot_all(probe, maxpool2_forward(p[0])); };
  return c;
}

Case softmax_ce_case(Rng& rng) {
  Case c;
  Tensor logits = random_tensor({5}, -2.0, 2.0, rng);
  const int label = static_cast<int>(rng.index(5));
  c.analytic = {softmax_cross_entropy(logits, label).grad_logits};
  c.point = {std::move(logits)};
  c.f = [label](const std::vector<Tensor>& p) { return softmax_cross_entropy(p[0], label).loss; };
  return c;
}

Case hinge_case(Rng& rng) {
  Case c;
  const int delta = rng.bernoulli(0.5) ? +1 : -1;
  // Scores inside (-0.9, 0.9) keep the hinge active with margin >= 0.1; a
  // forced gap below the max keeps the argmax stable under fd_step nudges.
  Tensor u({2, 3, 3});
  bool separated = false;
  while (!separated) {
    for (double& v : u.values()) v = rng.uniform(-0.9, 0.9);
    double top = u[0], second = -2.0;
    for (std::size_t i = 1; i < u.size(); ++i) {
      if (u[i] > top) {
        second = top;
        top = u[i];
      } else {
        second = std::max(second, u[i]);
      }
    }
    separated = top - second > 1e-3;
  }
  c.analytic = {attention_hinge(u, delta).grad_scores};
  c.point = {std::move(u)};
  c.f = [delta](const std::vector<Tensor>& p) { return attention_hinge(p[0], delta).r; };
  return c;
}

Case attention_case(int k, Rng& rng) {
  Case c;
  const int d = 4;
  const int ch = 3;
  std::vector<Tensor> maps;
  for (int m = 0; m < k; ++m) maps.push_back(random_tensor({d, d, ch}, -1.0, 1.0, rng));
  AttentionParams params;
  params.w = random_tensor({ch}, -1.0, 1.0, rng);
  params.b = rng.uniform(-0.5, 0.5);
  const double epsilon = 0.1;
  const Tensor probe = random_tensor({ch}, -1.0, 1.0, rng);

  const AttentionTrace trace = attention_forward(maps, params, epsilon);
  AttentionGrads grads = attention_backward(trace, maps, params, probe);

  c.point = maps;
  c.point.push_back(params.w);
  c.point.push_back(Tensor({1}, {params.b}));
  c.analytic = grads.maps;
  c.analytic.push_back(grads.w);
  c.analytic.push_back(Tensor({1}, {grads.b}));
  c.f = [k, epsilon, probe](const std::vector<Tensor>& p) {
    std::vector<Tensor> m(p.begin(), p.begin() + k);
    AttentionParams prm;
    prm.w = p[static_cast<std::size_t>(k)];
    prm.b = p[static_cast<std::size_t>(k) + 1][0];
    return dot_all(probe, attention_forward(m, prm, epsilon).pooled);
  };
  return c;
}

double run_component(const std::string& name, int seed_count, double fd_step, double perturb,
                     const std::function<Case(Rng&)>& make,
                     std::vector<ComponentReport>& reports) {
  ComponentReport report;
  report.name = name;
  report.cases = seed_count;
  for (int s = 0; s < seed_count; ++s) {
    Rng rng(mix_seed(0x677261646b, static_cast<std::uint64_t>(s) * 1000003 +
                                       static_cast<std::uint64_t>(reports.size())));
    Case c = make(rng);
    if (perturb > 0.0 && !c.analytic.empty() && c.analytic[0].size() > 0) {
      c.analytic[0][0] += perturb;
    }
    const double err = grad_check(c.f, c.point, c.analytic, kProbes, fd_step, rng);
    report.max_rel_error = std::max(report.max_rel_error, err);
  }
  reports.push_back(report);
  return report.max_rel_error;
}

}  // namespace

std::vector<ComponentReport> run_grad_suite(int seed_count, double fd_step, double perturb) {
  if (seed_count < 1) throw DomainError("run_grad_suite: seed_count must be >= 1");
  std::vector<ComponentReport> reports;
  run_component("conv2d", seed_count, fd_step, perturb, conv_case, reports);
  run_component("linear", seed_count, fd_step, perturb, linear_case, reports);
  run_component("relu", seed_count, fd_step, perturb, relu_case, reports);
  run_component("maxpool2", seed_count, fd_step, perturb, maxpool_case, reports);
  run_component("softplus", seed_count, fd_step, perturb, softplus_case, reports);
  run_component("softmax_ce", seed_count, fd_step, perturb, softmax_ce_case, reports);
  run_component("hinge", seed_count, fd_step, perturb, hinge_case, reports);
  for (int k = 1; k <= 3; ++k) {
    run_component("attention_pool_k" + std::to_string(k), seed_count, fd_step, perturb,
                  [k](Rng& rng) { return attention_case(k, rng); }, reports);
  }
  return reports;
}

bool all_components_pass(const std::vector<ComponentReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const ComponentReport& r) {
    return r.max_rel_error < kGradPassThreshold;
  });
}

}  // namespace agrp
