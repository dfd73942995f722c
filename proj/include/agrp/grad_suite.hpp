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

#ifndef AGRP_GRAD_SUITE_HPP_
#define AGRP_GRAD_SUITE_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace agrp {

struct ComponentReport {
  std::string name;
  int cases = 0;
  double max_rel_error = 0.0;
};

inline constexpr double kGradPassThreshold = 1e-5;

// Checks every layer and loss against central differences: conv2d, linear,
// relu, maxpool2, softplus, softmax cross-entropy, the hinge regularizer
// (inputs kept away from its kinks), and the attention-pool layer at
// d=4, c=3 for K in {1,2,3}. One report per component, worst error over
// seed_count randomized cases. perturb > 0 injects that bias into one
// analytic gradient coordinate per case, for verifying that the suite can
// fail.
std::vector<ComponentReport> run_grad_suite(int seed_count, double fd_step, double perturb);

bool all_components_pass(const std::vector<ComponentReport>& reports);

}  // namespace agrp

#endif  // AGRP_GRAD_SUITE_HPP_
