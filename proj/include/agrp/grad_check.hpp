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

#ifndef AGRP_GRAD_CHECK_HPP_
#define AGRP_GRAD_CHECK_HPP_

#include <functional>
#include <vector>

#include "agrp/rng.hpp"
#include "agrp/tensor.hpp"

namespace agrp {

// Scalar function of a list of tensors (parameters and/or inputs). Callers
// with vector-valued maps contract them with a fixed random probe first.
using ScalarFn = std::function<double(const std::vector<Tensor>&)>;

// Compares an analytic gradient against central differences
// (f(t+e) - f(t-e)) / 2e at probe_count random coordinates of `point`.
// Returns the max of |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
// fd_step must lie in [1e-7, 1e-4]; a non-finite forward value raises EvalError.
double grad_check(const ScalarFn& f, std::vector<Tensor> point,
                  const std::vector<Tensor>& analytic, int probe_count, double fd_step,
                  Rng& rng);

}  // namespace agrp

#endif  // AGRP_GRAD_CHECK_HPP_
