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

#include "agrp/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace agrp {

double grad_check(const ScalarFn& f, std::vector<Tensor> point,
                  const std::vector<Tensor>& analytic, int probe_count, double fd_step,
                  Rng& rng) {
  if (fd_step < 1e-7 || fd_step > 1e-4) {
    throw DomainError("grad_check: fd_step must lie in [1e-7, 1e-4]");
  }
  if (probe_count < 1) throw DomainError("grad_check: probe_count must be positive");
  if (analytic.size() != point.size()) {
    throw DimensionError("grad_check: analytic gradient count does not match point");
  }
  std::size_t total = 0;
  for (std::size_t t = 0; t < point.size(); ++t) {
    if (!analytic[t].same_shape(point[t])) {
      throw DimensionError("grad_check: analytic gradient " + std::to_string(t) +
                           " shape does not match its tensor");
    }
    total += point[t].size();
  }
  if (total == 0) throw DimensionError("grad_check: empty point");

  const double base = f(point);
  if (!std::isfinite(base)) throw EvalError("grad_check: non-finite forward value");

  double worst = 0.0;
  for (int p = 0; p < probe_count; ++p) {
    // Pick a flat coordinate across all tensors.
    std::size_t flat = rng.index(total);
    std::size_t t = 0;
    while (flat >= point[t].size()) {
      flat -= point[t].size();
      ++t;
    }
    const double saved = point[t][flat];
    point[t][flat] = saved + fd_step;
    const double plus = f(point);
    point[t][flat] = saved - fd_step;
    const double minus = f(point);
    point[t][flat] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw EvalError("grad_check: non-finite forward value at probe");
    }
    const double numeric = (plus - minus) / (2.0 * fd_step);
    const double a = analytic[t][flat];
    const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace agrp
