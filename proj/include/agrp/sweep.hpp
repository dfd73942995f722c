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

#ifndef AGRP_SWEEP_HPP_
#define AGRP_SWEEP_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "agrp/experiment.hpp"

namespace agrp {

// Effective variant for one sweep cell: grouped cells keep the base
// variant, K = 1 cells drop grouping and the regularizer.
Variant sweep_cell_variant(Variant base, int group_size);

struct SweepOutcome {
  std::filesystem::path csv_path;
  int completed = 0;                  // cells trained by this invocation
  int skipped = 0;                    // rows already present
  std::vector<std::string> failures;  // diverged cells, human-readable
};

// Trains the (noise_level x group_size x seed) grid of config.sweep over
// freshly generated synthetic datasets and appends one CSV row per cell:
//   noise_level,group_size,seed,variant,accuracy,map
// Existing rows are never recomputed, so interrupted sweeps resume. Cells
// run on up to AGRP_THREADS worker threads (default 1). Diverged cells are
// reported in the outcome instead of aborting the grid.
SweepOutcome run_sweep(const ExperimentConfig& config);

}  // namespace agrp

#endif  // AGRP_SWEEP_HPP_
