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

#include "agrp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "agrp/evaluator.hpp"
#include "agrp/rng.hpp"
#include "agrp/trainer.hpp"

namespace agrp {

Variant sweep_cell_variant(Variant base, int group_size) {
  if (!variant_is_grouped(base)) {
    throw ConfigError(std::string("sweep requires a grouped base variant, got ") +
                      variant_name(base));
  }
  if (group_size >= 2) return base;
  switch (base) {
    case Variant::kRGT: return Variant::kAP;
    case Variant::kRGTAT: return Variant::kAPAT;
    // Footnote rule: no regularizer on ungrouped instances.
    case Variant::kRGTATR: return Variant::kAPAT;
    default: break;
  }
  throw ConfigError("sweep_cell_variant: unreachable");
}

namespace {

constexpr char kHeader[] = "noise_level,group_size,seed,variant,accuracy,map";

struct Cell {
  double noise_level = 0.0;
  int group_size = 0;
  std::uint64_t seed = 0;
  Variant variant = Variant::kAP;
};

std::string cell_key(const Cell& cell) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.10g,%d,%llu,%s", cell.noise_level, cell.group_size,
                static_cast<unsigned long long>(cell.seed), variant_name(cell.variant));
  return buf;
}

std::set<std::string> existing_keys(const std::filesystem::path& csv) {
  std::set<std::string> keys;
  std::ifstream in(csv);
  if (!in) return keys;
  std::string line;
  if (!std::getline(in, line)) return keys;
  if (line != kHeader) {
    throw FormatError("sweep results file " + csv.string() + " has unexpected schema");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // Key = the first four fields.
    int commas = 0;
    std::size_t cut = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == ',' && ++commas == 4) {
        cut = i;
        break;
      }
    }
    if (commas < 4) {
      throw FormatError("sweep results file " + csv.string() + " holds a malformed row");
    }
    keys.insert(line.substr(0, cut));
  }
  return keys;
}

int worker_count(std::size_t tasks) {
  int threads = 1;
  if (const char* env = std::getenv("AGRP_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || parsed < 1 || parsed > 1024) {
      throw ConfigError("AGRP_THREADS must be an integer in [1,1024]");
    }
    threads = static_cast<int>(parsed);
  }
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads),
                                                std::max<std::size_t>(tasks, 1)));
}

}  // namespace

SweepOutcome run_sweep(const ExperimentConfig& config) {
  if (config.dataset.source != DatasetSpec::Source::kSynthetic) {
    throw ConfigError("sweep varies the noise level, so the dataset source must be synthetic");
  }
  if (config.sweep.group_sizes.empty() || config.sweep.noise_levels.empty() ||
      config.sweep.seeds.empty()) {
    throw ConfigError("sweep axes must be nonempty");
  }
  for (double xi : config.sweep.noise_levels) {
    if (xi < 0.0 || xi >= 1.0) throw ConfigError("sweep noise levels must lie in [0,1)");
  }

  // Validate the grid up front so a bad axis fails before hours of training.
  std::vector<Cell> grid;
  for (double xi : config.sweep.noise_levels) {
    for (int k : config.sweep.group_sizes) {
      const Variant variant = sweep_cell_variant(config.train.variant, k);
      for (std::uint64_t seed : config.sweep.seeds) {
        Cell cell;
        cell.noise_level = xi;
        cell.group_size = k;
        cell.seed = seed;
        cell.variant = variant;
        TrainConfig tc = config.train;
        tc.variant = variant;
        tc.group_size = k;
        tc.seed = seed;
        tc.normalized().validate();
        grid.push_back(cell);
      }
    }
  }

  std::filesystem::create_directories(config.output_dir);
  SweepOutcome outcome;
  outcome.csv_path = config.output_dir / "sweep_results.csv";

  const std::set<std::string> done = existing_keys(outcome.csv_path);
  if (done.empty() && !std::filesystem::exists(outcome.csv_path)) {
    std::ofstream out(outcome.csv_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + outcome.csv_path.string());
    out << kHeader << "\n";
  }

  std::vector<Cell> pending;
  for (const Cell& cell : grid) {
    if (done.count(cell_key(cell)) > 0) {
      ++outcome.skipped;
    } else {
      pending.push_back(cell);
    }
  }

  std::mutex io_mutex;
  std::atomic<std::size_t> next{0};
  const int workers = worker_count(pending.size());

  auto run_cells = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      const Cell& cell = pending[i];
      try {
        const SyntheticSpec& s = config.dataset.synthetic;
        const NoisyDataset ds = gen_synthetic(s.classes, s.per_class, s.image_side,
                                              cell.noise_level, mix_seed(s.seed, cell.seed));
        TrainConfig tc = config.train;
        tc.variant = cell.variant;
        tc.group_size = cell.group_size;
        tc.seed = cell.seed;
        tc = tc.normalized();
        auto [model, history] = train(tc, ds);
        const double acc = accuracy(model, ds.test);
        const double map = rerank(model, ds).mean_average_precision;

        char row[256];
        std::snprintf(row, sizeof(row), "%s,%.17g,%.17g\n", cell_key(cell).c_str(), acc, map);
        const std::lock_guard<std::mutex> lock(io_mutex);
        std::ofstream out(outcome.csv_path, std::ios::app);
        if (!out) throw IoError("cannot append to " + outcome.csv_path.string());
        out << row << std::flush;
        ++outcome.completed;
      } catch (const DivergenceError& e) {
        const std::lock_guard<std::mutex> lock(io_mutex);
        outcome.failures.push_back(cell_key(cell) + ": " + e.what());
      }
    }
  };

  if (workers <= 1) {
    run_cells();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_cells);
    for (std::thread& t : pool) t.join();
  }
  return outcome;
}

}  // namespace agrp
