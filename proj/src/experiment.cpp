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

#include "agrp/experiment.hpp"

#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

#include "agrp/idx.hpp"

namespace agrp {

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    if (known.count(item.key()) == 0) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

DatasetSpec dataset_from_json(const nlohmann::json& j) {
  DatasetSpec spec;
  reject_unknown_keys(j,
                      {"source", "classes", "per_class", "image_side", "noise_level", "seed",
                       "path", "images", "labels", "distractor_images", "distractor_labels"},
                      "dataset");
  const std::string source = j.value("source", std::string("synthetic"));
  if (source == "synthetic") {
    spec.source = DatasetSpec::Source::kSynthetic;
    for (const char* key : {"path", "images", "labels", "distractor_images",
                            "distractor_labels"}) {
      if (j.contains(key)) {
        throw ConfigError(std::string("dataset key '") + key + "' is not valid for synthetic");
      }
    }
    if (j.contains("classes")) spec.synthetic.classes = j["classes"].get<int>();
    if (j.contains("per_class")) spec.synthetic.per_class = j["per_class"].get<int>();
    if (j.contains("image_side")) spec.synthetic.image_side = j["image_side"].get<int>();
    if (j.contains("noise_level")) spec.synthetic.noise_level = j["noise_level"].get<double>();
    if (j.contains("seed")) spec.synthetic.seed = j["seed"].get<std::uint64_t>();
  } else if (source == "dir") {
    spec.source = DatasetSpec::Source::kDir;
    if (!j.contains("path")) throw ConfigError("dataset source 'dir' needs 'path'");
    spec.dir = j["path"].get<std::string>();
  } else if (source == "idx") {
    spec.source = DatasetSpec::Source::kIdx;
    for (const char* key : {"images", "labels"}) {
      if (!j.contains(key)) {
        throw ConfigError(std::string("dataset source 'idx' needs '") + key + "'");
      }
    }
    spec.idx_images = j["images"].get<std::string>();
    spec.idx_labels = j["labels"].get<std::string>();
    if (j.contains("distractor_images")) {
      spec.idx_distractor_images = j["distractor_images"].get<std::string>();
    }
    if (j.contains("distractor_labels")) {
      spec.idx_distractor_labels = j["distractor_labels"].get<std::string>();
    }
    if (j.contains("noise_level")) spec.idx_noise_level = j["noise_level"].get<double>();
    if (j.contains("seed")) spec.idx_seed = j["seed"].get<std::uint64_t>();
  } else {
    throw ConfigError("dataset source must be synthetic, dir, or idx; got '" + source + "'");
  }
  return spec;
}

nlohmann::json dataset_to_json(const DatasetSpec& spec) {
  nlohmann::json j;
  switch (spec.source) {
    case DatasetSpec::Source::kSynthetic:
      j["source"] = "synthetic";
      j["classes"] = spec.synthetic.classes;
      j["per_class"] = spec.synthetic.per_class;
      j["image_side"] = spec.synthetic.image_side;
      j["noise_level"] = spec.synthetic.noise_level;
      j["seed"] = spec.synthetic.seed;
      break;
    case DatasetSpec::Source::kDir:
      j["source"] = "dir";
      j["path"] = spec.dir.string();
      break;
    case DatasetSpec::Source::kIdx:
      j["source"] = "idx";
      j["images"] = spec.idx_images.string();
      j["labels"] = spec.idx_labels.string();
      j["distractor_images"] = spec.idx_distractor_images.string();
      j["distractor_labels"] = spec.idx_distractor_labels.string();
      j["noise_level"] = spec.idx_noise_level;
      j["seed"] = spec.idx_seed;
      break;
  }
  return j;
}

SweepAxes sweep_from_json(const nlohmann::json& j) {
  SweepAxes axes;
  reject_unknown_keys(j, {"group_sizes", "noise_levels", "seeds"}, "sweep");
  if (j.contains("group_sizes")) axes.group_sizes = j["group_sizes"].get<std::vector<int>>();
  if (j.contains("noise_levels")) {
    axes.noise_levels = j["noise_levels"].get<std::vector<double>>();
  }
  if (j.contains("seeds")) axes.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  return axes;
}

}  // namespace

ExperimentConfig experiment_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("experiment config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  reject_unknown_keys(j, {"output_dir", "dataset", "train", "sweep"}, "experiment config");

  ExperimentConfig config;
  try {
    if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("dataset")) config.dataset = dataset_from_json(j["dataset"]);
    if (j.contains("train")) config.train = train_config_from_json_text(j["train"].dump());
    if (j.contains("sweep")) config.sweep = sweep_from_json(j["sweep"]);
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError("experiment config type error: " + std::string(e.what()));
  }
  return config;
}

std::string experiment_to_json_text(const ExperimentConfig& config) {
  nlohmann::json j;
  j["output_dir"] = config.output_dir.string();
  j["dataset"] = dataset_to_json(config.dataset);
  j["train"] = nlohmann::json::parse(train_config_to_json_text(config.train));
  j["sweep"]["group_sizes"] = config.sweep.group_sizes;
  j["sweep"]["noise_levels"] = config.sweep.noise_levels;
  j["sweep"]["seeds"] = config.sweep.seeds;
  return j.dump(2);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return experiment_from_json_text(text);
}

void echo_resolved_config(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path path = config.output_dir / "resolved_config.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << experiment_to_json_text(config) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

NoisyDataset materialize_dataset(const DatasetSpec& spec) {
  switch (spec.source) {
    case DatasetSpec::Source::kSynthetic: {
      const SyntheticSpec& s = spec.synthetic;
      NoisyDataset ds =
          gen_synthetic(s.classes, s.per_class, s.image_side, s.noise_level, s.seed);
      validate_dataset(ds);
      return ds;
    }
    case DatasetSpec::Source::kDir: {
      NoisyDataset ds = load_dataset(spec.dir);
      validate_dataset(ds);
      return ds;
    }
    case DatasetSpec::Source::kIdx: {
      const std::vector<LabeledImage> clean = load_idx(spec.idx_images, spec.idx_labels);
      std::vector<LabeledImage> distractors;
      if (!spec.idx_distractor_images.empty()) {
        distractors = load_idx(spec.idx_distractor_images, spec.idx_distractor_labels);
        // Distractor labels are outside the clean domain by definition.
        for (LabeledImage& im : distractors) im.given_label = -1;
      }
      NoisyDataset ds = inject_noise(clean, spec.idx_noise_level, distractors, spec.idx_seed);
      validate_dataset(ds);
      return ds;
    }
  }
  throw DomainError("materialize_dataset: bad source enum");
}

}  // namespace agrp
