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

#include "agrp/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

namespace agrp {

namespace {

Tensor pool_single(const ModelState& model, const Tensor& features) {
  const std::vector<Tensor> group{features};
  if (variant_has_attention(model.config.variant)) {
    return attention_forward(group, model.attention, model.config.epsilon).pooled;
  }
  return average_pool_forward(group);
}

}  // namespace

Tensor predict(const ModelState& model, const Tensor& image) {
  const ExtractorTrace trace = extractor_forward(model, image);
  const Tensor pooled = pool_single(model, trace.features);
  return linear_forward(model.classifier_weight, pooled, model.classifier_bias);
}

double accuracy(const ModelState& model, const std::vector<LabeledImage>& test_set) {
  if (test_set.empty()) throw DomainError("accuracy: empty test set");
  long correct = 0;
  for (const LabeledImage& im : test_set) {
    const Tensor logits = predict(model, im.pixels);
    int best = 0;
    for (int c = 1; c < logits.dim(0); ++c) {
      if (logits[static_cast<std::size_t>(c)] > logits[static_cast<std::size_t>(best)]) best = c;
    }
    correct += best == im.true_label ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

RankingResult rerank(const ModelState& model, const NoisyDataset& dataset) {
  if (dataset.train.empty()) throw DomainError("rerank: empty train set");
  RankingResult result;
  result.classes.resize(static_cast<std::size_t>(dataset.class_count));
  for (int c = 0; c < dataset.class_count; ++c) {
    result.classes[static_cast<std::size_t>(c)].class_index = c;
  }

  for (const LabeledImage& im : dataset.train) {
    if (im.given_label < 0 || im.given_label >= dataset.class_count) {
      throw StateError("rerank: train image " + std::to_string(im.id) +
                       " has out-of-range label");
    }
    const Tensor logits = predict(model, im.pixels);
    RankEntry entry;
    entry.image_id = im.id;
    entry.score = logits[static_cast<std::size_t>(im.given_label)];
    entry.positive = im.truth == Truth::kCorrect;
    result.classes[static_cast<std::size_t>(im.given_label)].entries.push_back(entry);
  }

  double ap_sum = 0.0;
  int ranked = 0;
  for (ClassRanking& cls : result.classes) {
    std::sort(cls.entries.begin(), cls.entries.end(), [](const RankEntry& a, const RankEntry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.image_id < b.image_id;
    });
    for (const RankEntry& e : cls.entries) cls.positive_count += e.positive ? 1 : 0;
    if (cls.positive_count == 0) {
      ++result.skipped_classes;
      continue;
    }
    int seen_positive = 0;
    double precision_sum = 0.0;
    for (std::size_t r = 0; r < cls.entries.size(); ++r) {
      if (!cls.entries[r].positive) continue;
      ++seen_positive;
      precision_sum += static_cast<double>(seen_positive) / static_cast<double>(r + 1);
    }
    cls.average_precision = precision_sum / cls.positive_count;
    ap_sum += cls.average_precision;
    ++ranked;
  }
  result.mean_average_precision = ranked > 0 ? ap_sum / ranked : 0.0;
  return result;
}

void write_ranking_csv(const RankingResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "class,rank,image_id,score,truth\n";
  char line[160];
  for (const ClassRanking& cls : result.classes) {
    for (std::size_t r = 0; r < cls.entries.size(); ++r) {
      const RankEntry& e = cls.entries[r];
      std::snprintf(line, sizeof(line), "%d,%zu,%d,%.17g,%d\n", cls.class_index, r + 1,
                    e.image_id, e.score, e.positive ? 1 : -1);
      out << line;
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_ranking_summary_csv(const RankingResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "class,positives,average_precision\n";
  char line[96];
  for (const ClassRanking& cls : result.classes) {
    if (cls.positive_count == 0) continue;
    std::snprintf(line, sizeof(line), "%d,%d,%.17g\n", cls.class_index, cls.positive_count,
                  cls.average_precision);
    out << line;
  }
  std::snprintf(line, sizeof(line), "map,,%.17g\n", result.mean_average_precision);
  out << line;
  if (!out) throw IoError("write failed for " + path.string());
}

Tensor attention_map(const ModelState& model, const Tensor& image) {
  if (!variant_has_attention(model.config.variant)) {
    throw CapabilityError(std::string("attention_map: variant ") +
                          variant_name(model.config.variant) + " has no attention detector");
  }
  const ExtractorTrace trace = extractor_forward(model, image);
  const AttentionTrace att =
      attention_forward({trace.features}, model.attention, model.config.epsilon);
  const int d = att.normalized.dim(1);
  Tensor map({d, d});
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) map.at(i, j) = att.normalized.at(0, i, j);
  }
  return map;
}

Tensor attention_heatmap(const ModelState& model, const Tensor& image) {
  Tensor map = attention_map(model, image);
  double lo = map[0], hi = map[0];
  for (double v : map.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) {
    for (double& v : map.values()) v = 0.0;
    return map;
  }
  for (double& v : map.values()) v = (v - lo) / (hi - lo);
  return map;
}

void write_pgm(const Tensor& map01, const std::filesystem::path& path) {
  if (map01.rank() != 2) throw DimensionError("write_pgm: map must be rank 2");
  std::string out = "P5\n" + std::to_string(map01.dim(1)) + " " + std::to_string(map01.dim(0)) +
                    "\n255\n";
  for (double v : map01.values()) {
    if (v < 0.0 || v > 1.0 || !std::isfinite(v)) {
      throw DomainError("write_pgm: values must lie in [0,1]");
    }
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

Tensor read_pgm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  // Header: "P5", width, height, maxval, single whitespace, then raw bytes.
  std::size_t pos = 0;
  auto next_token = [&]() {
    while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (start == pos) throw FormatError("pgm header truncated");
    return data.substr(start, pos - start);
  };
  if (next_token() != "P5") throw FormatError("not a binary PGM (P5) file");
  const int width = std::stoi(next_token());
  const int height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (width < 1 || height < 1) throw FormatError("pgm dimensions must be positive");
  if (maxval != 255) throw FormatError("pgm maxval must be 255");
  ++pos;  // the single whitespace byte after maxval
  const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (data.size() - pos != need) {
    throw FormatError("pgm payload is " + std::to_string(data.size() - pos) +
                      " bytes, expected " + std::to_string(need));
  }
  Tensor map({height, width});
  for (double& v : map.values()) v = static_cast<unsigned char>(data[pos++]);
  return map;
}

namespace {

// Counts feature cells of one axis range whose receptive-field center lies
// inside [lo, lo + extent).
int centers_in_range(const ModelState& model, int d, int lo, int extent) {
  int count = 0;
  for (int q = 0; q < d; ++q) {
    const double center = receptive_field_center(model, q);
    if (center >= lo && center < lo + extent) ++count;
  }
  return count;
}

double box_mass(const ModelState& model, const Tensor& map, const Box& box) {
  double mass = 0.0;
  for (int i = 0; i < map.dim(0); ++i) {
    const double rc = receptive_field_center(model, i);
    if (rc < box.row || rc >= box.row + box.height) continue;
    for (int j = 0; j < map.dim(1); ++j) {
      const double cc = receptive_field_center(model, j);
      if (cc >= box.col && cc < box.col + box.width) mass += map.at(i, j);
    }
  }
  return mass;
}

}  // namespace

double localization_score(const ModelState& model, const std::vector<LabeledImage>& images) {
  if (images.empty()) throw DomainError("localization_score: empty image list");
  double sum = 0.0;
  for (const LabeledImage& im : images) {
    if (!im.signature_box.has_value()) {
      throw DomainError("localization_score: image " + std::to_string(im.id) +
                        " carries no signature box");
    }
    sum += box_mass(model, attention_map(model, im.pixels), *im.signature_box);
  }
  return sum / static_cast<double>(images.size());
}

double localization_uniform_baseline(const ModelState& model,
                                     const std::vector<LabeledImage>& images) {
  if (images.empty()) throw DomainError("localization_uniform_baseline: empty image list");
  const int d = feature_side(model);
  double sum = 0.0;
  for (const LabeledImage& im : images) {
    if (!im.signature_box.has_value()) {
      throw DomainError("localization_uniform_baseline: image " + std::to_string(im.id) +
                        " carries no signature box");
    }
    const Box& box = *im.signature_box;
    const int rows = centers_in_range(model, d, box.row, box.height);
    const int cols = centers_in_range(model, d, box.col, box.width);
    sum += static_cast<double>(rows * cols) / static_cast<double>(d * d);
  }
  return sum / static_cast<double>(images.size());
}

}  // namespace agrp
