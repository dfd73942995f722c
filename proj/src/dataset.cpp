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

#include "agrp/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <utility>

#include <json.hpp>

#include "agrp/rng.hpp"

namespace agrp {

namespace {
constexpr int kSignatureSide = 3;
// Five-bright-pixel masks sharing s pixels sit at distance 0.85*sqrt(2*(5-s)).
// Ring pairs (class c and its cross-category partner c+1) are pinned to s = 2
// so the wrong-signature images stay visually separable from the class that
// borrows their label; the remaining pairs are pinned to s = 3 so the classes
// are fine-grained and mislabeled gradients eat into real decision margins.
constexpr double kSignatureMinDistance = 1.5;
constexpr double kSignatureMaxDistance = 2.1;
constexpr double kSignatureRingMinDistance = 1.9;
constexpr int kSignatureMaxDraws = 1000;
constexpr int kSignatureMaxRestarts = 200;
// Signatures are binary on/off masks brighter than the background so the
// class evidence is localized in the box and survives pooling; a fixed
// bright-pixel count keeps overall patch brightness class-independent.
constexpr double kSignatureLo = 0.1;
constexpr double kSignatureHi = 0.95;
constexpr int kSignatureBrightPixels = 5;
constexpr double kBackgroundAmplitude = 0.4;
}  // namespace

const char* truth_name(Truth t) {
  switch (t) {
    case Truth::kCorrect: return "correct";
    case Truth::kCrossDomain: return "cross_domain";
    case Truth::kCrossCategory: return "cross_category";
  }
  throw DomainError("truth_name: bad enum value");
}

Truth truth_from_name(const std::string& name) {
  if (name == "correct") return Truth::kCorrect;
  if (name == "cross_domain") return Truth::kCrossDomain;
  if (name == "cross_category") return Truth::kCrossCategory;
  throw FormatError("unknown truth flag '" + name + "'");
}

void validate_dataset(const NoisyDataset& ds) {
  auto check_image = [&](const LabeledImage& im, const char* split) {
    switch (im.truth) {
      case Truth::kCorrect:
        if (im.true_label != im.given_label) {
          throw StateError(std::string(split) + ": correct image " + std::to_string(im.id) +
                           " has true_label != given_label");
        }
        break;
      case Truth::kCrossCategory:
        if (im.true_label == im.given_label || im.true_label < 0 ||
            im.true_label >= ds.class_count) {
          throw StateError(std::string(split) + ": cross-category image " +
                           std::to_string(im.id) + " has inconsistent true_label");
        }
        break;
      case Truth::kCrossDomain:
        if (im.true_label != -1) {
          throw StateError(std::string(split) + ": cross-domain image " +
                           std::to_string(im.id) + " must have no true_label");
        }
        break;
    }
  };
  for (const LabeledImage& im : ds.train) check_image(im, "train");
  for (const LabeledImage& im : ds.negatives) {
    if (im.truth != Truth::kCrossDomain) {
      throw StateError("negatives: image " + std::to_string(im.id) + " is not cross-domain");
    }
    check_image(im, "negatives");
  }
  for (const LabeledImage& im : ds.test) {
    if (im.truth != Truth::kCorrect) {
      throw StateError("test: image " + std::to_string(im.id) + " is not correct");
    }
    check_image(im, "test");
  }
  std::set<int> ids;
  for (const std::vector<LabeledImage>* split : {&ds.train, &ds.negatives, &ds.test}) {
    for (const LabeledImage& im : *split) {
      if (!ids.insert(im.id).second) {
        throw StateError("duplicate image id " + std::to_string(im.id));
      }
    }
  }
  if (!ds.train.empty()) {
    std::size_t noisy = 0;
    for (const LabeledImage& im : ds.train) noisy += im.truth != Truth::kCorrect ? 1 : 0;
    const double frac = static_cast<double>(noisy) / static_cast<double>(ds.train.size());
    if (std::abs(frac - ds.noise_level) > 1.0 / static_cast<double>(ds.train.size()) + 1e-12) {
      throw StateError("train noise fraction " + std::to_string(frac) +
                       " deviates from declared level " + std::to_string(ds.noise_level));
    }
  }
}

namespace {

Tensor draw_signature(Rng& rng) {
  Tensor sig({kSignatureSide, kSignatureSide});
  std::vector<std::size_t> order(sig.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  for (std::size_t i = 0; i < sig.size(); ++i) {
    sig[order[i]] = i < static_cast<std::size_t>(kSignatureBrightPixels) ? kSignatureHi
                                                                         : kSignatureLo;
  }
  return sig;
}

double patch_distance(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Tensor background(Rng& rng, int side) {
  Tensor img({side, side, 1});
  for (double& v : img.values()) v = kBackgroundAmplitude * rng.uniform();
  return img;
}

Box stamp_signature(Rng& rng, Tensor& img, const Tensor& sig) {
  const int side = img.dim(0);
  const int row = static_cast<int>(rng.index(static_cast<std::size_t>(side - kSignatureSide + 1)));
  const int col = static_cast<int>(rng.index(static_cast<std::size_t>(side - kSignatureSide + 1)));
  for (int i = 0; i < kSignatureSide; ++i) {
    for (int j = 0; j < kSignatureSide; ++j) {
      img.at(row + i, col + j, 0) = sig.at(i, j);
    }
  }
  return Box{row, col, kSignatureSide, kSignatureSide};
}

}  // namespace

NoisyDataset gen_synthetic(int classes, int per_class, int image_side, double xi,
                           std::uint64_t seed) {
  if (classes < 2) throw DomainError("gen_synthetic: need at least 2 classes");
  if (per_class < 2) throw DomainError("gen_synthetic: need at least 2 images per class");
  if (image_side < 12) throw DomainError("gen_synthetic: image_side must be >= 12");
  if (xi < 0.0 || xi >= 1.0) throw DomainError("gen_synthetic: noise level must lie in [0,1)");

  Rng rng(mix_seed(seed, 0));

  // Mutually distinct class signatures. Distance windows keep classes
  // confusable (fine-grained) but separable. Greedy per-class draws can back
  // a later class into an unsatisfiable corner, so a failed set is scrapped
  // and redrawn from scratch.
  std::vector<Tensor> signatures;
  signatures.reserve(static_cast<std::size_t>(classes));
  for (int restart = 0; restart < kSignatureMaxRestarts && signatures.empty(); ++restart) {
    for (int c = 0; c < classes; ++c) {
      bool accepted = false;
      for (int attempt = 0; attempt < kSignatureMaxDraws && !accepted; ++attempt) {
        Tensor cand = draw_signature(rng);
        accepted = true;
        for (int p = 0; p < static_cast<int>(signatures.size()); ++p) {
          const double dist = patch_distance(cand, signatures[static_cast<std::size_t>(p)]);
          // Class c receives the signature of c+1 (mod classes) as its
          // cross-category noise, so those pairs get the wider window; the
          // remaining pairs sit closer together.
          const bool ring = (p == c - 1) || (c == classes - 1 && p == 0);
          const double floor = ring ? kSignatureRingMinDistance : kSignatureMinDistance;
          const double ceil = ring ? kSignatureMaxDistance : kSignatureRingMinDistance;
          if (dist < floor || dist > ceil) {
            accepted = false;
            break;
          }
        }
        if (accepted) signatures.push_back(std::move(cand));
      }
      if (!accepted) {
        signatures.clear();
        break;
      }
    }
  }
  if (signatures.empty()) {
    throw GenerationError("gen_synthetic: could not draw a distinct signature set in " +
                          std::to_string(kSignatureMaxRestarts) + " restarts");
  }

  NoisyDataset ds;
  ds.class_count = classes;
  ds.noise_level = xi;

  int next_id = 0;
  const long noisy_per_class = std::lround(xi * per_class);
  const long cross_category = noisy_per_class / 2;
  const long cross_domain = noisy_per_class - cross_category;
  const long correct = per_class - noisy_per_class;

  for (int c = 0; c < classes; ++c) {
    for (long n = 0; n < correct; ++n) {
      LabeledImage im;
      im.id = next_id++;
      im.pixels = background(rng, image_side);
      im.signature_box = stamp_signature(rng, im.pixels, signatures[static_cast<std::size_t>(c)]);
      im.given_label = c;
      im.truth = Truth::kCorrect;
      im.true_label = c;
      ds.train.push_back(std::move(im));
    }
    for (long n = 0; n < cross_category; ++n) {
      // Wrong class's signature under this class's label. The wrong class is
      // fixed per class so the confusion pressure is systematic rather than
      // averaged away over draws.
      const int other = (c + 1) % classes;
      LabeledImage im;
      im.id = next_id++;
      im.pixels = background(rng, image_side);
      im.signature_box =
          stamp_signature(rng, im.pixels, signatures[static_cast<std::size_t>(other)]);
      im.given_label = c;
      im.truth = Truth::kCrossCategory;
      im.true_label = other;
      ds.train.push_back(std::move(im));
    }
    for (long n = 0; n < cross_domain; ++n) {
      LabeledImage im;
      im.id = next_id++;
      im.pixels = background(rng, image_side);
      im.given_label = c;
      im.truth = Truth::kCrossDomain;
      im.true_label = -1;
      ds.train.push_back(std::move(im));
    }
  }

  for (int n = 0; n < per_class; ++n) {
    LabeledImage im;
    im.id = next_id++;
    im.pixels = background(rng, image_side);
    im.given_label = -1;
    im.truth = Truth::kCrossDomain;
    im.true_label = -1;
    ds.negatives.push_back(std::move(im));
  }

  const int test_per_class = per_class / 2;
  for (int c = 0; c < classes; ++c) {
    for (int n = 0; n < test_per_class; ++n) {
      LabeledImage im;
      im.id = next_id++;
      im.pixels = background(rng, image_side);
      im.signature_box = stamp_signature(rng, im.pixels, signatures[static_cast<std::size_t>(c)]);
      im.given_label = c;
      im.truth = Truth::kCorrect;
      im.true_label = c;
      ds.test.push_back(std::move(im));
    }
  }
  return ds;
}

NoisyDataset inject_noise(const std::vector<LabeledImage>& clean, double xi,
                          const std::vector<LabeledImage>& distractors, std::uint64_t seed) {
  if (xi < 0.0 || xi >= 1.0) throw DomainError("inject_noise: noise level must lie in [0,1)");
  if (clean.empty()) throw ConfigError("inject_noise: clean fragment is empty");

  int class_count = 0;
  std::set<int> clean_labels;
  for (const LabeledImage& im : clean) {
    if (im.given_label < 0) throw ConfigError("inject_noise: clean fragment has unlabeled image");
    clean_labels.insert(im.given_label);
    class_count = std::max(class_count, im.given_label + 1);
  }
  for (const LabeledImage& im : distractors) {
    if (im.given_label >= 0 && clean_labels.count(im.given_label) > 0) {
      throw ConfigError("inject_noise: distractor label " + std::to_string(im.given_label) +
                        " collides with a clean class");
    }
  }

  const std::size_t n = clean.size();
  const std::size_t noisy = static_cast<std::size_t>(xi * static_cast<double>(n));
  const std::size_t n_cross_category = noisy / 2;
  const std::size_t n_cross_domain = noisy - n_cross_category;
  if (n_cross_category > 0 && class_count < 2) {
    throw ConfigError("inject_noise: cross-category noise needs >= 2 clean classes");
  }
  if (n_cross_domain > 0 && distractors.empty()) {
    throw ConfigError("inject_noise: distractor pool is empty but xi > 0");
  }

  Rng rng(mix_seed(seed, 0));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  NoisyDataset ds;
  ds.class_count = class_count;
  ds.noise_level = static_cast<double>(noisy) / static_cast<double>(n);
  ds.train = clean;
  for (LabeledImage& im : ds.train) {
    im.truth = Truth::kCorrect;
    im.true_label = im.given_label;
  }

  // Distractors are consumed in shuffled order; leftovers form the negative pool.
  std::vector<std::size_t> pool(distractors.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  rng.shuffle(pool);
  std::size_t pool_cursor = 0;

  for (std::size_t i = 0; i < n_cross_category; ++i) {
    LabeledImage& im = ds.train[order[i]];
    int wrong = static_cast<int>(rng.index(static_cast<std::size_t>(class_count - 1)));
    if (wrong >= im.given_label) ++wrong;
    im.true_label = im.given_label;
    im.given_label = wrong;
    im.truth = Truth::kCrossCategory;
  }
  for (std::size_t i = 0; i < n_cross_domain; ++i) {
    LabeledImage& im = ds.train[order[n_cross_category + i]];
    if (pool_cursor == pool.size()) {
      rng.shuffle(pool);
      pool_cursor = 0;
    }
    im.pixels = distractors[pool[pool_cursor++]].pixels;
    im.truth = Truth::kCrossDomain;
    im.true_label = -1;
    im.signature_box.reset();
  }

  // Negative ids restart after the train ids so the dataset stays id-unique
  // even when both fragments were numbered from zero.
  int next_id = 0;
  for (const LabeledImage& im : ds.train) next_id = std::max(next_id, im.id + 1);
  for (std::size_t i = pool_cursor; i < pool.size(); ++i) {
    LabeledImage im = distractors[pool[i]];
    im.id = next_id++;
    im.given_label = -1;
    im.truth = Truth::kCrossDomain;
    im.true_label = -1;
    im.signature_box.reset();
    ds.negatives.push_back(std::move(im));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Serialization. Split files: "AGRT" magic, u32 version, u32 count, u32 h,
// u32 w, u32 c, then count*h*w*c float64 little-endian values.
// ---------------------------------------------------------------------------

namespace {

constexpr char kTensorMagic[4] = {'A', 'G', 'R', 'T'};
constexpr std::uint32_t kTensorVersion = 1;

void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_f64_le(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<char>((bits >> s) & 0xFF));
}

std::uint32_t get_u32_le(const std::string& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw IoError("tensor file truncated");
  std::uint32_t v = 0;
  for (int s = 0; s < 32; s += 8) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos++])) << s;
  }
  return v;
}

double get_f64_le(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw IoError("tensor file truncated");
  std::uint64_t bits = 0;
  for (int s = 0; s < 64; s += 8) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos++])) << s;
  }
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string encode_split(const std::vector<LabeledImage>& images) {
  std::string out;
  out.append(kTensorMagic, 4);
  put_u32_le(out, kTensorVersion);
  put_u32_le(out, static_cast<std::uint32_t>(images.size()));
  int h = 0, w = 0, c = 0;
  if (!images.empty()) {
    const Tensor& first = images.front().pixels;
    if (first.rank() != 3) throw StateError("split image is not rank-3");
    h = first.dim(0);
    w = first.dim(1);
    c = first.dim(2);
    for (const LabeledImage& im : images) {
      if (im.pixels.rank() != 3 || im.pixels.dim(0) != h || im.pixels.dim(1) != w ||
          im.pixels.dim(2) != c) {
        throw StateError("all images in a split must share dimensions for serialization");
      }
    }
  }
  put_u32_le(out, static_cast<std::uint32_t>(h));
  put_u32_le(out, static_cast<std::uint32_t>(w));
  put_u32_le(out, static_cast<std::uint32_t>(c));
  for (const LabeledImage& im : images) {
    for (double v : im.pixels.values()) put_f64_le(out, v);
  }
  return out;
}

std::vector<Tensor> decode_split(const std::string& data, std::size_t expect_count) {
  std::size_t pos = 0;
  if (data.size() < 4 || std::memcmp(data.data(), kTensorMagic, 4) != 0) {
    throw FormatError("bad tensor file magic");
  }
  pos = 4;
  const std::uint32_t version = get_u32_le(data, pos);
  if (version != kTensorVersion) {
    throw FormatError("unsupported tensor file version " + std::to_string(version));
  }
  const std::uint32_t count = get_u32_le(data, pos);
  if (count != expect_count) {
    throw FormatError("tensor file image count " + std::to_string(count) +
                      " does not match manifest count " + std::to_string(expect_count));
  }
  const int h = static_cast<int>(get_u32_le(data, pos));
  const int w = static_cast<int>(get_u32_le(data, pos));
  const int c = static_cast<int>(get_u32_le(data, pos));
  std::vector<Tensor> out;
  out.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    Tensor t({h, w, c});
    for (double& v : t.values()) v = get_f64_le(data, pos);
    out.push_back(std::move(t));
  }
  if (pos != data.size()) throw FormatError("trailing bytes in tensor file");
  return out;
}

nlohmann::json image_meta(const LabeledImage& im) {
  nlohmann::json j;
  j["id"] = im.id;
  j["given_label"] = im.given_label;
  j["truth"] = truth_name(im.truth);
  if (im.true_label >= 0) {
    j["true_label"] = im.true_label;
  } else {
    j["true_label"] = nullptr;
  }
  if (im.signature_box.has_value()) {
    const Box& b = *im.signature_box;
    j["box"] = {b.row, b.col, b.height, b.width};
  } else {
    j["box"] = nullptr;
  }
  return j;
}

void apply_image_meta(const nlohmann::json& j, LabeledImage& im) {
  im.id = j.at("id").get<int>();
  im.given_label = j.at("given_label").get<int>();
  im.truth = truth_from_name(j.at("truth").get<std::string>());
  im.true_label = j.at("true_label").is_null() ? -1 : j.at("true_label").get<int>();
  if (j.at("box").is_null()) {
    im.signature_box.reset();
  } else {
    const auto& b = j.at("box");
    im.signature_box = Box{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                           b.at(3).get<int>()};
  }
}

}  // namespace

void save_dataset(const NoisyDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["class_count"] = ds.class_count;
  manifest["noise_level"] = ds.noise_level;

  auto emit = [&](const char* name, const std::vector<LabeledImage>& split) {
    nlohmann::json meta;
    meta["file"] = std::string(name) + ".bin";
    meta["count"] = split.size();
    nlohmann::json images = nlohmann::json::array();
    for (const LabeledImage& im : split) images.push_back(image_meta(im));
    meta["images"] = std::move(images);
    manifest["splits"][name] = std::move(meta);
    write_file(dir / (std::string(name) + ".bin"), encode_split(split));
  };
  emit("train", ds.train);
  emit("negatives", ds.negatives);
  emit("test", ds.test);

  nlohmann::json counts;
  for (const char* split : {"train", "negatives", "test"}) {
    const std::vector<LabeledImage>& v =
        split == std::string("train") ? ds.train
                                      : (split == std::string("negatives") ? ds.negatives
                                                                           : ds.test);
    int correct = 0, cd = 0, cc = 0;
    for (const LabeledImage& im : v) {
      if (im.truth == Truth::kCorrect) ++correct;
      else if (im.truth == Truth::kCrossDomain) ++cd;
      else ++cc;
    }
    counts[split] = {{"correct", correct}, {"cross_domain", cd}, {"cross_category", cc}};
  }
  manifest["truth_counts"] = std::move(counts);

  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

NoisyDataset load_dataset(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("manifest.json parse error: " + std::string(e.what()));
  }
  if (manifest.at("format_version").get<int>() != 1) {
    throw FormatError("unsupported dataset format_version");
  }
  NoisyDataset ds;
  ds.class_count = manifest.at("class_count").get<int>();
  ds.noise_level = manifest.at("noise_level").get<double>();

  auto read_split = [&](const char* name, std::vector<LabeledImage>& out) {
    const nlohmann::json& meta = manifest.at("splits").at(name);
    const std::size_t count = meta.at("count").get<std::size_t>();
    std::vector<Tensor> pixels =
        decode_split(read_file(dir / meta.at("file").get<std::string>()), count);
    const nlohmann::json& images = meta.at("images");
    if (images.size() != count) throw FormatError("manifest image list length mismatch");
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      apply_image_meta(images[i], out[i]);
      out[i].pixels = std::move(pixels[i]);
    }
  };
  read_split("train", ds.train);
  read_split("negatives", ds.negatives);
  read_split("test", ds.test);
  return ds;
}

}  // namespace agrp
