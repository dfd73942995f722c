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

#include "agrp/idx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>

#include "agrp/errors.hpp"

namespace agrp {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::uint32_t get_u32_be(const std::string& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw FormatError("idx file truncated in header");
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) {
    v = (v << 8) | static_cast<unsigned char>(in[pos++]);
  }
  return v;
}

void put_u32_be(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>(v & 0xFF));
}

}  // namespace

std::vector<Tensor> load_idx_images(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  const std::uint32_t magic = get_u32_be(data, pos);
  if (magic != kImagesMagic) {
    throw FormatError("bad idx image magic in " + path.string());
  }
  const std::uint32_t count = get_u32_be(data, pos);
  const std::uint32_t rows = get_u32_be(data, pos);
  const std::uint32_t cols = get_u32_be(data, pos);
  if (count == 0) throw FormatError("idx image file holds zero items");
  if (rows == 0 || cols == 0) throw FormatError("idx image dimensions must be positive");
  const std::size_t need = static_cast<std::size_t>(count) * rows * cols;
  if (data.size() - pos != need) {
    throw FormatError("idx image payload is " + std::to_string(data.size() - pos) +
                      " bytes, expected " + std::to_string(need));
  }
  std::vector<Tensor> out;
  out.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    Tensor t({static_cast<int>(rows), static_cast<int>(cols), 1});
    for (double& v : t.values()) {
      v = static_cast<unsigned char>(data[pos++]) / 255.0;
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<int> load_idx_labels(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  const std::uint32_t magic = get_u32_be(data, pos);
  if (magic != kLabelsMagic) {
    throw FormatError("bad idx label magic in " + path.string());
  }
  const std::uint32_t count = get_u32_be(data, pos);
  if (count == 0) throw FormatError("idx label file holds zero items");
  if (data.size() - pos != count) {
    throw FormatError("idx label payload is " + std::to_string(data.size() - pos) +
                      " bytes, expected " + std::to_string(count));
  }
  std::vector<int> out(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    out[n] = static_cast<unsigned char>(data[pos++]);
  }
  return out;
}

void write_idx_images(const std::filesystem::path& path, const std::vector<Tensor>& images) {
  if (images.empty()) throw DomainError("write_idx_images: empty image list");
  const Tensor& first = images.front();
  if (first.rank() != 3 || first.dim(2) != 1) {
    throw DimensionError("write_idx_images: images must be h x w x 1");
  }
  const int rows = first.dim(0);
  const int cols = first.dim(1);
  std::string out;
  put_u32_be(out, kImagesMagic);
  put_u32_be(out, static_cast<std::uint32_t>(images.size()));
  put_u32_be(out, static_cast<std::uint32_t>(rows));
  put_u32_be(out, static_cast<std::uint32_t>(cols));
  for (const Tensor& im : images) {
    if (im.rank() != 3 || im.dim(0) != rows || im.dim(1) != cols || im.dim(2) != 1) {
      throw DimensionError("write_idx_images: all images must share dimensions");
    }
    for (double v : im.values()) {
      const double c = std::clamp(v, 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  if (labels.empty()) throw DomainError("write_idx_labels: empty label list");
  std::string out;
  put_u32_be(out, kLabelsMagic);
  put_u32_be(out, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) {
    if (l < 0 || l > 255) throw DomainError("write_idx_labels: label out of byte range");
    out.push_back(static_cast<char>(static_cast<unsigned char>(l)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

std::vector<LabeledImage> load_idx(const std::filesystem::path& images_path,
                                   const std::filesystem::path& labels_path) {
  std::vector<Tensor> images = load_idx_images(images_path);
  std::vector<int> labels = load_idx_labels(labels_path);
  if (images.size() != labels.size()) {
    throw FormatError("idx count mismatch: " + std::to_string(images.size()) + " images vs " +
                      std::to_string(labels.size()) + " labels");
  }
  std::vector<LabeledImage> out(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    out[i].id = static_cast<int>(i);
    out[i].pixels = std::move(images[i]);
    out[i].given_label = labels[i];
    out[i].truth = Truth::kCorrect;
    out[i].true_label = labels[i];
  }
  return out;
}

}  // namespace agrp
