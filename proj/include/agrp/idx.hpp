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

#ifndef AGRP_IDX_HPP_
#define AGRP_IDX_HPP_

#include <filesystem>
#include <vector>

#include "agrp/dataset.hpp"
#include "agrp/tensor.hpp"

namespace agrp {

// IDX images (magic 0x00000803, big-endian dims, unsigned bytes). Pixels are
// scaled to [0,1] by dividing by 255; each output tensor is h x w x 1.
std::vector<Tensor> load_idx_images(const std::filesystem::path& path);

// IDX labels (magic 0x00000801), one unsigned byte per item.
std::vector<int> load_idx_labels(const std::filesystem::path& path);

// Inverse of the loaders; values are clamped to [0,1] then quantized to
// round(v*255). Used by tests and the dataset export path.
void write_idx_images(const std::filesystem::path& path, const std::vector<Tensor>& images);
void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels);

// Pairs the two files into a clean fragment (truth = correct, sequential
// ids). Image and label counts must agree.
std::vector<LabeledImage> load_idx(const std::filesystem::path& images_path,
                                   const std::filesystem::path& labels_path);

}  // namespace agrp

#endif  // AGRP_IDX_HPP_
