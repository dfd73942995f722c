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

#ifndef AGRP_CHECKPOINT_HPP_
#define AGRP_CHECKPOINT_HPP_

#include <filesystem>

#include "agrp/model.hpp"

namespace agrp {

// Binary model file, all integers little-endian:
//   "AGRP" | u32 version | u64 json length | config JSON | u32 tensor count
//   | per tensor: u32 name length, name bytes, u32 rank, u32 dims[rank],
//     float64 values.
// Saving the result of a load reproduces the input byte for byte. Unknown
// versions are rejected.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const ModelState& model, const std::filesystem::path& path);
ModelState load_checkpoint(const std::filesystem::path& path);

}  // namespace agrp

#endif  // AGRP_CHECKPOINT_HPP_
