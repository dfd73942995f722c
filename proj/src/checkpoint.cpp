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

#include "agrp/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace agrp {

namespace {

constexpr char kMagic[4] = {'A', 'G', 'R', 'P'};

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<char>((v >> s) & 0xFF));
}

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<char>((v >> s) & 0xFF));
}

void put_f64_le(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64_le(out, bits);
}

std::uint32_t get_u32_le(const std::string& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw FormatError("checkpoint truncated");
  std::uint32_t v = 0;
  for (int s = 0; s < 32; s += 8) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos++])) << s;
  }
  return v;
}

std::uint64_t get_u64_le(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw FormatError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int s = 0; s < 64; s += 8) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos++])) << s;
  }
  return v;
}

double get_f64_le(const std::string& in, std::size_t& pos) {
  const std::uint64_t bits = get_u64_le(in, pos);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

void put_tensor(std::string& out, const std::string& name, const Tensor& t) {
  put_u32_le(out, static_cast<std::uint32_t>(name.size()));
  out.append(name);
  put_u32_le(out, static_cast<std::uint32_t>(t.rank()));
  for (int axis = 0; axis < t.rank(); ++axis) {
    put_u32_le(out, static_cast<std::uint32_t>(t.dim(axis)));
  }
  for (double v : t.values()) put_f64_le(out, v);
}

// Save order fixes the byte layout: blocks, attention, classifier.
std::vector<std::pair<std::string, const Tensor*>> tensor_table(const ModelState& model,
                                                                const Tensor& attention_b) {
  std::vector<std::pair<std::string, const Tensor*>> table;
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    table.emplace_back("block" + std::to_string(i) + ".kernels", &model.blocks[i].kernels);
    table.emplace_back("block" + std::to_string(i) + ".bias", &model.blocks[i].bias);
  }
  table.emplace_back("attention.w", &model.attention.w);
  table.emplace_back("attention.b", &attention_b);
  table.emplace_back("classifier.weight", &model.classifier_weight);
  table.emplace_back("classifier.bias", &model.classifier_bias);
  return table;
}

}  // namespace

void save_checkpoint(const ModelState& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["class_count"] = model.class_count;
  j["input_side"] = model.input_side;
  j["input_channels"] = model.input_channels;
  j["step"] = model.step;
  j["train"] = nlohmann::json::parse(train_config_to_json_text(model.config));
  const std::string config_blob = j.dump();

  std::string out;
  out.append(kMagic, 4);
  put_u32_le(out, kCheckpointVersion);
  put_u64_le(out, config_blob.size());
  out.append(config_blob);

  const Tensor attention_b({1}, {model.attention.b});
  const auto table = tensor_table(model, attention_b);
  put_u32_le(out, static_cast<std::uint32_t>(table.size()));
  for (const auto& [name, tensor] : table) put_tensor(out, name, *tensor);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

ModelState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0) {
    throw FormatError("bad checkpoint magic in " + path.string());
  }
  std::size_t pos = 4;
  const std::uint32_t version = get_u32_le(data, pos);
  if (version != kCheckpointVersion) {
    throw FormatError("unknown checkpoint version " + std::to_string(version));
  }
  const std::uint64_t blob_len = get_u64_le(data, pos);
  if (pos + blob_len > data.size()) throw FormatError("checkpoint truncated in config blob");
  const std::string blob = data.substr(pos, blob_len);
  pos += blob_len;

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(blob);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("checkpoint config blob is not valid JSON: " + std::string(e.what()));
  }

  ModelState model;
  try {
    model.class_count = j.at("class_count").get<int>();
    model.input_side = j.at("input_side").get<int>();
    model.input_channels = j.at("input_channels").get<int>();
    model.step = j.at("step").get<long>();
    model.config = train_config_from_json_text(j.at("train").dump());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint config blob malformed: " + std::string(e.what()));
  }

  const std::uint32_t count = get_u32_le(data, pos);
  std::map<std::string, Tensor> tensors;
  for (std::uint32_t n = 0; n < count; ++n) {
    const std::uint32_t name_len = get_u32_le(data, pos);
    if (pos + name_len > data.size()) throw FormatError("checkpoint truncated in tensor name");
    std::string name = data.substr(pos, name_len);
    pos += name_len;
    const std::uint32_t rank = get_u32_le(data, pos);
    if (rank > 8) throw FormatError("checkpoint tensor rank " + std::to_string(rank));
    std::vector<int> shape(rank);
    for (std::uint32_t axis = 0; axis < rank; ++axis) {
      shape[axis] = static_cast<int>(get_u32_le(data, pos));
    }
    Tensor t(shape);
    for (double& v : t.values()) v = get_f64_le(data, pos);
    if (!tensors.emplace(std::move(name), std::move(t)).second) {
      throw FormatError("checkpoint repeats a tensor name");
    }
  }
  if (pos != data.size()) throw FormatError("trailing bytes after checkpoint tensor table");

  auto take = [&](const std::string& name, const std::vector<int>& shape) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw FormatError("checkpoint is missing tensor '" + name + "'");
    if (it->second.shape() != shape) {
      throw FormatError("checkpoint tensor '" + name + "' has unexpected shape");
    }
    Tensor t = std::move(it->second);
    tensors.erase(it);
    return t;
  };

  int cin = model.input_channels;
  for (std::size_t i = 0; i < model.config.extractor.block_channels.size(); ++i) {
    const int cout = model.config.extractor.block_channels[i];
    ConvBlockParams block;
    block.kernels = take("block" + std::to_string(i) + ".kernels", {3, 3, cin, cout});
    block.bias = take("block" + std::to_string(i) + ".bias", {cout});
    model.blocks.push_back(std::move(block));
    cin = cout;
  }
  model.attention.w = take("attention.w", {cin});
  model.attention.b = take("attention.b", {1})[0];
  model.classifier_weight = take("classifier.weight", {model.class_count, cin});
  model.classifier_bias = take("classifier.bias", {model.class_count});
  if (!tensors.empty()) {
    throw FormatError("checkpoint holds unexpected tensor '" + tensors.begin()->first + "'");
  }
  return model;
}

}  // namespace agrp
