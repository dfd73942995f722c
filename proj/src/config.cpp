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

#include "agrp/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "agrp/errors.hpp"
#include "agrp/grouping.hpp"

namespace agrp {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kAP: return "AP";
    case Variant::kRGT: return "RGT";
    case Variant::kAPAT: return "AP_AT";
    case Variant::kRGTAT: return "RGT_AT";
    case Variant::kAPATR: return "AP_AT_R";
    case Variant::kRGTATR: return "RGT_AT_R";
  }
  throw DomainError("variant_name: bad enum value");
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : all_variants()) {
    if (name == variant_name(v)) return v;
  }
  throw ConfigError("unknown variant '" + name +
                    "' (expected AP, RGT, AP_AT, RGT_AT, AP_AT_R, or RGT_AT_R)");
}

bool variant_is_grouped(Variant v) {
  return v == Variant::kRGT || v == Variant::kRGTAT || v == Variant::kRGTATR;
}

bool variant_has_attention(Variant v) {
  return v == Variant::kAPAT || v == Variant::kRGTAT || v == Variant::kAPATR ||
         v == Variant::kRGTATR;
}

bool variant_has_regularizer(Variant v) {
  return v == Variant::kAPATR || v == Variant::kRGTATR;
}

std::vector<Variant> all_variants() {
  return {Variant::kAP,    Variant::kRGT,   Variant::kAPAT,
          Variant::kRGTAT, Variant::kAPATR, Variant::kRGTATR};
}

TrainConfig TrainConfig::normalized() const {
  TrainConfig c = *this;
  if (!variant_is_grouped(c.variant)) c.group_size = 1;
  if (!variant_has_regularizer(c.variant)) c.negatives_per_epoch = 0;
  return c;
}

void TrainConfig::validate() const {
  if (variant_is_grouped(variant)) {
    if (group_size < 2 || group_size > kMaxGroupSize) {
      throw ConfigError(std::string("group_size must lie in [2,") +
                        std::to_string(kMaxGroupSize) + "] for " + variant_name(variant));
    }
  } else if (group_size != 1) {
    throw ConfigError(std::string(variant_name(variant)) + " trains on single images (K=1)");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be >= 0");
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) throw ConfigError("lr0 must be > 0");
  if (lr_drop_epoch < 1) throw ConfigError("lr_drop_epoch must be >= 1");
  if (!(lr_drop_factor > 0.0 && lr_drop_factor <= 1.0)) {
    throw ConfigError("lr_drop_factor must lie in (0,1]");
  }
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_instances < 1) throw ConfigError("batch_instances must be >= 1");
  if (negatives_per_epoch < 0) throw ConfigError("negatives_per_epoch must be >= 0");
  if (negatives_per_epoch > 0 && !variant_has_regularizer(variant)) {
    throw ConfigError(std::string(variant_name(variant)) + " has no regularizer; "
                      "negatives_per_epoch must be 0");
  }
  for (int ch : extractor.block_channels) {
    if (ch < 1) throw ConfigError("extractor block channel counts must be >= 1");
  }
  if (extractor.block_channels.size() > 3) {
    throw ConfigError("extractor supports at most 3 blocks");
  }
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "variant",       "group_size", "lambda", "epsilon",         "lr0",
      "lr_drop_epoch", "lr_drop_factor", "epochs", "batch_instances",
      "negatives_per_epoch", "seed",   "extractor_blocks"};
  return keys;
}

}  // namespace

TrainConfig train_config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("train config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  for (const auto& item : j.items()) {
    if (known_keys().count(item.key()) == 0) {
      throw ConfigError("unknown train config key '" + item.key() + "'");
    }
  }
  TrainConfig c;
  try {
    if (j.contains("variant")) c.variant = variant_from_name(j["variant"].get<std::string>());
    if (j.contains("group_size")) c.group_size = j["group_size"].get<int>();
    if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("lr0")) c.lr0 = j["lr0"].get<double>();
    if (j.contains("lr_drop_epoch")) c.lr_drop_epoch = j["lr_drop_epoch"].get<int>();
    if (j.contains("lr_drop_factor")) c.lr_drop_factor = j["lr_drop_factor"].get<double>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
    if (j.contains("batch_instances")) c.batch_instances = j["batch_instances"].get<int>();
    if (j.contains("negatives_per_epoch")) {
      c.negatives_per_epoch = j["negatives_per_epoch"].get<int>();
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("extractor_blocks")) {
      c.extractor.block_channels = j["extractor_blocks"].get<std::vector<int>>();
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError("train config type error: " + std::string(e.what()));
  }
  return c;
}

std::string train_config_to_json_text(const TrainConfig& config) {
  nlohmann::json j;
  j["variant"] = variant_name(config.variant);
  j["group_size"] = config.group_size;
  j["lambda"] = config.lambda;
  j["epsilon"] = config.epsilon;
  j["lr0"] = config.lr0;
  j["lr_drop_epoch"] = config.lr_drop_epoch;
  j["lr_drop_factor"] = config.lr_drop_factor;
  j["epochs"] = config.epochs;
  j["batch_instances"] = config.batch_instances;
  j["negatives_per_epoch"] = config.negatives_per_epoch;
  j["seed"] = config.seed;
  j["extractor_blocks"] = config.extractor.block_channels;
  return j.dump(2);
}

double learning_rate_at(const TrainConfig& config, int epoch_index) {
  if (epoch_index < 0) throw DomainError("learning_rate_at: epoch_index must be >= 0");
  const int drops = epoch_index / config.lr_drop_epoch;
  return config.lr0 * std::pow(config.lr_drop_factor, static_cast<double>(drops));
}

}  // namespace agrp
