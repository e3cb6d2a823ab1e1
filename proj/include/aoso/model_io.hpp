// Copyright 2026 The AOSOBoost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AOSO_MODEL_IO_HPP_
#define AOSO_MODEL_IO_HPP_

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "aoso/booster.hpp"
#include "aoso/errors.hpp"
#include "aoso/tree.hpp"

// Model files are JSON documents:
//
//   {"format_version": 1, "algorithm": "aoso", "num_classes": K,
//    "num_features": D, "shrinkage": v, "leaves": J, "labels": [...],
//    "config": {...}, "training": {...}, "base_classes": [...],
//    "trees": [{"nodes": [...]}, ...]}
//
// Class ids (pair_r, pair_s, base_classes) are 1-based, pair_s = 0 marks a
// single-class leaf. Feature indices are 1-based columns. "labels" lists the
// data-file label of each class id.

namespace aoso {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

using Json = nlohmann::ordered_json;

inline Json NodeToJson(const TreeNode& node) {
  Json j;
  j["kind"] = node.is_leaf ? "leaf" : "internal";
  if (!node.is_leaf) {
    j["feature"] = node.feature + 1;
    j["threshold"] = node.threshold;
    j["left"] = node.left;
    j["right"] = node.right;
  }
  j["pair_r"] = node.pair.r + 1;
  j["pair_s"] = node.pair.s == kNoClass ? 0 : node.pair.s + 1;
  if (node.is_leaf) {
    j["value"] = node.value;
  } else {
    j["gain"] = node.gain;
  }
  return j;
}

template <typename T>
T Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ModelLoadError(std::string("model file: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ModelLoadError(std::string("model file: bad type for field '") + key + "'");
  }
}

inline int ClassField(const Json& j, const char* key, int num_classes, bool allow_none) {
  const int v = Field<int>(j, key);
  if (allow_none && v == 0) return kNoClass;
  if (v < 1 || v > num_classes) throw ModelLoadError(std::string("model file: class id out of range in '") + key + "'");
  return v - 1;
}

inline TreeNode NodeFromJson(const Json& j, int num_classes, std::size_t num_features) {
  TreeNode node;
  const auto kind = Field<std::string>(j, "kind");
  if (kind != "leaf" && kind != "internal") throw ModelLoadError("model file: unknown node kind '" + kind + "'");
  node.is_leaf = kind == "leaf";
  node.pair.r = ClassField(j, "pair_r", num_classes, false);
  node.pair.s = ClassField(j, "pair_s", num_classes, true);
  if (node.pair.r == node.pair.s) throw ModelLoadError("model file: node pair repeats a class");
  if (node.is_leaf) {
    node.value = Field<double>(j, "value");
  } else {
    const auto feature = Field<std::int64_t>(j, "feature");
    if (feature < 1 || static_cast<std::size_t>(feature) > num_features) {
      throw ModelLoadError("model file: feature index out of range");
    }
    node.feature = static_cast<std::uint32_t>(feature - 1);
    node.threshold = Field<double>(j, "threshold");
    node.left = Field<std::int32_t>(j, "left");
    node.right = Field<std::int32_t>(j, "right");
    node.gain = Field<double>(j, "gain");
  }
  return node;
}

}  // namespace detail

inline void WriteModel(const Model& model, std::ostream& out) {
  using detail::Json;
  Json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["algorithm"] = std::string(ToString(model.algorithm));
  doc["num_classes"] = model.num_classes;
  doc["num_features"] = model.num_features;
  doc["shrinkage"] = model.config.shrinkage;
  doc["leaves"] = model.config.leaves;
  doc["labels"] = std::vector<std::int64_t>(model.label_map.values().begin(), model.label_map.values().end());
  const TrainConfig& c = model.config;
  doc["config"] = Json{{"max_iterations", c.max_iterations},
                       {"pair_rule", std::string(ToString(c.pair_rule))},
                       {"abc_base_rule", std::string(ToString(c.abc_base_rule))},
                       {"stop_eps", c.stop_eps},
                       {"min_node_size", c.min_node_size},
                       {"eval_every", c.eval_every},
                       {"seed", c.seed},
                       {"bins", c.bins},
                       {"threads", c.threads}};
  doc["training"] = Json{{"iterations", model.iterations},
                         {"train_loss", model.train_loss},
                         {"stop_reason", std::string(ToString(model.stop_reason))}};
  Json bases = Json::array();
  for (int b : model.base_classes) bases.push_back(b + 1);
  doc["base_classes"] = std::move(bases);
  Json trees = Json::array();
  for (const VectorTree& tree : model.trees) {
    Json nodes = Json::array();
    for (const TreeNode& node : tree.nodes()) nodes.push_back(detail::NodeToJson(node));
    trees.push_back(Json{{"nodes", std::move(nodes)}});
  }
  doc["trees"] = std::move(trees);
  out << doc.dump() << '\n';
}

inline Model ReadModel(std::istream& in) {
  using detail::Field;
  using detail::Json;
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ModelLoadError(std::string("model file: not valid JSON (") + e.what() + ")");
  }
  const int version = Field<int>(doc, "format_version");
  if (version != kModelFormatVersion) {
    throw ModelLoadError("model file: unsupported format_version " + std::to_string(version));
  }
  Model model;
  try {
    model.algorithm = ParseAlgorithm(Field<std::string>(doc, "algorithm"));
    model.num_classes = Field<int>(doc, "num_classes");
    if (model.num_classes < 2) throw ModelLoadError("model file: num_classes must be >= 2");
    model.num_features = Field<std::size_t>(doc, "num_features");
    model.label_map = LabelMap::FromValues(Field<std::vector<std::int64_t>>(doc, "labels"));
    if (model.label_map.num_classes() != model.num_classes) throw ModelLoadError("model file: labels/num_classes mismatch");

    const Json& c = doc.at("config");
    TrainConfig& config = model.config;
    config.algorithm = model.algorithm;
    config.shrinkage = Field<double>(doc, "shrinkage");
    config.leaves = Field<int>(doc, "leaves");
    config.max_iterations = Field<std::int64_t>(c, "max_iterations");
    config.pair_rule = ParsePairRule(Field<std::string>(c, "pair_rule"));
    config.abc_base_rule = ParseAbcBaseRule(Field<std::string>(c, "abc_base_rule"));
    config.stop_eps = Field<double>(c, "stop_eps");
    config.min_node_size = Field<std::size_t>(c, "min_node_size");
    config.eval_every = Field<std::int64_t>(c, "eval_every");
    config.seed = Field<std::uint64_t>(c, "seed");
    config.bins = Field<int>(c, "bins");
    config.threads = Field<int>(c, "threads");
    config.Validate();

    const Json& t = doc.at("training");
    model.iterations = Field<std::int64_t>(t, "iterations");
    model.train_loss = Field<double>(t, "train_loss");
    model.stop_reason = ParseStopReason(Field<std::string>(t, "stop_reason"));

    for (int b : Field<std::vector<int>>(doc, "base_classes")) {
      if (b < 1 || b > model.num_classes) throw ModelLoadError("model file: base class out of range");
      model.base_classes.push_back(b - 1);
    }
    const Json& trees = doc.at("trees");
    if (!trees.is_array()) throw ModelLoadError("model file: 'trees' must be an array");
    for (const Json& tj : trees) {
      const Json& nodes = tj.at("nodes");
      if (!nodes.is_array()) throw ModelLoadError("model file: 'nodes' must be an array");
      std::vector<TreeNode> parsed;
      for (const Json& nj : nodes) parsed.push_back(detail::NodeFromJson(nj, model.num_classes, model.num_features));
      model.trees.emplace_back(std::move(parsed));
    }
  } catch (const ModelLoadError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ModelLoadError(std::string("model file: ") + e.what());
  } catch (const std::invalid_argument& e) {  // ConfigError, InvalidInput from validation
    throw ModelLoadError(std::string("model file: ") + e.what());
  }
  return model;
}

inline void SaveModel(const Model& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  WriteModel(model, out);
  if (!out) throw std::runtime_error("error writing model file '" + path + "'");
}

inline Model LoadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelLoadError("cannot open model file '" + path + "'");
  return ReadModel(in);
}

}  // namespace aoso

#endif  // AOSO_MODEL_IO_HPP_
