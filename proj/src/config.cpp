// Copyright 2026 The ctclassify Authors
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

#include "ctcls/config.hpp"

#include <cstdlib>
#include <set>

#include <nlohmann/json.hpp>

#include "ctcls/errors.hpp"
#include "ctcls/fsio.hpp"

namespace ctcls {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::string& section,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + section);
    }
  }
}

const json* maybe(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

template <typename T>
void read_into(const json& j, const char* key, T& out,
               const std::string& section) {
  if (const json* v = maybe(j, key)) {
    try {
      out = v->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("bad value for " + section + "." + key + ": " +
                        e.what());
    }
  }
}

/// Resolve a weights reference: RANDOM passes through; bare names that do
/// not exist locally are searched under $CTCLS_WEIGHTS_PATH.
std::string resolve_weights(const std::string& weights) {
  if (weights == "RANDOM" || weights.empty()) {
    return weights;
  }
  if (std::filesystem::exists(weights)) {
    return weights;
  }
  if (const char* dir = std::getenv("CTCLS_WEIGHTS_PATH")) {
    const auto candidate = std::filesystem::path(dir) / weights;
    if (std::filesystem::exists(candidate)) {
      return candidate.string();
    }
  }
  return weights;  // existence is checked when the archive is opened
}

}  // namespace

void DatasetConfig::validate() const {
  // root may stay empty for commands that never touch the corpus (compare);
  // data-bearing commands reject it in the pipeline.
  if (input_h <= 0 || input_w <= 0) {
    throw ConfigError("dataset.input_size must be positive");
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw ConfigError("dataset.split_ratio must lie in (0,1)");
  }
  if (!class_map.empty()) {
    if (class_map.size() != 2) {
      throw ConfigError("dataset.class_map must name exactly two classes");
    }
    int sum = 0;
    for (const auto& [name, target] : class_map) {
      if (target != 0 && target != 1) {
        throw ConfigError("dataset.class_map targets must be 0 or 1");
      }
      sum += target;
    }
    if (sum != 1) {
      throw ConfigError("dataset.class_map must assign 0 and 1 exactly once");
    }
  }
}

void PipelineConfig::validate() const {
  dataset.validate();
  augment.validate();
  backbone.validate();
  head.validate();
  training.validate();
  if (run_id.empty() || output_dir.empty()) {
    throw ConfigError("output_dir and run_id must be set");
  }
}

nlohmann::ordered_json PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["output_dir"] = output_dir.string();
  j["run_id"] = run_id;
  j["timing"] = timing == TimingMode::Wall ? "wall" : "fixed";

  auto& d = j["dataset"];
  d["root"] = dataset.root.string();
  d["input_size"] = {dataset.input_h, dataset.input_w};
  d["normalize"] =
      dataset.normalize == NormalizeMode::Unit ? "unit" : "symmetric";
  d["class_map"] = dataset.class_map;
  d["split_ratio"] = dataset.split_ratio;
  d["split_seed"] = dataset.split_seed;

  auto& a = j["augment"];
  a["zoom_range"] = augment.zoom_range;
  a["shear_deg"] = augment.shear_deg;
  a["shift_range"] = augment.shift_range;
  if (augment.shift_range_x) {
    a["shift_range_x"] = *augment.shift_range_x;
  }
  if (augment.shift_range_y) {
    a["shift_range_y"] = *augment.shift_range_y;
  }
  a["hflip"] = augment.hflip;
  if (augment.fill == FillPolicy::NearestEdge) {
    a["fill"] = "nearest_edge";
  } else {
    a["fill"] = augment.fill_value;
  }
  a["seed"] = augment.seed;

  auto& b = j["backbone"];
  b["architecture"] = backbone.architecture;
  b["weights"] = backbone.weights;
  b["truncation_node"] = backbone.truncation_node;
  b["frozen"] = backbone.frozen;
  b["random_seed"] = backbone.random_seed;

  auto& h = j["head"];
  h["dense_units"] = head.dense_units;
  h["dropout_rate"] = head.dropout_rate;

  auto& t = j["training"];
  t["learning_rate"] = training.learning_rate;
  t["batch_size"] = training.batch_size;
  t["rmsprop_decay"] = training.rmsprop_decay;
  t["rmsprop_epsilon"] = training.rmsprop_epsilon;
  t["max_epochs"] = training.max_epochs;
  t["stop"] = {{"train_accuracy_threshold",
                training.stop.train_accuracy_threshold},
               {"patience", training.stop.patience},
               {"min_delta", training.stop.min_delta}};
  t["seed"] = training.seed;

  if (!compare.runs.empty() || compare.fixtures) {
    auto& c = j["compare"];
    c["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : compare.runs) {
      c["runs"].push_back(r.string());
    }
    if (compare.fixtures) {
      c["fixtures"] = compare.fixtures->string();
    }
  }
  return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  reject_unknown_keys(j, "config",
                      {"seed", "output_dir", "run_id", "timing", "dataset",
                       "augment", "backbone", "head", "training", "compare"});
  PipelineConfig c;
  read_into(j, "seed", c.seed, "config");
  std::string out_dir = c.output_dir.string();
  read_into(j, "output_dir", out_dir, "config");
  c.output_dir = out_dir;
  read_into(j, "run_id", c.run_id, "config");
  if (const json* t = maybe(j, "timing")) {
    const auto s = t->get<std::string>();
    if (s == "wall") {
      c.timing = TimingMode::Wall;
    } else if (s == "fixed") {
      c.timing = TimingMode::Fixed;
    } else {
      throw ConfigError("timing must be 'wall' or 'fixed'");
    }
  }

  if (const json* d = maybe(j, "dataset")) {
    reject_unknown_keys(*d, "dataset",
                        {"root", "input_size", "normalize", "class_map",
                         "split_ratio", "split_seed"});
    std::string root;
    read_into(*d, "root", root, "dataset");
    c.dataset.root = root;
    if (const json* size = maybe(*d, "input_size")) {
      if (!size->is_array() || size->size() != 2) {
        throw ConfigError("dataset.input_size must be [height, width]");
      }
      c.dataset.input_h = (*size)[0].get<int>();
      c.dataset.input_w = (*size)[1].get<int>();
    }
    if (const json* n = maybe(*d, "normalize")) {
      const auto s = n->get<std::string>();
      if (s == "unit") {
        c.dataset.normalize = NormalizeMode::Unit;
      } else if (s == "symmetric") {
        c.dataset.normalize = NormalizeMode::Symmetric;
      } else {
        throw ConfigError("dataset.normalize must be 'unit' or 'symmetric'");
      }
    }
    read_into(*d, "class_map", c.dataset.class_map, "dataset");
    read_into(*d, "split_ratio", c.dataset.split_ratio, "dataset");
    if (maybe(*d, "split_seed")) {
      read_into(*d, "split_seed", c.dataset.split_seed, "dataset");
    } else {
      c.dataset.split_seed = c.seed;
    }
  }

  if (const json* a = maybe(j, "augment")) {
    reject_unknown_keys(*a, "augment",
                        {"zoom_range", "shear_deg", "shift_range",
                         "shift_range_x", "shift_range_y", "hflip", "fill",
                         "seed"});
    read_into(*a, "zoom_range", c.augment.zoom_range, "augment");
    read_into(*a, "shear_deg", c.augment.shear_deg, "augment");
    read_into(*a, "shift_range", c.augment.shift_range, "augment");
    if (maybe(*a, "shift_range_x")) {
      double v = 0;
      read_into(*a, "shift_range_x", v, "augment");
      c.augment.shift_range_x = v;
    }
    if (maybe(*a, "shift_range_y")) {
      double v = 0;
      read_into(*a, "shift_range_y", v, "augment");
      c.augment.shift_range_y = v;
    }
    read_into(*a, "hflip", c.augment.hflip, "augment");
    if (const json* fill = maybe(*a, "fill")) {
      if (fill->is_string()) {
        if (fill->get<std::string>() != "nearest_edge") {
          throw ConfigError(
              "augment.fill must be 'nearest_edge' or a constant in [0,1]");
        }
        c.augment.fill = FillPolicy::NearestEdge;
      } else {
        c.augment.fill = FillPolicy::Constant;
        c.augment.fill_value = fill->get<double>();
      }
    }
    if (maybe(*a, "seed")) {
      read_into(*a, "seed", c.augment.seed, "augment");
    } else {
      c.augment.seed = c.seed;
    }
  } else {
    c.augment.seed = c.seed;
  }

  if (const json* b = maybe(j, "backbone")) {
    reject_unknown_keys(*b, "backbone",
                        {"architecture", "weights", "truncation_node",
                         "frozen", "random_seed"});
    read_into(*b, "architecture", c.backbone.architecture, "backbone");
    read_into(*b, "weights", c.backbone.weights, "backbone");
    read_into(*b, "truncation_node", c.backbone.truncation_node, "backbone");
    read_into(*b, "frozen", c.backbone.frozen, "backbone");
    if (maybe(*b, "random_seed")) {
      read_into(*b, "random_seed", c.backbone.random_seed, "backbone");
    } else {
      c.backbone.random_seed = c.seed;
    }
  } else {
    c.backbone.random_seed = c.seed;
  }
  c.backbone.weights = resolve_weights(c.backbone.weights);
  // The model's input is whatever the dataset preprocessing emits.
  c.backbone.input_h = c.dataset.input_h;
  c.backbone.input_w = c.dataset.input_w;

  if (const json* h = maybe(j, "head")) {
    reject_unknown_keys(*h, "head", {"dense_units", "dropout_rate"});
    read_into(*h, "dense_units", c.head.dense_units, "head");
    read_into(*h, "dropout_rate", c.head.dropout_rate, "head");
  }

  if (const json* t = maybe(j, "training")) {
    reject_unknown_keys(*t, "training",
                        {"learning_rate", "batch_size", "rmsprop_decay",
                         "rmsprop_epsilon", "max_epochs", "stop", "seed"});
    read_into(*t, "learning_rate", c.training.learning_rate, "training");
    read_into(*t, "batch_size", c.training.batch_size, "training");
    read_into(*t, "rmsprop_decay", c.training.rmsprop_decay, "training");
    read_into(*t, "rmsprop_epsilon", c.training.rmsprop_epsilon, "training");
    read_into(*t, "max_epochs", c.training.max_epochs, "training");
    if (const json* s = maybe(*t, "stop")) {
      reject_unknown_keys(
          *s, "training.stop",
          {"train_accuracy_threshold", "patience", "min_delta"});
      read_into(*s, "train_accuracy_threshold",
                c.training.stop.train_accuracy_threshold, "training.stop");
      read_into(*s, "patience", c.training.stop.patience, "training.stop");
      read_into(*s, "min_delta", c.training.stop.min_delta, "training.stop");
    }
    if (maybe(*t, "seed")) {
      read_into(*t, "seed", c.training.seed, "training");
    } else {
      c.training.seed = c.seed;
    }
  } else {
    c.training.seed = c.seed;
  }

  if (const json* cmp = maybe(j, "compare")) {
    reject_unknown_keys(*cmp, "compare", {"runs", "fixtures"});
    if (const json* runs = maybe(*cmp, "runs")) {
      for (const auto& r : *runs) {
        c.compare.runs.emplace_back(r.get<std::string>());
      }
    }
    if (const json* fx = maybe(*cmp, "fixtures")) {
      c.compare.fixtures = std::filesystem::path(fx->get<std::string>());
    }
  }

  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const IoError&) {
    throw ConfigError("cannot read config file: " + path.string());
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " +
                      e.what());
  }
  return from_json(j);
}

}  // namespace ctcls
