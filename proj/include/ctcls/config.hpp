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

#ifndef CTCLS_CONFIG_HPP
#define CTCLS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ctcls/augment.hpp"
#include "ctcls/model.hpp"
#include "ctcls/training.hpp"

namespace ctcls {

struct DatasetConfig {
  std::filesystem::path root;
  int input_h = 299;
  int input_w = 299;
  NormalizeMode normalize = NormalizeMode::Unit;
  std::map<std::string, int> class_map = {{"COVID", 1}, {"non-COVID", 0}};
  double split_ratio = 0.8;  // single-pool layouts only
  std::uint64_t split_seed = 0;

  void validate() const;
};

struct CompareConfig {
  std::vector<std::filesystem::path> runs;
  std::optional<std::filesystem::path> fixtures;
};

/// One declarative file drives every command; flags exist only for
/// --config/--command/--out/--seed. The effective (seed-resolved) form is
/// embedded in every run snapshot and round-trips losslessly.
struct PipelineConfig {
  DatasetConfig dataset;
  AugmentConfig augment;
  BackboneSpec backbone;
  HeadSpec head;
  TrainConfig training;
  CompareConfig compare;
  TimingMode timing = TimingMode::Wall;
  std::filesystem::path output_dir = "runs";
  std::string run_id = "run";
  std::uint64_t seed = 0;

  /// Artifacts live under output_dir/run_id.
  std::filesystem::path run_dir() const { return output_dir / run_id; }

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);
};

}  // namespace ctcls

#endif  // CTCLS_CONFIG_HPP
