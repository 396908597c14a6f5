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

#ifndef CTCLS_DATASET_HPP
#define CTCLS_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ctcls/tensor.hpp"

namespace ctcls {

/// Binary diagnosis label. Positive encodes to numeric target 1 so a sigmoid
/// output reads as probability of infection and recall equals sensitivity.
enum class ClassLabel {
  COVID_NEGATIVE = 0,
  COVID_POSITIVE = 1,
};

inline double target_of(ClassLabel label) {
  return label == ClassLabel::COVID_POSITIVE ? 1.0 : 0.0;
}

/// One labeled image. Pixels are loaded lazily from `path`; tests and the
/// synthetic pipeline may pre-set `pixels` to skip disk entirely.
struct ImageSample {
  std::filesystem::path path;
  ClassLabel label = ClassLabel::COVID_NEGATIVE;
  std::shared_ptr<const Tensor> pixels;  // optional in-memory override
};

/// Decoded, resized, [0,1]-normalized pixels for a sample; honors the
/// in-memory override (which must already match the target size).
Tensor load_sample(const ImageSample& sample, int target_h, int target_w);

struct SplitCounts {
  std::int64_t positive = 0;
  std::int64_t negative = 0;
  std::int64_t total() const { return positive + negative; }
};

struct DatasetManifest {
  std::vector<ImageSample> train_samples;
  std::vector<ImageSample> val_samples;
  SplitCounts train_counts;
  SplitCounts val_counts;
  /// Per-file notes for images excluded from the counts (unreadable, etc).
  std::vector<std::string> warnings;

  /// Export as {split: {class: count}} using the scan's class names.
  nlohmann::ordered_json counts_json() const;
  std::string positive_class_name = "COVID";
  std::string negative_class_name = "non-COVID";
};

struct ScanOptions {
  /// Directory-name -> numeric target. Explicit by default so a renamed
  /// corpus cannot silently invert labels; with unrecognized names the scan
  /// falls back to alphabetical order (first -> 0) and records a warning.
  std::map<std::string, int> class_map = {{"COVID", 1}, {"non-COVID", 0}};
  /// Used only for single-pool layouts (no train/ subdirectory).
  double split_ratio = 0.8;
  std::uint64_t split_seed = 0;
};

/// Discover the two-class corpus under `root`. Two layouts are accepted:
///   root/{train,val}/{class}/*.{png,jpg,jpeg}   (pre-split)
///   root/{class}/*.{png,jpg,jpeg}               (pool; split by options)
/// Samples are ordered lexicographically by path. Throws
/// MissingClassDirectory / EmptyClass; unreadable files become warnings.
DatasetManifest scan_dataset(const std::filesystem::path& root,
                             const ScanOptions& options = {});

/// Stratified hold-out split: per class, floor(ratio * n) samples go to
/// train, the rest to val, selection shuffled by `seed`. Output splits are
/// sorted by path. Throws DegenerateSplit if any side of any class is empty.
std::pair<std::vector<ImageSample>, std::vector<ImageSample>> hold_out_split(
    const std::vector<ImageSample>& pool, double ratio, std::uint64_t seed);

}  // namespace ctcls

#endif  // CTCLS_DATASET_HPP
