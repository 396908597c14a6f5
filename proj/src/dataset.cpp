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

#include "ctcls/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ctcls/errors.hpp"
#include "ctcls/image.hpp"
#include "ctcls/rng.hpp"

namespace ctcls {

namespace {

namespace fs = std::filesystem;

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> class_directories(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Directory-name -> label, from the explicit map or alphabetical fallback.
std::map<std::string, ClassLabel> resolve_class_labels(
    const std::vector<fs::path>& class_dirs, const ScanOptions& options,
    std::vector<std::string>& warnings) {
  std::map<std::string, ClassLabel> labels;
  bool all_mapped = true;
  for (const auto& dir : class_dirs) {
    auto it = options.class_map.find(dir.filename().string());
    if (it == options.class_map.end()) {
      all_mapped = false;
      break;
    }
    labels[dir.filename().string()] = it->second == 1
                                          ? ClassLabel::COVID_POSITIVE
                                          : ClassLabel::COVID_NEGATIVE;
  }
  if (all_mapped) {
    return labels;
  }
  labels.clear();
  std::vector<std::string> names;
  for (const auto& dir : class_dirs) {
    names.push_back(dir.filename().string());
  }
  std::sort(names.begin(), names.end());
  labels[names[0]] = ClassLabel::COVID_NEGATIVE;
  labels[names[1]] = ClassLabel::COVID_POSITIVE;
  warnings.push_back("class directories {" + names[0] + ", " + names[1] +
                     "} not covered by the configured class map; assigned "
                     "alphabetically (" +
                     names[0] + " -> 0, " + names[1] +
                     " -> 1). Set class_map explicitly to pin labels.");
  return labels;
}

struct ScannedSplit {
  std::vector<ImageSample> samples;
  SplitCounts counts;
};

ScannedSplit scan_split(const fs::path& split_dir, const std::string& split,
                        const ScanOptions& options,
                        std::vector<std::string>& warnings,
                        std::string& positive_name,
                        std::string& negative_name) {
  const auto class_dirs = class_directories(split_dir);
  if (class_dirs.size() != 2) {
    throw MissingClassDirectory(
        split + " split at " + split_dir.string() + " has " +
        std::to_string(class_dirs.size()) +
        " class directories; expected exactly 2");
  }
  const auto labels = resolve_class_labels(class_dirs, options, warnings);

  ScannedSplit out;
  for (const auto& class_dir : class_dirs) {
    const ClassLabel label = labels.at(class_dir.filename().string());
    if (label == ClassLabel::COVID_POSITIVE) {
      positive_name = class_dir.filename().string();
    } else {
      negative_name = class_dir.filename().string();
    }
    std::int64_t readable = 0;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dir)) {
      if (entry.is_regular_file() && has_image_extension(entry.path())) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      if (!probe_image_header(file)) {
        warnings.push_back("unreadable image excluded: " + file.string());
        continue;
      }
      out.samples.push_back({file, label, nullptr});
      ++readable;
    }
    if (readable == 0) {
      throw EmptyClass("class directory " + class_dir.string() +
                       " has no readable images");
    }
    if (label == ClassLabel::COVID_POSITIVE) {
      out.counts.positive += readable;
    } else {
      out.counts.negative += readable;
    }
  }
  std::sort(out.samples.begin(), out.samples.end(),
            [](const ImageSample& a, const ImageSample& b) {
              return a.path < b.path;
            });
  return out;
}

SplitCounts count_samples(const std::vector<ImageSample>& samples) {
  SplitCounts c;
  for (const auto& s : samples) {
    if (s.label == ClassLabel::COVID_POSITIVE) {
      ++c.positive;
    } else {
      ++c.negative;
    }
  }
  return c;
}

}  // namespace

Tensor load_sample(const ImageSample& sample, int target_h, int target_w) {
  if (sample.pixels) {
    if (sample.pixels->height() != target_h ||
        sample.pixels->width() != target_w) {
      return bilinear_resize(*sample.pixels, target_h, target_w);
    }
    return *sample.pixels;
  }
  return load_image(sample.path, target_h, target_w);
}

DatasetManifest scan_dataset(const std::filesystem::path& root,
                             const ScanOptions& options) {
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw DataError("dataset root not found: " + root.string());
  }

  DatasetManifest manifest;
  const fs::path train_dir = root / "train";
  const fs::path val_dir = root / "val";

  if (fs::is_directory(train_dir)) {
    if (!fs::is_directory(val_dir)) {
      throw MissingClassDirectory("pre-split layout requires both train/ and "
                                  "val/ under " +
                                  root.string() + "; val/ is missing");
    }
    auto train = scan_split(train_dir, "train", options, manifest.warnings,
                            manifest.positive_class_name,
                            manifest.negative_class_name);
    auto val = scan_split(val_dir, "val", options, manifest.warnings,
                          manifest.positive_class_name,
                          manifest.negative_class_name);
    manifest.train_samples = std::move(train.samples);
    manifest.train_counts = train.counts;
    manifest.val_samples = std::move(val.samples);
    manifest.val_counts = val.counts;
    return manifest;
  }
  if (fs::is_directory(val_dir)) {
    throw MissingClassDirectory("found val/ but no train/ under " +
                                root.string());
  }

  // Single-pool layout: class directories at the root, split here.
  auto pool = scan_split(root, "pool", options, manifest.warnings,
                         manifest.positive_class_name,
                         manifest.negative_class_name);
  auto [train, val] =
      hold_out_split(pool.samples, options.split_ratio, options.split_seed);
  manifest.train_samples = std::move(train);
  manifest.val_samples = std::move(val);
  manifest.train_counts = count_samples(manifest.train_samples);
  manifest.val_counts = count_samples(manifest.val_samples);
  return manifest;
}

std::pair<std::vector<ImageSample>, std::vector<ImageSample>> hold_out_split(
    const std::vector<ImageSample>& pool, double ratio, std::uint64_t seed) {
  if (pool.empty()) {
    throw EmptyDataset("hold_out_split: empty pool");
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must lie in (0,1)");
  }

  std::vector<ImageSample> train;
  std::vector<ImageSample> val;
  for (const ClassLabel label :
       {ClassLabel::COVID_NEGATIVE, ClassLabel::COVID_POSITIVE}) {
    std::vector<ImageSample> members;
    for (const auto& s : pool) {
      if (s.label == label) {
        members.push_back(s);
      }
    }
    if (members.empty()) {
      continue;
    }
    std::sort(members.begin(), members.end(),
              [](const ImageSample& a, const ImageSample& b) {
                return a.path < b.path;
              });
    auto rng = make_rng(seed, static_cast<std::uint64_t>(label));
    shuffle_in_place(members, rng);
    // floor(ratio * n); the epsilon absorbs cases like 0.29*100 = 28.999...
    const auto n_train = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(members.size()) + 1e-9));
    if (n_train == 0 || n_train == members.size()) {
      throw DegenerateSplit("split ratio " + std::to_string(ratio) +
                            " leaves an empty side for a class with " +
                            std::to_string(members.size()) + " samples");
    }
    train.insert(train.end(), members.begin(),
                 members.begin() + static_cast<std::ptrdiff_t>(n_train));
    val.insert(val.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train),
               members.end());
  }
  auto by_path = [](const ImageSample& a, const ImageSample& b) {
    return a.path < b.path;
  };
  std::sort(train.begin(), train.end(), by_path);
  std::sort(val.begin(), val.end(), by_path);
  return {std::move(train), std::move(val)};
}

nlohmann::ordered_json DatasetManifest::counts_json() const {
  nlohmann::ordered_json j;
  j["train"][positive_class_name] = train_counts.positive;
  j["train"][negative_class_name] = train_counts.negative;
  j["val"][positive_class_name] = val_counts.positive;
  j["val"][negative_class_name] = val_counts.negative;
  return j;
}

}  // namespace ctcls
