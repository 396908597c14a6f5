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

#include "ctcls/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ctcls/errors.hpp"
#include "ctcls/image.hpp"
#include "ctcls/rng.hpp"

namespace ctcls {

Tensor synth_texture(ClassLabel label, int size, std::mt19937_64& rng) {
  const double freq = uniform_real(rng, 3.0, 6.0);
  const double phase = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
  const double amplitude = uniform_real(rng, 0.30, 0.42);
  Tensor img(size, size, 3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double axis = label == ClassLabel::COVID_POSITIVE
                              ? static_cast<double>(x)
                              : static_cast<double>(y);
      const double wave =
          std::sin(2.0 * std::numbers::pi * freq * axis / size + phase);
      const double noise = uniform_real(rng, -0.04, 0.04);
      const double v = std::clamp(0.5 + amplitude * wave + noise, 0.0, 1.0);
      for (int c = 0; c < 3; ++c) {
        img.at(y, x, c) = v;
      }
    }
  }
  return img;
}

namespace {

std::vector<ImageSample> make_split(const std::string& split, int per_class,
                                    int size, std::mt19937_64& rng) {
  std::vector<ImageSample> samples;
  for (const ClassLabel label :
       {ClassLabel::COVID_POSITIVE, ClassLabel::COVID_NEGATIVE}) {
    const std::string cls =
        label == ClassLabel::COVID_POSITIVE ? "COVID" : "non-COVID";
    for (int i = 0; i < per_class; ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "img_%03d.png", i);
      ImageSample s;
      s.path = std::filesystem::path(split) / cls / name;
      s.label = label;
      s.pixels = std::make_shared<const Tensor>(synth_texture(label, size, rng));
      samples.push_back(std::move(s));
    }
  }
  std::sort(samples.begin(), samples.end(),
            [](const ImageSample& a, const ImageSample& b) {
              return a.path < b.path;
            });
  return samples;
}

}  // namespace

DatasetManifest make_synthetic_manifest(const SynthSpec& spec) {
  auto rng = make_rng(spec.seed, 0x5a17);
  DatasetManifest m;
  m.train_samples =
      make_split("train", spec.train_per_class, spec.image_size, rng);
  m.val_samples = make_split("val", spec.val_per_class, spec.image_size, rng);
  m.train_counts = {spec.train_per_class, spec.train_per_class};
  m.val_counts = {spec.val_per_class, spec.val_per_class};
  return m;
}

void write_synthetic_dataset(const std::filesystem::path& root,
                             const SynthSpec& spec) {
  const DatasetManifest m = make_synthetic_manifest(spec);
  for (const auto* split :
       {&m.train_samples, &m.val_samples}) {
    for (const ImageSample& s : *split) {
      const auto path = root / s.path;
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
      if (ec) {
        throw IoError("cannot create " + path.parent_path().string());
      }
      save_png(path, *s.pixels);
    }
  }
}

}  // namespace ctcls
