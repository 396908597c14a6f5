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

#ifndef CTCLS_SYNTH_HPP
#define CTCLS_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <random>

#include "ctcls/dataset.hpp"

namespace ctcls {

/// Synthetic two-texture corpus for smoke tests and demos: the positive
/// class carries vertical stripes, the negative class horizontal ones, with
/// random frequency/phase and mild noise. Linearly separable through any
/// reasonable convolutional feature map.
struct SynthSpec {
  int train_per_class = 100;
  int val_per_class = 25;
  int image_size = 32;
  std::uint64_t seed = 0;
};

/// One sample texture for the given class.
Tensor synth_texture(ClassLabel label, int size, std::mt19937_64& rng);

/// In-memory manifest (pixels pre-set; nothing touches disk).
DatasetManifest make_synthetic_manifest(const SynthSpec& spec);

/// Materialize the corpus as PNGs using the standard directory protocol:
///   root/{train,val}/{COVID,non-COVID}/img_NNN.png
void write_synthetic_dataset(const std::filesystem::path& root,
                             const SynthSpec& spec);

}  // namespace ctcls

#endif  // CTCLS_SYNTH_HPP
