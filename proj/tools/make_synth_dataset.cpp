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

// Writes a small synthetic two-texture corpus in the pipeline's directory
// layout, for demos and smoke runs without the real data.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ctcls/errors.hpp"
#include "ctcls/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic two-class image dataset"};

  std::string out_dir;
  ctcls::SynthSpec spec;
  app.add_option("out_dir", out_dir, "dataset root to create")->required();
  app.add_option("--train", spec.train_per_class, "train images per class");
  app.add_option("--val", spec.val_per_class, "validation images per class");
  app.add_option("--size", spec.image_size, "image edge length in pixels");
  app.add_option("--seed", spec.seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    ctcls::write_synthetic_dataset(out_dir, spec);
    std::cout << "wrote " << 2 * spec.train_per_class << " train + "
              << 2 * spec.val_per_class << " val images under " << out_dir
              << "\n";
    return 0;
  } catch (const ctcls::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  }
}
