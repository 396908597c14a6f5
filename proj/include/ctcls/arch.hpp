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

#ifndef CTCLS_ARCH_HPP
#define CTCLS_ARCH_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctcls/tensor.hpp"

namespace ctcls {

enum class OpKind {
  Input,
  Conv2D,     // bias-free; batch norm carries the offset
  BatchNorm,  // inference-form: beta, moving mean, moving variance
  ReLU,
  MaxPool,
  AvgPool,
  Concat,
};

enum class Padding { Same, Valid };

struct LayerDef {
  std::string name;
  OpKind kind = OpKind::Input;
  int filters = 0;  // Conv2D output channels
  int kh = 0, kw = 0;
  int sh = 1, sw = 1;
  Padding pad = Padding::Same;
  std::vector<int> inputs;  // producer layer indices (topological)
};

/// A named-node architecture: layers in topological order with inferred
/// output shapes and per-layer parameter counts. Purely structural: no
/// weight buffers live here, so shape and count queries are free.
class ArchGraph {
 public:
  const std::string& arch_name() const { return arch_name_; }
  const std::vector<LayerDef>& layers() const { return layers_; }
  Shape input_shape() const { return shapes_.front(); }

  /// Index of a named node; throws UnknownNode listing the designated
  /// truncation points when the name does not exist.
  int index_of(const std::string& node) const;
  bool has_node(const std::string& node) const;

  /// The documented truncation points (the concatenation nodes for the
  /// published backbone; every named node remains addressable).
  const std::vector<std::string>& truncation_points() const {
    return truncation_points_;
  }

  Shape output_shape(int layer_index) const { return shapes_[layer_index]; }
  std::int64_t layer_param_count(int layer_index) const;
  /// Total parameters of layers [0, layer_index].
  std::int64_t params_up_to(int layer_index) const;

  // Builder API -- layers must be appended in topological order.
  int add_input(int h, int w, int c, const std::string& name = "input");
  int add_conv(const std::string& name, int input, int filters, int kh,
               int kw, int sh, int sw, Padding pad);
  int add_batchnorm(const std::string& name, int input);
  int add_relu(const std::string& name, int input);
  int add_maxpool(const std::string& name, int input, int k, int stride,
                  Padding pad);
  int add_avgpool(const std::string& name, int input, int k, int stride,
                  Padding pad);
  int add_concat(const std::string& name, const std::vector<int>& inputs);
  void set_truncation_points(std::vector<std::string> points) {
    truncation_points_ = std::move(points);
  }
  void set_arch_name(std::string name) { arch_name_ = std::move(name); }

 private:
  int append(LayerDef def, Shape out);

  std::string arch_name_;
  std::vector<LayerDef> layers_;
  std::vector<Shape> shapes_;
  std::vector<std::string> truncation_points_;
  std::unordered_map<std::string, int> by_name_;
};

/// Spatial extent after a strided window op.
int conv_output_extent(int in, int k, int stride, Padding pad);

/// Registry of known architectures: "inception_v3" (truncation points
/// mixed0..mixed10) and "tiny_cnn" (a small stand-in for tests and the
/// synthetic pipeline). Throws ConfigError for unknown names.
ArchGraph build_architecture(const std::string& architecture, int input_h,
                             int input_w);

ArchGraph build_inception_v3(int input_h, int input_w);
ArchGraph build_tiny_cnn(int input_h, int input_w);

}  // namespace ctcls

#endif  // CTCLS_ARCH_HPP
