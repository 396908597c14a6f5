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

#include "ctcls/arch.hpp"

#include <stdexcept>

#include "ctcls/errors.hpp"

namespace ctcls {

int conv_output_extent(int in, int k, int stride, Padding pad) {
  if (pad == Padding::Same) {
    return (in + stride - 1) / stride;  // ceil(in / stride)
  }
  return (in - k) / stride + 1;
}

int ArchGraph::append(LayerDef def, Shape out) {
  if (by_name_.contains(def.name)) {
    throw std::logic_error("duplicate layer name: " + def.name);
  }
  const int idx = static_cast<int>(layers_.size());
  by_name_[def.name] = idx;
  layers_.push_back(std::move(def));
  shapes_.push_back(out);
  return idx;
}

int ArchGraph::add_input(int h, int w, int c, const std::string& name) {
  if (h <= 0 || w <= 0 || c <= 0) {
    throw ConfigError("input shape must be positive");
  }
  return append({name, OpKind::Input, 0, 0, 0, 1, 1, Padding::Same, {}},
                {h, w, c});
}

int ArchGraph::add_conv(const std::string& name, int input, int filters,
                        int kh, int kw, int sh, int sw, Padding pad) {
  const Shape in = shapes_.at(input);
  const Shape out{conv_output_extent(in.h, kh, sh, pad),
                  conv_output_extent(in.w, kw, sw, pad), filters};
  return append({name, OpKind::Conv2D, filters, kh, kw, sh, sw, pad, {input}},
                out);
}

int ArchGraph::add_batchnorm(const std::string& name, int input) {
  const Shape in = shapes_.at(input);
  return append(
      {name, OpKind::BatchNorm, 0, 0, 0, 1, 1, Padding::Same, {input}}, in);
}

int ArchGraph::add_relu(const std::string& name, int input) {
  const Shape in = shapes_.at(input);
  return append({name, OpKind::ReLU, 0, 0, 0, 1, 1, Padding::Same, {input}},
                in);
}

int ArchGraph::add_maxpool(const std::string& name, int input, int k,
                           int stride, Padding pad) {
  const Shape in = shapes_.at(input);
  const Shape out{conv_output_extent(in.h, k, stride, pad),
                  conv_output_extent(in.w, k, stride, pad), in.c};
  return append({name, OpKind::MaxPool, 0, k, k, stride, stride, pad, {input}},
                out);
}

int ArchGraph::add_avgpool(const std::string& name, int input, int k,
                           int stride, Padding pad) {
  const Shape in = shapes_.at(input);
  const Shape out{conv_output_extent(in.h, k, stride, pad),
                  conv_output_extent(in.w, k, stride, pad), in.c};
  return append({name, OpKind::AvgPool, 0, k, k, stride, stride, pad, {input}},
                out);
}

int ArchGraph::add_concat(const std::string& name,
                          const std::vector<int>& inputs) {
  if (inputs.empty()) {
    throw std::logic_error("concat needs inputs");
  }
  Shape out = shapes_.at(inputs.front());
  out.c = 0;
  for (const int idx : inputs) {
    const Shape s = shapes_.at(idx);
    if (s.h != out.h || s.w != out.w) {
      throw std::logic_error("concat spatial mismatch at " + name);
    }
    out.c += s.c;
  }
  return append({name, OpKind::Concat, 0, 0, 0, 1, 1, Padding::Same, inputs},
                out);
}

bool ArchGraph::has_node(const std::string& node) const {
  return by_name_.contains(node);
}

int ArchGraph::index_of(const std::string& node) const {
  const auto it = by_name_.find(node);
  if (it != by_name_.end()) {
    return it->second;
  }
  std::string valid;
  for (const auto& p : truncation_points_) {
    valid += valid.empty() ? p : ", " + p;
  }
  throw UnknownNode("unknown node '" + node + "' in architecture '" +
                    arch_name_ + "'; valid truncation nodes: " + valid);
}

std::int64_t ArchGraph::layer_param_count(int layer_index) const {
  const LayerDef& l = layers_.at(layer_index);
  switch (l.kind) {
    case OpKind::Conv2D: {
      const Shape in = shapes_.at(l.inputs.front());
      return static_cast<std::int64_t>(l.kh) * l.kw * in.c * l.filters;
    }
    case OpKind::BatchNorm:
      // beta + moving mean + moving variance (no scale).
      return 3LL * shapes_.at(layer_index).c;
    default:
      return 0;
  }
}

std::int64_t ArchGraph::params_up_to(int layer_index) const {
  std::int64_t total = 0;
  for (int i = 0; i <= layer_index; ++i) {
    total += layer_param_count(i);
  }
  return total;
}

ArchGraph build_architecture(const std::string& architecture, int input_h,
                             int input_w) {
  if (architecture == "inception_v3") {
    return build_inception_v3(input_h, input_w);
  }
  if (architecture == "tiny_cnn") {
    return build_tiny_cnn(input_h, input_w);
  }
  throw ConfigError("unknown architecture '" + architecture +
                    "'; known: inception_v3, tiny_cnn");
}

ArchGraph build_tiny_cnn(int input_h, int input_w) {
  ArchGraph g;
  g.set_arch_name("tiny_cnn");
  int x = g.add_input(input_h, input_w, 3);
  x = g.add_conv("conv0", x, 8, 3, 3, 2, 2, Padding::Same);
  x = g.add_relu("relu0", x);
  x = g.add_conv("conv1", x, 16, 3, 3, 2, 2, Padding::Same);
  x = g.add_relu("relu1", x);
  x = g.add_maxpool("block0", x, 2, 2, Padding::Valid);
  x = g.add_conv("conv2", x, 16, 3, 3, 1, 1, Padding::Same);
  x = g.add_relu("relu2", x);
  g.add_maxpool("block1", x, 2, 2, Padding::Valid);
  g.set_truncation_points({"block0", "block1"});
  return g;
}

}  // namespace ctcls
