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

#ifndef CTCLS_TENSOR_HPP
#define CTCLS_TENSOR_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ctcls {

/// Spatial feature-map shape (height, width, channels).
struct Shape {
  int h = 0;
  int w = 0;
  int c = 0;

  std::int64_t flat() const {
    return static_cast<std::int64_t>(h) * w * c;
  }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense H x W x C grid of doubles, row-major with channels fastest.
/// Images use C = 3 with values in [0, 1]; feature maps use whatever the
/// producing layer emits.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int h, int w, int c, double fill = 0.0)
      : h_(h), w_(w), c_(c),
        data_(static_cast<std::size_t>(h) * w * c, fill) {}

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  Shape shape() const { return {h_, w_, c_}; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x, int ch) {
    return data_[(static_cast<std::size_t>(y) * w_ + x) * c_ + ch];
  }
  double at(int y, int x, int ch) const {
    return data_[(static_cast<std::size_t>(y) * w_ + x) * c_ + ch];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool operator==(const Tensor&) const = default;

 private:
  int h_ = 0;
  int w_ = 0;
  int c_ = 0;
  std::vector<double> data_;
};

inline std::string Shape::str() const {
  return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
}

}  // namespace ctcls

#endif  // CTCLS_TENSOR_HPP
