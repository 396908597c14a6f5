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

#ifndef CTCLS_WEIGHTS_HPP
#define CTCLS_WEIGHTS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ctcls {

/// One named tensor; stored on disk as little-endian float32, held in
/// memory as double for the numeric pipeline.
struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<double> values;

  std::size_t element_count() const;
};

/// Portable named-tensor archive ("CTW1"):
///   magic "CTW1" | u32 count | per tensor:
///     u32 name_len | name bytes | u32 ndim | u32 dims[] | f32 data[]
/// All integers and floats little-endian.
class WeightsArchive {
 public:
  static WeightsArchive load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;  // atomic write

  void add(NamedTensor tensor);
  const NamedTensor* find(const std::string& name) const;
  /// find() that throws WeightsMismatch when absent.
  const NamedTensor& require(const std::string& name) const;
  const std::vector<NamedTensor>& tensors() const { return tensors_; }

 private:
  std::vector<NamedTensor> tensors_;
};

}  // namespace ctcls

#endif  // CTCLS_WEIGHTS_HPP
