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

#include "ctcls/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "ctcls/errors.hpp"
#include "ctcls/fsio.hpp"

static_assert(std::endian::native == std::endian::little,
              "archive I/O assumes a little-endian host");

namespace ctcls {

namespace {

constexpr char kMagic[4] = {'C', 'T', 'W', '1'};

std::uint32_t read_u32(std::istream& in, const std::string& what) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) {
    throw IoError("weights archive truncated while reading " + what);
  }
  return v;
}

void append_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

}  // namespace

std::size_t NamedTensor::element_count() const {
  std::size_t n = 1;
  for (const auto d : dims) {
    n *= d;
  }
  return n;
}

WeightsArchive WeightsArchive::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open weights archive: " + path.string());
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a CTW1 weights archive: " + path.string());
  }
  const std::uint32_t count = read_u32(in, "tensor count");
  WeightsArchive archive;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    const std::uint32_t name_len = read_u32(in, "name length");
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    const std::uint32_t ndim = read_u32(in, "rank");
    t.dims.resize(ndim);
    for (auto& d : t.dims) {
      d = read_u32(in, "dimension");
    }
    std::vector<float> raw(t.element_count());
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (!in) {
      throw IoError("weights archive truncated in tensor '" + t.name + "'");
    }
    t.values.assign(raw.begin(), raw.end());
    archive.tensors_.push_back(std::move(t));
  }
  return archive;
}

void WeightsArchive::save(const std::filesystem::path& path) const {
  std::string out;
  out.append(kMagic, 4);
  append_u32(out, static_cast<std::uint32_t>(tensors_.size()));
  for (const auto& t : tensors_) {
    append_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.append(t.name);
    append_u32(out, static_cast<std::uint32_t>(t.dims.size()));
    for (const auto d : t.dims) {
      append_u32(out, d);
    }
    for (const double v : t.values) {
      const float f = static_cast<float>(v);
      char buf[4];
      std::memcpy(buf, &f, 4);
      out.append(buf, 4);
    }
  }
  write_file_atomic(path, out);
}

void WeightsArchive::add(NamedTensor tensor) {
  tensors_.push_back(std::move(tensor));
}

const NamedTensor* WeightsArchive::find(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) {
      return &t;
    }
  }
  return nullptr;
}

const NamedTensor& WeightsArchive::require(const std::string& name) const {
  const NamedTensor* t = find(name);
  if (t == nullptr) {
    throw WeightsMismatch("weights archive is missing tensor '" + name + "'");
  }
  return *t;
}

}  // namespace ctcls
