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

#include "ctcls/fsio.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "ctcls/errors.hpp"

namespace ctcls {

namespace {

void write_bytes_atomic(const std::filesystem::path& path, const char* data,
                        std::size_t n) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out.write(data, static_cast<std::streamsize>(n));
    if (!out) {
      throw IoError("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " +
                  ec.message());
  }
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  write_bytes_atomic(path, contents.data(), contents.size());
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& contents) {
  write_bytes_atomic(path, reinterpret_cast<const char*>(contents.data()),
                     contents.size());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace ctcls
