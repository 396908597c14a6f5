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

#ifndef CTCLS_FSIO_HPP
#define CTCLS_FSIO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ctcls {

/// Write-temp-then-rename; readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);
void write_file_atomic(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace ctcls

#endif  // CTCLS_FSIO_HPP
