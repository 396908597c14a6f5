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

#ifndef CTCLS_IMAGE_HPP
#define CTCLS_IMAGE_HPP

#include <filesystem>

#include "ctcls/tensor.hpp"

namespace ctcls {

/// Decode an image file into an H x W x 3 tensor scaled by 1/255 into [0,1],
/// resized to target_size with bilinear interpolation. Grayscale sources are
/// replicated across channels. Throws DecodeError on corrupt files.
Tensor load_image(const std::filesystem::path& path, int target_h,
                  int target_w);

/// Bilinear resize with half-pixel-center sampling:
///   src_x = (dst_x + 0.5) * src_w / dst_w - 0.5, taps clamped at borders.
Tensor bilinear_resize(const Tensor& src, int target_h, int target_w);

/// Encode values in [0,1] (clamped, scaled by 255) as a PNG. Atomic write.
void save_png(const std::filesystem::path& path, const Tensor& image);

/// Cheap readability probe used during dataset scans: the file opens and its
/// magic bytes match a PNG or JPEG header. Full decode happens at load time.
bool probe_image_header(const std::filesystem::path& path);

}  // namespace ctcls

#endif  // CTCLS_IMAGE_HPP
