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

#include "ctcls/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <opencv2/imgcodecs.hpp>

#include "ctcls/errors.hpp"
#include "ctcls/fsio.hpp"

namespace ctcls {

namespace {

struct Tap {
  int i0, i1;
  double frac;
};

// Source taps for a continuous coordinate, clamped to [0, n-1].
Tap taps_for(double coord, int n) {
  const double c = std::clamp(coord, 0.0, static_cast<double>(n - 1));
  const int i0 = static_cast<int>(std::floor(c));
  const int i1 = std::min(i0 + 1, n - 1);
  return {i0, i1, c - i0};
}

}  // namespace

Tensor bilinear_resize(const Tensor& src, int target_h, int target_w) {
  if (target_h <= 0 || target_w <= 0) {
    throw ConfigError("target size must be positive");
  }
  if (src.height() == target_h && src.width() == target_w) {
    return src;
  }
  Tensor dst(target_h, target_w, src.channels());
  const double sy = static_cast<double>(src.height()) / target_h;
  const double sx = static_cast<double>(src.width()) / target_w;
  for (int y = 0; y < target_h; ++y) {
    const Tap ty = taps_for((y + 0.5) * sy - 0.5, src.height());
    for (int x = 0; x < target_w; ++x) {
      const Tap tx = taps_for((x + 0.5) * sx - 0.5, src.width());
      for (int ch = 0; ch < src.channels(); ++ch) {
        const double top = src.at(ty.i0, tx.i0, ch) * (1.0 - tx.frac) +
                           src.at(ty.i0, tx.i1, ch) * tx.frac;
        const double bot = src.at(ty.i1, tx.i0, ch) * (1.0 - tx.frac) +
                           src.at(ty.i1, tx.i1, ch) * tx.frac;
        dst.at(y, x, ch) = top * (1.0 - ty.frac) + bot * ty.frac;
      }
    }
  }
  return dst;
}

Tensor load_image(const std::filesystem::path& path, int target_h,
                  int target_w) {
  if (target_h <= 0 || target_w <= 0) {
    throw ConfigError("target size must be positive");
  }
  // IMREAD_COLOR yields 3-channel BGR and replicates grayscale sources.
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (mat.empty()) {
    throw DecodeError("cannot decode image: " + path.string());
  }
  Tensor img(mat.rows, mat.cols, 3);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < mat.cols; ++x) {
      // BGR -> RGB, scaled into [0,1].
      img.at(y, x, 0) = row[x][2] / 255.0;
      img.at(y, x, 1) = row[x][1] / 255.0;
      img.at(y, x, 2) = row[x][0] / 255.0;
    }
  }
  return bilinear_resize(img, target_h, target_w);
}

void save_png(const std::filesystem::path& path, const Tensor& image) {
  if (image.channels() != 3) {
    throw ConfigError("save_png expects a 3-channel image");
  }
  cv::Mat mat(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width(); ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        const double v = std::clamp(image.at(y, x, ch), 0.0, 1.0);
        // RGB tensor -> BGR mat.
        row[x][2 - ch] = static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
  }
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", mat, buf)) {
    throw IoError("PNG encode failed for " + path.string());
  }
  write_file_atomic(path, buf);
}

bool probe_image_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return false;
  }
  std::array<unsigned char, 8> magic{};
  in.read(reinterpret_cast<char*>(magic.data()), magic.size());
  if (in.gcount() < 4) {
    return false;
  }
  static const std::array<unsigned char, 8> png = {0x89, 'P',  'N',  'G',
                                                   0x0d, 0x0a, 0x1a, 0x0a};
  if (in.gcount() >= 8 && std::equal(png.begin(), png.end(), magic.begin())) {
    return true;
  }
  return magic[0] == 0xff && magic[1] == 0xd8;  // JPEG SOI
}

}  // namespace ctcls
