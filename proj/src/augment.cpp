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

#include "ctcls/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ctcls/errors.hpp"
#include "ctcls/rng.hpp"

namespace ctcls {

namespace {

struct Affine2D {
  // Column-vector convention: y = L·x + t.
  double l[2][2] = {{1, 0}, {0, 1}};
  double t[2] = {0, 0};

  static Affine2D compose(const Affine2D& a, const Affine2D& b) {
    // (a ∘ b)(x) = a(b(x))
    Affine2D r;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        r.l[i][j] = a.l[i][0] * b.l[0][j] + a.l[i][1] * b.l[1][j];
      }
      r.t[i] = a.l[i][0] * b.t[0] + a.l[i][1] * b.t[1] + a.t[i];
    }
    return r;
  }

  Affine2D inverse() const {
    const double det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
    if (det == 0.0) {
      throw SingularTransform("affine transform is non-invertible");
    }
    Affine2D r;
    r.l[0][0] = l[1][1] / det;
    r.l[0][1] = -l[0][1] / det;
    r.l[1][0] = -l[1][0] / det;
    r.l[1][1] = l[0][0] / det;
    r.t[0] = -(r.l[0][0] * t[0] + r.l[0][1] * t[1]);
    r.t[1] = -(r.l[1][0] * t[0] + r.l[1][1] * t[1]);
    return r;
  }
};

double sample_at(const Tensor& img, double y, double x, int ch,
                 FillPolicy fill, double fill_value) {
  const int h = img.height();
  const int w = img.width();
  if (fill == FillPolicy::NearestEdge) {
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  }
  const double fy = std::floor(y);
  const double fx = std::floor(x);
  const int y0 = static_cast<int>(fy);
  const int x0 = static_cast<int>(fx);
  const double wy = y - fy;
  const double wx = x - fx;

  auto tap = [&](int yy, int xx) -> double {
    if (yy < 0 || yy >= h || xx < 0 || xx >= w) {
      return fill_value;  // only reachable under Constant fill
    }
    return img.at(yy, xx, ch);
  };
  const double top = tap(y0, x0) * (1.0 - wx) + tap(y0, x0 + 1) * wx;
  const double bot = tap(y0 + 1, x0) * (1.0 - wx) + tap(y0 + 1, x0 + 1) * wx;
  return top * (1.0 - wy) + bot * wy;
}

}  // namespace

void AugmentConfig::validate() const {
  if (zoom_range < 0.0 || zoom_range >= 1.0) {
    throw ConfigError("zoom_range must lie in [0, 1)");
  }
  if (shear_deg < 0.0) {
    throw ConfigError("shear_deg must be nonnegative");
  }
  if (shift_range < 0.0 || shift_x() < 0.0 || shift_y() < 0.0) {
    throw ConfigError("shift ranges must be nonnegative");
  }
  if (fill == FillPolicy::Constant &&
      (fill_value < 0.0 || fill_value > 1.0)) {
    throw ConfigError("fill_value must lie in [0, 1]");
  }
}

bool AffineTransform::is_identity() const {
  return m[0][0] == 1.0 && m[0][1] == 0.0 && m[0][2] == 0.0 &&
         m[1][0] == 0.0 && m[1][1] == 1.0 && m[1][2] == 0.0;
}

AffineTransform make_transform(double zoom, double shear_deg, double dx,
                               double dy, bool flip, int width, int height) {
  if (zoom == 0.0) {
    throw SingularTransform("zoom factor 0 collapses the image");
  }
  // Forward maps in coordinates centered on the image.
  Affine2D zoom_m;
  zoom_m.l[0][0] = zoom;
  zoom_m.l[1][1] = zoom;

  Affine2D shear_m;
  shear_m.l[0][1] =
      std::tan(shear_deg * std::numbers::pi / 180.0);  // x += tan(a)·y

  Affine2D shift_m;
  shift_m.t[0] = dx;
  shift_m.t[1] = dy;

  Affine2D flip_m;
  if (flip) {
    flip_m.l[0][0] = -1.0;
  }

  const Affine2D forward = Affine2D::compose(
      flip_m, Affine2D::compose(shift_m, Affine2D::compose(shear_m, zoom_m)));
  const Affine2D inv = forward.inverse();

  // Centered inverse -> absolute pixels: in = L·(out - c) + c - L·t_f ...
  // folded as in = L·out + (c - L·c + t_inv).
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  AffineTransform t;
  t.m[0][0] = inv.l[0][0];
  t.m[0][1] = inv.l[0][1];
  t.m[1][0] = inv.l[1][0];
  t.m[1][1] = inv.l[1][1];
  t.m[0][2] = cx - (inv.l[0][0] * cx + inv.l[0][1] * cy) + inv.t[0];
  t.m[1][2] = cy - (inv.l[1][0] * cx + inv.l[1][1] * cy) + inv.t[1];
  return t;
}

AffineTransform sample_transform(const AugmentConfig& config,
                                 std::mt19937_64& rng, int width, int height) {
  const double zoom =
      config.zoom_range > 0.0
          ? uniform_real(rng, 1.0 - config.zoom_range, 1.0 + config.zoom_range)
          : 1.0;
  const double shear =
      config.shear_deg > 0.0
          ? uniform_real(rng, -config.shear_deg, config.shear_deg)
          : 0.0;
  const double dx =
      config.shift_x() > 0.0
          ? uniform_real(rng, -config.shift_x() * width,
                         config.shift_x() * width)
          : 0.0;
  const double dy =
      config.shift_y() > 0.0
          ? uniform_real(rng, -config.shift_y() * height,
                         config.shift_y() * height)
          : 0.0;
  const bool flip = config.hflip && bernoulli(rng, 0.5);
  return make_transform(zoom, shear, dx, dy, flip, width, height);
}

Tensor apply_affine(const Tensor& image, const AffineTransform& t,
                    FillPolicy fill, double fill_value) {
  if (image.empty()) {
    throw DataError("apply_affine: empty image");
  }
  if (t.det() == 0.0) {
    throw SingularTransform("apply_affine: non-invertible linear part");
  }
  if (t.is_identity()) {
    return image;
  }
  Tensor out(image.height(), image.width(), image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const double in_x = t.m[0][0] * x + t.m[0][1] * y + t.m[0][2];
      const double in_y = t.m[1][0] * x + t.m[1][1] * y + t.m[1][2];
      for (int ch = 0; ch < image.channels(); ++ch) {
        out.at(y, x, ch) = sample_at(image, in_y, in_x, ch, fill, fill_value);
      }
    }
  }
  return out;
}

BatchStream::BatchStream(std::vector<ImageSample> samples,
                         AugmentConfig config, int batch_size, int target_h,
                         int target_w)
    : samples_(std::move(samples)),
      config_(config),
      batch_size_(batch_size),
      target_h_(target_h),
      target_w_(target_w),
      cache_(samples_.size()) {
  config_.validate();
  if (batch_size_ < 1) {
    throw ConfigError("batch_size must be >= 1");
  }
  if (samples_.empty()) {
    throw EmptyDataset("BatchStream: no samples");
  }
}

int BatchStream::batches_per_epoch() const {
  const auto n = static_cast<std::int64_t>(samples_.size());
  return static_cast<int>((n + batch_size_ - 1) / batch_size_);
}

const Tensor& BatchStream::base_image(std::size_t index) {
  if (!cache_[index]) {
    cache_[index] = std::make_shared<const Tensor>(
        load_sample(samples_[index], target_h_, target_w_));
  }
  return *cache_[index];
}

BatchStream::Epoch::Epoch(BatchStream* owner, std::uint64_t epoch_seed)
    : owner_(owner), rng_(epoch_seed) {
  order_.resize(owner_->samples_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    order_[i] = i;
  }
  shuffle_in_place(order_, rng_);
}

Batch BatchStream::Epoch::next() {
  Batch batch;
  const std::size_t end =
      std::min(next_ + static_cast<std::size_t>(owner_->batch_size_),
               order_.size());
  for (; next_ < end; ++next_) {
    const std::size_t idx = order_[next_];
    const ImageSample& sample = owner_->samples_[idx];
    const AffineTransform t = sample_transform(owner_->config_, rng_,
                                               owner_->target_w_,
                                               owner_->target_h_);
    batch.images.push_back(apply_affine(owner_->base_image(idx), t,
                                        owner_->config_.fill,
                                        owner_->config_.fill_value));
    batch.targets.push_back(target_of(sample.label));
    batch.sample_indices.push_back(idx);
  }
  return batch;
}

BatchStream::Epoch BatchStream::epoch(int epoch_index) {
  return Epoch(this, mix_seed(config_.seed, 0x9000 + epoch_index));
}

}  // namespace ctcls
