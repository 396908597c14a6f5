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

#ifndef CTCLS_AUGMENT_HPP
#define CTCLS_AUGMENT_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ctcls/dataset.hpp"
#include "ctcls/tensor.hpp"

namespace ctcls {

/// How out-of-bounds sample coordinates are resolved during warping.
enum class FillPolicy {
  NearestEdge,  // clamp to the border pixel; no artificial borders
  Constant,     // use fill_value
};

struct AugmentConfig {
  double zoom_range = 0.2;    // fractional; zoom drawn in [1-z, 1+z]
  double shear_deg = 11.46;   // max |shear angle| in degrees (0.2 rad)
  double shift_range = 0.2;   // fraction of width/height, both axes
  std::optional<double> shift_range_x;  // per-axis overrides
  std::optional<double> shift_range_y;
  bool hflip = true;
  FillPolicy fill = FillPolicy::NearestEdge;
  double fill_value = 0.0;
  std::uint64_t seed = 0;

  double shift_x() const { return shift_range_x.value_or(shift_range); }
  double shift_y() const { return shift_range_y.value_or(shift_range); }

  /// Throws ConfigError unless all ranges are nonnegative, zoom_range < 1,
  /// and fill_value lies in [0,1].
  void validate() const;
};

/// 2x3 matrix mapping *output* pixel coordinates to *input* coordinates
/// (inverse-warp convention), absolute pixels.
struct AffineTransform {
  double m[2][3] = {{1, 0, 0}, {0, 1, 0}};

  double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  bool is_identity() const;
  static AffineTransform identity() { return {}; }
};

/// Build the inverse-warp transform for the forward map
/// flip ∘ shift ∘ shear ∘ zoom about the image center. `shear_deg` shears
/// x by tan(angle)·y; `dx`/`dy` are absolute pixel shifts.
AffineTransform make_transform(double zoom, double shear_deg, double dx,
                               double dy, bool flip, int width, int height);

/// Draw one transform: zoom ~ U[1-z, 1+z], shear ~ U[-s, s] degrees,
/// shifts ~ U[-r·W, r·W] / U[-r·H, r·H], flip with prob 0.5 when enabled.
/// Draw order is fixed (zoom, shear, dx, dy, flip) for reproducibility.
AffineTransform sample_transform(const AugmentConfig& config,
                                 std::mt19937_64& rng, int width, int height);

/// Inverse-warp `image` through `t` with bilinear sampling. Output has the
/// input's shape; values stay in [0,1] for inputs in [0,1] and fill values
/// in [0,1]. Throws SingularTransform when det(t) == 0.
Tensor apply_affine(const Tensor& image, const AffineTransform& t,
                    FillPolicy fill, double fill_value = 0.0);

struct Batch {
  std::vector<Tensor> images;
  std::vector<double> targets;
  std::vector<std::size_t> sample_indices;  // into the stream's sample list
  int size() const { return static_cast<int>(images.size()); }
};

/// Deterministic augmented batch source: each epoch reshuffles the samples
/// (rng derived from (seed, epoch)), draws one transform per sample, and
/// yields ceil(N/batch_size) batches covering every sample exactly once.
/// Labels pass through untouched. Decoded base images are cached after the
/// first epoch.
class BatchStream {
 public:
  BatchStream(std::vector<ImageSample> samples, AugmentConfig config,
              int batch_size, int target_h, int target_w);

  int batches_per_epoch() const;
  std::size_t sample_count() const { return samples_.size(); }

  class Epoch {
   public:
    bool done() const { return next_ >= order_.size(); }
    Batch next();

   private:
    friend class BatchStream;
    Epoch(BatchStream* owner, std::uint64_t epoch_seed);
    BatchStream* owner_;
    std::vector<std::size_t> order_;
    std::mt19937_64 rng_;
    std::size_t next_ = 0;
  };

  /// Batches for one epoch (0-based index). Pure function of
  /// (samples, config, epoch).
  Epoch epoch(int epoch_index);

 private:
  friend class Epoch;
  const Tensor& base_image(std::size_t index);

  std::vector<ImageSample> samples_;
  AugmentConfig config_;
  int batch_size_;
  int target_h_;
  int target_w_;
  std::vector<std::shared_ptr<const Tensor>> cache_;
};

}  // namespace ctcls

#endif  // CTCLS_AUGMENT_HPP
