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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ctcls/augment.hpp"
#include "ctcls/errors.hpp"
#include "ctcls/rng.hpp"

using namespace ctcls;

namespace {

AugmentConfig zeroed() {
  AugmentConfig c;
  c.zoom_range = 0.0;
  c.shear_deg = 0.0;
  c.shift_range = 0.0;
  c.hflip = false;
  return c;
}

Tensor random_image(int h, int w, std::uint64_t seed) {
  Tensor img(h, w, 3);
  auto rng = make_rng(seed);
  for (auto& v : img.values()) {
    v = uniform_real(rng, 0.0, 1.0);
  }
  return img;
}

std::vector<ImageSample> in_memory_samples(int count, int size) {
  std::vector<ImageSample> samples;
  for (int i = 0; i < count; ++i) {
    ImageSample s;
    s.path = "mem/sample_" + std::to_string(i) + ".png";
    s.label = i % 2 == 0 ? ClassLabel::COVID_POSITIVE
                         : ClassLabel::COVID_NEGATIVE;
    s.pixels = std::make_shared<const Tensor>(
        random_image(size, size, 1000 + static_cast<std::uint64_t>(i)));
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace

TEST_CASE("all ranges zero with hflip off yields the identity transform") {
  auto rng = make_rng(1);
  const AffineTransform t = sample_transform(zeroed(), rng, 16, 16);
  CHECK(t.is_identity());
}

TEST_CASE("transform sampling is deterministic under a fixed seed") {
  auto a = make_rng(7);
  auto b = make_rng(7);
  AugmentConfig cfg;  // defaults: all ranges active
  const AffineTransform ta = sample_transform(cfg, a, 32, 32);
  const AffineTransform tb = sample_transform(cfg, b, 32, 32);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(ta.m[i][j] == tb.m[i][j]);
    }
  }
}

TEST_CASE("zoom factors follow the stated uniform distribution") {
  AugmentConfig cfg = zeroed();
  cfg.zoom_range = 0.2;
  auto rng = make_rng(21);
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const AffineTransform t = sample_transform(cfg, rng, 64, 64);
    // Zoom-only inverse warp has linear part diag(1/z).
    const double z = 1.0 / t.m[0][0];
    CHECK(z >= 0.8);
    CHECK(z <= 1.2);
    CHECK(t.m[0][0] == t.m[1][1]);
    sum += z;
  }
  CHECK(std::abs(sum / draws - 1.0) < 0.01);
}

TEST_CASE("hflip fires about half the time when enabled") {
  AugmentConfig cfg = zeroed();
  cfg.hflip = true;
  auto rng = make_rng(33);
  int flips = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const AffineTransform t = sample_transform(cfg, rng, 64, 64);
    if (t.m[0][0] < 0.0) {
      ++flips;
    }
  }
  CHECK(flips > static_cast<int>(draws * 0.45));
  CHECK(flips < static_cast<int>(draws * 0.55));
}

TEST_CASE("identity transform returns the input exactly") {
  const Tensor img = random_image(9, 7, 4);
  const Tensor out =
      apply_affine(img, AffineTransform::identity(), FillPolicy::NearestEdge);
  CHECK(out == img);
}

TEST_CASE("horizontal flip swaps columns") {
  Tensor img(2, 2, 1);
  img.at(0, 0, 0) = 0.1;  // a
  img.at(0, 1, 0) = 0.2;  // b
  img.at(1, 0, 0) = 0.3;  // c
  img.at(1, 1, 0) = 0.4;  // d
  const AffineTransform flip = make_transform(1.0, 0.0, 0.0, 0.0, true, 2, 2);
  const Tensor out = apply_affine(img, flip, FillPolicy::NearestEdge);
  CHECK(out.at(0, 0, 0) == 0.2);
  CHECK(out.at(0, 1, 0) == 0.1);
  CHECK(out.at(1, 0, 0) == 0.4);
  CHECK(out.at(1, 1, 0) == 0.3);
}

TEST_CASE("double horizontal flip is a bit-exact involution") {
  const Tensor img = random_image(13, 17, 5);
  const AffineTransform flip =
      make_transform(1.0, 0.0, 0.0, 0.0, true, 17, 13);
  const Tensor once = apply_affine(img, flip, FillPolicy::NearestEdge);
  const Tensor twice = apply_affine(once, flip, FillPolicy::NearestEdge);
  CHECK(twice == img);
}

TEST_CASE("one-pixel right shift matches the inverse-warp oracle") {
  Tensor ramp(3, 3, 1);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) {
      ramp.at(y, x, 0) = (3 * y + x) / 10.0;
    }
  }
  const AffineTransform shift =
      make_transform(1.0, 0.0, 1.0, 0.0, false, 3, 3);
  const Tensor out = apply_affine(ramp, shift, FillPolicy::NearestEdge);
  // Independent oracle: out(y,x) samples input at x-1, clamped at the edge.
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) {
      const int sx = std::max(x - 1, 0);
      CHECK(out.at(y, x, 0) == doctest::Approx(ramp.at(y, sx, 0)));
    }
  }
}

TEST_CASE("constant fill supplies the configured value outside the image") {
  Tensor img(3, 3, 1);
  for (auto& v : img.values()) {
    v = 1.0;
  }
  const AffineTransform shift =
      make_transform(1.0, 0.0, 2.0, 0.0, false, 3, 3);
  const Tensor out = apply_affine(img, shift, FillPolicy::Constant, 0.25);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.25));
  CHECK(out.at(0, 2, 0) == doctest::Approx(1.0));
}

TEST_CASE("outputs stay in [0,1] under random transforms") {
  AugmentConfig cfg;  // defaults exercise every component
  cfg.seed = 9;
  auto rng = make_rng(cfg.seed);
  const Tensor img = random_image(24, 24, 6);
  for (int i = 0; i < 100; ++i) {
    const AffineTransform t = sample_transform(cfg, rng, 24, 24);
    const Tensor out = apply_affine(img, t, cfg.fill, cfg.fill_value);
    for (const double v : out.values()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("singular transforms are rejected") {
  AffineTransform t = AffineTransform::identity();
  t.m[0][0] = 0.0;
  t.m[1][1] = 0.0;
  const Tensor img = random_image(4, 4, 8);
  CHECK_THROWS_AS(apply_affine(img, t, FillPolicy::NearestEdge),
                  SingularTransform);
  CHECK_THROWS_AS(make_transform(0.0, 0.0, 0.0, 0.0, false, 4, 4),
                  SingularTransform);
}

TEST_CASE("558 samples at batch 32 yield 18 batches per epoch") {
  BatchStream stream(in_memory_samples(558, 4), zeroed(), 32, 4, 4);
  CHECK(stream.batches_per_epoch() == 18);
  int batches = 0;
  int total = 0;
  int last_size = 0;
  for (auto it = stream.epoch(0); !it.done();) {
    const Batch b = it.next();
    ++batches;
    total += b.size();
    last_size = b.size();
  }
  CHECK(batches == 18);
  CHECK(total == 558);
  CHECK(last_size == 14);  // 17 x 32 + 14
}

TEST_CASE("zero-range batches reproduce the unaugmented images") {
  auto samples = in_memory_samples(6, 5);
  BatchStream stream(samples, zeroed(), 3, 5, 5);
  for (auto it = stream.epoch(0); !it.done();) {
    const Batch b = it.next();
    for (int i = 0; i < b.size(); ++i) {
      CHECK(b.images[i] == *samples[b.sample_indices[i]].pixels);
      CHECK(b.targets[i] ==
            target_of(samples[b.sample_indices[i]].label));
    }
  }
}

TEST_CASE("epochs reshuffle but cover the same multiset of samples") {
  AugmentConfig cfg = zeroed();
  cfg.seed = 12;
  BatchStream stream(in_memory_samples(64, 4), cfg, 8, 4, 4);
  auto epoch_order = [&](int e) {
    std::vector<std::size_t> order;
    for (auto it = stream.epoch(e); !it.done();) {
      const Batch b = it.next();
      order.insert(order.end(), b.sample_indices.begin(),
                   b.sample_indices.end());
    }
    return order;
  };
  const auto e0 = epoch_order(0);
  const auto e1 = epoch_order(1);
  CHECK(e0 != e1);  // different permutation
  auto s0 = e0;
  auto s1 = e1;
  std::sort(s0.begin(), s0.end());
  std::sort(s1.begin(), s1.end());
  std::vector<std::size_t> everyone(64);
  std::iota(everyone.begin(), everyone.end(), 0);
  CHECK(s0 == everyone);  // every sample exactly once
  CHECK(s1 == everyone);
}

TEST_CASE("the augmented stream is a pure function of samples and seed") {
  AugmentConfig cfg;
  cfg.seed = 77;
  auto samples = in_memory_samples(10, 6);
  BatchStream a(samples, cfg, 4, 6, 6);
  BatchStream b(samples, cfg, 4, 6, 6);
  for (int e = 0; e < 2; ++e) {
    auto ia = a.epoch(e);
    auto ib = b.epoch(e);
    while (!ia.done()) {
      REQUIRE_FALSE(ib.done());
      const Batch ba = ia.next();
      const Batch bb = ib.next();
      REQUIRE(ba.size() == bb.size());
      for (int i = 0; i < ba.size(); ++i) {
        CHECK(ba.images[i] == bb.images[i]);
        CHECK(ba.targets[i] == bb.targets[i]);
      }
    }
    CHECK(ib.done());
  }
}

TEST_CASE("empty sample lists and bad configs are rejected") {
  CHECK_THROWS_AS(BatchStream({}, zeroed(), 4, 4, 4), EmptyDataset);
  CHECK_THROWS_AS(BatchStream(in_memory_samples(4, 4), zeroed(), 0, 4, 4),
                  ConfigError);
  AugmentConfig bad;
  bad.zoom_range = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  AugmentConfig negative;
  negative.shear_deg = -1.0;
  CHECK_THROWS_AS(negative.validate(), ConfigError);
}
