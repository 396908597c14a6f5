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

#include <string>
#include <vector>

#include "ctcls/arch.hpp"

namespace ctcls {

namespace {

// Builds conv units in the same order as the published reference
// implementation, so the Nth conv/batch-norm pair here corresponds to the
// Nth Conv2D/BatchNormalization layer of an exported pretrained model.
class InceptionBuilder {
 public:
  ArchGraph g;

  int conv_bn(int input, int filters, int kh, int kw, int sh = 1, int sw = 1,
              Padding pad = Padding::Same) {
    const std::string id = std::to_string(conv_count_++);
    const int c = g.add_conv("conv" + id, input, filters, kh, kw, sh, sw, pad);
    const int b = g.add_batchnorm("bn" + id, c);
    return g.add_relu("act" + id, b);
  }

  int maxpool(int input, int k, int stride, Padding pad = Padding::Valid) {
    return g.add_maxpool("pool" + std::to_string(pool_count_++), input, k,
                         stride, pad);
  }

  int avgpool_same(int input) {
    return g.add_avgpool("pool" + std::to_string(pool_count_++), input, 3, 1,
                         Padding::Same);
  }

  int concat_auto(const std::vector<int>& inputs) {
    return g.add_concat("concat" + std::to_string(concat_count_++), inputs);
  }

 private:
  int conv_count_ = 0;
  int pool_count_ = 0;
  int concat_count_ = 0;
};

}  // namespace

ArchGraph build_inception_v3(int input_h, int input_w) {
  InceptionBuilder b;
  b.g.set_arch_name("inception_v3");

  int x = b.g.add_input(input_h, input_w, 3);

  // Stem.
  x = b.conv_bn(x, 32, 3, 3, 2, 2, Padding::Valid);
  x = b.conv_bn(x, 32, 3, 3, 1, 1, Padding::Valid);
  x = b.conv_bn(x, 64, 3, 3);
  x = b.maxpool(x, 3, 2);
  x = b.conv_bn(x, 80, 1, 1, 1, 1, Padding::Valid);
  x = b.conv_bn(x, 192, 3, 3, 1, 1, Padding::Valid);
  x = b.maxpool(x, 3, 2);

  // mixed0..mixed2: 35x35 blocks (pool projection 32, then 64, 64).
  for (int i = 0; i <= 2; ++i) {
    const int pool_proj = (i == 0) ? 32 : 64;
    const int b1 = b.conv_bn(x, 64, 1, 1);
    int b5 = b.conv_bn(x, 48, 1, 1);
    b5 = b.conv_bn(b5, 64, 5, 5);
    int b3 = b.conv_bn(x, 64, 1, 1);
    b3 = b.conv_bn(b3, 96, 3, 3);
    b3 = b.conv_bn(b3, 96, 3, 3);
    const int bp = b.conv_bn(b.avgpool_same(x), pool_proj, 1, 1);
    x = b.g.add_concat("mixed" + std::to_string(i), {b1, b5, b3, bp});
  }

  // mixed3: grid reduction to 17x17.
  {
    const int b3 = b.conv_bn(x, 384, 3, 3, 2, 2, Padding::Valid);
    int b3d = b.conv_bn(x, 64, 1, 1);
    b3d = b.conv_bn(b3d, 96, 3, 3);
    b3d = b.conv_bn(b3d, 96, 3, 3, 2, 2, Padding::Valid);
    const int bp = b.maxpool(x, 3, 2);
    x = b.g.add_concat("mixed3", {b3, b3d, bp});
  }

  // mixed4..mixed7: 17x17 blocks with factorized 7x7 branches.
  for (int i = 4; i <= 7; ++i) {
    const int c7 = (i == 4) ? 128 : (i == 7 ? 192 : 160);
    const int b1 = b.conv_bn(x, 192, 1, 1);
    int b7 = b.conv_bn(x, c7, 1, 1);
    b7 = b.conv_bn(b7, c7, 1, 7);
    b7 = b.conv_bn(b7, 192, 7, 1);
    int b7d = b.conv_bn(x, c7, 1, 1);
    b7d = b.conv_bn(b7d, c7, 7, 1);
    b7d = b.conv_bn(b7d, c7, 1, 7);
    b7d = b.conv_bn(b7d, c7, 7, 1);
    b7d = b.conv_bn(b7d, 192, 1, 7);
    const int bp = b.conv_bn(b.avgpool_same(x), 192, 1, 1);
    x = b.g.add_concat("mixed" + std::to_string(i), {b1, b7, b7d, bp});
  }

  // mixed8: grid reduction to 8x8.
  {
    int b3 = b.conv_bn(x, 192, 1, 1);
    b3 = b.conv_bn(b3, 320, 3, 3, 2, 2, Padding::Valid);
    int b7 = b.conv_bn(x, 192, 1, 1);
    b7 = b.conv_bn(b7, 192, 1, 7);
    b7 = b.conv_bn(b7, 192, 7, 1);
    b7 = b.conv_bn(b7, 192, 3, 3, 2, 2, Padding::Valid);
    const int bp = b.maxpool(x, 3, 2);
    x = b.g.add_concat("mixed8", {b3, b7, bp});
  }

  // mixed9, mixed10: 8x8 blocks with split 3x3 branches.
  for (int i = 0; i <= 1; ++i) {
    const int b1 = b.conv_bn(x, 320, 1, 1);
    const int b3 = b.conv_bn(x, 384, 1, 1);
    const int b3_1 = b.conv_bn(b3, 384, 1, 3);
    const int b3_2 = b.conv_bn(b3, 384, 3, 1);
    const int b3c =
        b.g.add_concat("mixed9_" + std::to_string(i), {b3_1, b3_2});
    int b3d = b.conv_bn(x, 448, 1, 1);
    b3d = b.conv_bn(b3d, 384, 3, 3);
    const int b3d_1 = b.conv_bn(b3d, 384, 1, 3);
    const int b3d_2 = b.conv_bn(b3d, 384, 3, 1);
    const int b3dc = b.concat_auto({b3d_1, b3d_2});
    const int bp = b.conv_bn(b.avgpool_same(x), 192, 1, 1);
    x = b.g.add_concat("mixed" + std::to_string(9 + i), {b1, b3c, b3dc, bp});
  }

  b.g.set_truncation_points({"mixed0", "mixed1", "mixed2", "mixed3", "mixed4",
                             "mixed5", "mixed6", "mixed7", "mixed8", "mixed9",
                             "mixed10"});
  return b.g;
}

}  // namespace ctcls
