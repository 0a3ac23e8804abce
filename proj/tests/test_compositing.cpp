// Copyright 2026 The Minpaint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "minpaint/compositing.h"
#include "test_util.h"

using namespace minpaint;
using testutil::RandomImage;
using testutil::RandomMask;

namespace {

// Independent per-pixel oracle for the binary select.
Image OracleBlend(const Image& fg, const Image& bg, const RoiMask& m) {
  Image out(fg.height(), fg.width());
  for (int c = 0; c < 3; ++c)
    for (int64_t y = 0; y < fg.height(); ++y)
      for (int64_t x = 0; x < fg.width(); ++x)
        out.at(c, y, x) = m.at(y, x) * fg.at(c, y, x) +
                          (1 - m.at(y, x)) * bg.at(c, y, x);
  return out;
}

}  // namespace

TEST_CASE("compose/composite match the per-pixel oracle bit-exactly") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Image fg = RandomImage(rng, 16, 16), bg = RandomImage(rng, 16, 16);
    RoiMask m = RandomMask(rng, 16, 16);
    Image want = OracleBlend(fg, bg, m);
    Image bare = ComposeBare(fg, bg, m);
    Image out = CompositeOutput(fg, bg, m);
    for (int64_t i = 0; i < want.chw.numel(); ++i) {
      REQUIRE(bare.chw[i] == want.chw[i]);
      REQUIRE(out.chw[i] == want.chw[i]);
    }
  }
}

TEST_CASE("pixels outside the mask are copied from the background, not recomputed") {
  Rng rng(22);
  Image fg = RandomImage(rng, 8, 8), bg = RandomImage(rng, 8, 8);
  // awkward values that would change under any arithmetic blend
  bg.at(0, 3, 3) = std::nextafter(real(0.3), real(1));
  RoiMask m(8, 8);  // all zeros
  Image out = CompositeOutput(fg, bg, m);
  for (int64_t i = 0; i < out.chw.numel(); ++i) REQUIRE(out.chw[i] == bg.chw[i]);
}

TEST_CASE("all-ones mask takes every pixel from the foreground") {
  Rng rng(23);
  Image fg = RandomImage(rng, 8, 8), bg = RandomImage(rng, 8, 8);
  RoiMask m(8, 8);
  for (int64_t i = 0; i < m.hw.numel(); ++i) m.hw[i] = 1;
  Image out = ComposeBare(fg, bg, m);
  for (int64_t i = 0; i < out.chw.numel(); ++i) REQUIRE(out.chw[i] == fg.chw[i]);
}

TEST_CASE("non-binary masks and shape mismatches are rejected") {
  Rng rng(24);
  Image fg = RandomImage(rng, 8, 8), bg = RandomImage(rng, 8, 8);
  RoiMask m(8, 8);
  m.hw[5] = 0.5;
  CHECK_THROWS(ComposeBare(fg, bg, m));
  RoiMask wrong(4, 8);
  CHECK_THROWS(ComposeBare(fg, bg, wrong));
  Image small = RandomImage(rng, 4, 4);
  RoiMask ok(8, 8);
  CHECK_THROWS(ComposeBare(small, bg, ok));
}

TEST_CASE("assemble/split round-trips the four-channel input") {
  Rng rng(25);
  Image img = RandomImage(rng, 12, 10);
  RoiMask m = RandomMask(rng, 12, 10);
  NetworkInput in = AssembleInput(img, m);
  CHECK(in.chw.dim(0) == 4);
  CHECK(in.height() == 12);
  CHECK(in.width() == 10);
  // channel 3 is exactly the mask
  for (int64_t i = 0; i < m.hw.numel(); ++i)
    REQUIRE(in.chw[3 * 12 * 10 + i] == m.hw[i]);
  auto [img2, m2] = SplitInput(in);
  for (int64_t i = 0; i < img.chw.numel(); ++i) REQUIRE(img2.chw[i] == img.chw[i]);
  for (int64_t i = 0; i < m.hw.numel(); ++i) REQUIRE(m2.hw[i] == m.hw[i]);
}

TEST_CASE("composition is idempotent: applying the select twice changes nothing") {
  Rng rng(26);
  Image fg = RandomImage(rng, 8, 8), bg = RandomImage(rng, 8, 8);
  RoiMask m = RandomMask(rng, 8, 8);
  Image once = CompositeOutput(fg, bg, m);
  Image twice = CompositeOutput(once, bg, m);
  for (int64_t i = 0; i < once.chw.numel(); ++i) REQUIRE(twice.chw[i] == once.chw[i]);
}
