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

#ifndef MINPAINT_COMPOSITING_H_
#define MINPAINT_COMPOSITING_H_

#include <stdexcept>
#include <utility>

#include "minpaint/image.h"

namespace minpaint {

// Four-channel network conditioning input: channels 0-2 the composited bare
// face, channel 3 the binary mask.
struct NetworkInput {
  Tensor chw;  // [4, H, W]

  int64_t height() const { return chw.dim(1); }
  int64_t width() const { return chw.dim(2); }
};

namespace detail {

// Hard binary per-pixel select: mask=1 -> fg, mask=0 -> bg. Non-selected
// pixels are copied bit-exactly from bg.
inline Image BlendByMask(const Image& fg, const Image& bg, const RoiMask& mask) {
  if (fg.height() != bg.height() || fg.width() != bg.width() ||
      mask.height() != fg.height() || mask.width() != fg.width())
    throw std::invalid_argument("BlendByMask: shape mismatch");
  if (!mask.Binary()) throw std::invalid_argument("BlendByMask: mask not binary");
  Image out(fg.height(), fg.width());
  for (int c = 0; c < 3; ++c)
    for (int64_t y = 0; y < fg.height(); ++y)
      for (int64_t x = 0; x < fg.width(); ++x)
        out.at(c, y, x) = mask.at(y, x) == 1 ? fg.at(c, y, x) : bg.at(c, y, x);
  return out;
}

}  // namespace detail

// N = N' x M + I_D x (1 - M): paste the makeup-removed face into the source,
// keeping everything outside the mask identical to the source.
inline Image ComposeBare(const Image& n_prime, const Image& source,
                         const RoiMask& mask) {
  return detail::BlendByMask(n_prime, source, mask);
}

// I_output = I_pred x M + I_D x (1 - M). Same select as ComposeBare; kept as
// a distinct entry point because it sits at the other end of the pipeline.
inline Image CompositeOutput(const Image& pred, const Image& source,
                             const RoiMask& mask) {
  return detail::BlendByMask(pred, source, mask);
}

// I = concat(N, M).
inline NetworkInput AssembleInput(const Image& bare, const RoiMask& mask) {
  if (bare.height() != mask.height() || bare.width() != mask.width())
    throw std::invalid_argument("AssembleInput: shape mismatch");
  const int64_t H = bare.height(), W = bare.width();
  NetworkInput in;
  in.chw = Tensor({4, H, W});
  std::copy_n(bare.chw.data(), 3 * H * W, in.chw.data());
  std::copy_n(mask.hw.data(), H * W, in.chw.data() + 3 * H * W);
  return in;
}

inline std::pair<Image, RoiMask> SplitInput(const NetworkInput& in) {
  const int64_t H = in.height(), W = in.width();
  Image img(H, W);
  RoiMask mask(H, W);
  std::copy_n(in.chw.data(), 3 * H * W, img.chw.data());
  std::copy_n(in.chw.data() + 3 * H * W, H * W, mask.hw.data());
  return {std::move(img), std::move(mask)};
}

}  // namespace minpaint

#endif  // MINPAINT_COMPOSITING_H_
