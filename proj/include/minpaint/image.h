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

#ifndef MINPAINT_IMAGE_H_
#define MINPAINT_IMAGE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "minpaint/core/tensor.h"

namespace minpaint {

// RGB image in the canonical range [-1, 1], stored planar CHW.
struct Image {
  Tensor chw;  // [3, H, W]

  Image() = default;
  Image(int64_t h, int64_t w) : chw({3, h, w}) {}
  explicit Image(Tensor t) : chw(std::move(t)) {
    if (chw.ndim() != 3 || chw.dim(0) != 3)
      throw std::invalid_argument("Image: expected [3,H,W] tensor");
  }

  int64_t height() const { return chw.dim(1); }
  int64_t width() const { return chw.dim(2); }
  real& at(int c, int64_t y, int64_t x) {
    return chw[(c * height() + y) * width() + x];
  }
  real at(int c, int64_t y, int64_t x) const {
    return chw[(c * height() + y) * width() + x];
  }

  bool Canonical() const {
    for (int64_t i = 0; i < chw.numel(); ++i)
      if (!std::isfinite(chw[i]) || chw[i] < -1 || chw[i] > 1) return false;
    return true;
  }
};

// Binary region-of-interest mask: 1 = makeup target, 0 = untouched.
struct RoiMask {
  Tensor hw;  // [H, W], values in {0, 1}

  RoiMask() = default;
  RoiMask(int64_t h, int64_t w) : hw({h, w}) {}
  explicit RoiMask(Tensor t) : hw(std::move(t)) {
    if (hw.ndim() != 2) throw std::invalid_argument("RoiMask: expected [H,W]");
  }

  int64_t height() const { return hw.dim(0); }
  int64_t width() const { return hw.dim(1); }
  real& at(int64_t y, int64_t x) { return hw[y * width() + x]; }
  real at(int64_t y, int64_t x) const { return hw[y * width() + x]; }

  bool Binary() const {
    for (int64_t i = 0; i < hw.numel(); ++i)
      if (hw[i] != 0 && hw[i] != 1) return false;
    return true;
  }
  int64_t CountOnes() const {
    int64_t n = 0;
    for (int64_t i = 0; i < hw.numel(); ++i) n += hw[i] == 1;
    return n;
  }
};

inline real Normalize8(real v) { return v / real(127.5) - real(1); }
inline uint8_t Denormalize8(real v) {
  real x = std::round((std::clamp(v, real(-1), real(1)) + 1) * real(127.5));
  return static_cast<uint8_t>(std::clamp(x, real(0), real(255)));
}

// Reads a PNG/JPEG into the canonical range. Grayscale is replicated to 3
// channels and alpha dropped; `warn` receives a note when that happens.
inline Image LoadImage(const std::string& path,
                       std::vector<std::string>* warnings = nullptr) {
  cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (m.empty()) throw std::runtime_error("cannot read image: " + path);
  if (m.depth() != CV_8U)
    throw std::runtime_error("unsupported bit depth (want 8-bit): " + path);
  if (m.channels() == 1) {
    if (warnings) warnings->push_back(path + ": grayscale input, replicating channels");
    cv::cvtColor(m, m, cv::COLOR_GRAY2BGR);
  } else if (m.channels() == 4) {
    if (warnings) warnings->push_back(path + ": dropping alpha channel");
    cv::cvtColor(m, m, cv::COLOR_BGRA2BGR);
  } else if (m.channels() != 3) {
    throw std::runtime_error("unsupported channel count: " + path);
  }
  Image img(m.rows, m.cols);
  for (int y = 0; y < m.rows; ++y) {
    const cv::Vec3b* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < m.cols; ++x) {
      img.at(0, y, x) = Normalize8(row[x][2]);  // R
      img.at(1, y, x) = Normalize8(row[x][1]);  // G
      img.at(2, y, x) = Normalize8(row[x][0]);  // B
    }
  }
  return img;
}

inline void SaveImage(const Image& img, const std::string& path) {
  cv::Mat m(static_cast<int>(img.height()), static_cast<int>(img.width()), CV_8UC3);
  for (int64_t y = 0; y < img.height(); ++y) {
    cv::Vec3b* row = m.ptr<cv::Vec3b>(static_cast<int>(y));
    for (int64_t x = 0; x < img.width(); ++x) {
      row[x][2] = Denormalize8(img.at(0, y, x));
      row[x][1] = Denormalize8(img.at(1, y, x));
      row[x][0] = Denormalize8(img.at(2, y, x));
    }
  }
  if (!cv::imwrite(path, m))
    throw std::runtime_error("cannot write image: " + path);
}

// Bilinear resize with half-pixel sample centers.
inline Image ResizeBilinear(const Image& src, int64_t oh, int64_t ow) {
  const int64_t ih = src.height(), iw = src.width();
  Image dst(oh, ow);
  for (int64_t y = 0; y < oh; ++y) {
    real sy = (y + real(0.5)) * ih / oh - real(0.5);
    sy = std::clamp(sy, real(0), real(ih - 1));
    int64_t y0 = static_cast<int64_t>(std::floor(sy));
    int64_t y1 = std::min(y0 + 1, ih - 1);
    real fy = sy - y0;
    for (int64_t x = 0; x < ow; ++x) {
      real sx = (x + real(0.5)) * iw / ow - real(0.5);
      sx = std::clamp(sx, real(0), real(iw - 1));
      int64_t x0 = static_cast<int64_t>(std::floor(sx));
      int64_t x1 = std::min(x0 + 1, iw - 1);
      real fx = sx - x0;
      for (int c = 0; c < 3; ++c) {
        real top = src.at(c, y0, x0) * (1 - fx) + src.at(c, y0, x1) * fx;
        real bot = src.at(c, y1, x0) * (1 - fx) + src.at(c, y1, x1) * fx;
        dst.at(c, y, x) = top * (1 - fy) + bot * fy;
      }
    }
  }
  return dst;
}

// Nearest-neighbor resize; the only resize that keeps a mask binary.
inline RoiMask ResizeNearest(const RoiMask& src, int64_t oh, int64_t ow) {
  const int64_t ih = src.height(), iw = src.width();
  RoiMask dst(oh, ow);
  for (int64_t y = 0; y < oh; ++y) {
    int64_t sy = std::min<int64_t>(ih - 1, (y * ih + ih / 2) / oh);
    for (int64_t x = 0; x < ow; ++x) {
      int64_t sx = std::min<int64_t>(iw - 1, (x * iw + iw / 2) / ow);
      dst.at(y, x) = src.at(sy, sx);
    }
  }
  return dst;
}

inline Image FlipHorizontal(const Image& src) {
  Image dst(src.height(), src.width());
  for (int c = 0; c < 3; ++c)
    for (int64_t y = 0; y < src.height(); ++y)
      for (int64_t x = 0; x < src.width(); ++x)
        dst.at(c, y, x) = src.at(c, y, src.width() - 1 - x);
  return dst;
}

inline RoiMask FlipHorizontal(const RoiMask& src) {
  RoiMask dst(src.height(), src.width());
  for (int64_t y = 0; y < src.height(); ++y)
    for (int64_t x = 0; x < src.width(); ++x)
      dst.at(y, x) = src.at(y, src.width() - 1 - x);
  return dst;
}

// 8-bit mask file: 0 or 255 only.
inline RoiMask LoadMask(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw std::runtime_error("cannot read mask: " + path);
  RoiMask mask(m.rows, m.cols);
  for (int y = 0; y < m.rows; ++y) {
    const uint8_t* row = m.ptr<uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      if (row[x] == 0)
        mask.at(y, x) = 0;
      else if (row[x] == 255)
        mask.at(y, x) = 1;
      else
        throw std::runtime_error("mask not binary (found value " +
                                 std::to_string(int(row[x])) + "): " + path);
    }
  }
  return mask;
}

inline void SaveMask(const RoiMask& mask, const std::string& path) {
  cv::Mat m(static_cast<int>(mask.height()), static_cast<int>(mask.width()), CV_8UC1);
  for (int64_t y = 0; y < mask.height(); ++y) {
    uint8_t* row = m.ptr<uint8_t>(static_cast<int>(y));
    for (int64_t x = 0; x < mask.width(); ++x)
      row[x] = mask.at(y, x) == 1 ? 255 : 0;
  }
  if (!cv::imwrite(path, m))
    throw std::runtime_error("cannot write mask: " + path);
}

}  // namespace minpaint

#endif  // MINPAINT_IMAGE_H_
