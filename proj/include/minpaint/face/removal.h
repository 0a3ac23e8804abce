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

#ifndef MINPAINT_FACE_REMOVAL_H_
#define MINPAINT_FACE_REMOVAL_H_

#include <filesystem>
#include <memory>
#include <string>

#include "minpaint/face/parsing.h"
#include "minpaint/image.h"

namespace minpaint {

// Adapter seam for makeup removal (the external style-transfer model is an
// asset; these fallbacks keep everything runnable offline).
class MakeupRemover {
 public:
  virtual ~MakeupRemover() = default;
  virtual Image Remove(const Image& image) const = 0;
  virtual std::string Name() const = 0;
  virtual bool Serial() const { return false; }
};

class IdentityRemover : public MakeupRemover {
 public:
  Image Remove(const Image& image) const override { return image; }
  std::string Name() const override { return "identity"; }
};

// Reads `<asset_dir>/<id>.png` produced by an external removal model.
class PrecomputedRemover : public MakeupRemover {
 public:
  explicit PrecomputedRemover(std::string asset_dir, std::string name = "precomputed")
      : dir_(std::move(asset_dir)), name_(std::move(name)) {}

  void SetCurrentId(const std::string& id) { id_ = id; }

  Image Remove(const Image& image) const override {
    const std::string path = dir_ + "/" + id_ + ".png";
    if (!std::filesystem::exists(path))
      throw std::runtime_error("precomputed bare face missing: " + path);
    Image bare = LoadImage(path);
    if (bare.height() != image.height() || bare.width() != image.width())
      bare = ResizeBilinear(bare, image.height(), image.width());
    return bare;
  }
  std::string Name() const override { return name_; }
  bool Serial() const override { return true; }

 private:
  std::string dir_, name_;
  std::string id_;
};

// Deterministic heuristic remover: box-smooth and desaturate the strongly
// colored parse regions (lips, eyes, brows). Not a faithful makeup removal,
// but it strictly reduces color variance inside those regions, which is all
// the training pipeline needs from a fallback.
class ColorFlattenRemover : public MakeupRemover {
 public:
  explicit ColorFlattenRemover(std::shared_ptr<FaceParser> parser,
                               int radius = 3, real desaturate = 0.6)
      : parser_(std::move(parser)), radius_(radius), desat_(desaturate) {}

  Image Remove(const Image& image) const override {
    ParsingMap parsing = ParseFace(image, *parser_);
    static const std::set<FaceClass> kFlattened = {
        FaceClass::kUpperLip, FaceClass::kLowerLip, FaceClass::kInnerMouth,
        FaceClass::kLeftEye,  FaceClass::kRightEye, FaceClass::kLeftBrow,
        FaceClass::kRightBrow, FaceClass::kSkin};
    Image out = image;
    const int64_t H = image.height(), W = image.width();
    for (int64_t y = 0; y < H; ++y)
      for (int64_t x = 0; x < W; ++x) {
        if (!kFlattened.count(static_cast<FaceClass>(parsing.at(y, x)))) continue;
        real mean[3] = {0, 0, 0};
        int64_t cnt = 0;
        for (int64_t dy = -radius_; dy <= radius_; ++dy)
          for (int64_t dx = -radius_; dx <= radius_; ++dx) {
            int64_t yy = y + dy, xx = x + dx;
            if (yy < 0 || yy >= H || xx < 0 || xx >= W) continue;
            for (int c = 0; c < 3; ++c) mean[c] += image.at(c, yy, xx);
            ++cnt;
          }
        for (int c = 0; c < 3; ++c) mean[c] /= cnt;
        real luma = (mean[0] + mean[1] + mean[2]) / 3;
        for (int c = 0; c < 3; ++c)
          out.at(c, y, x) = std::clamp(luma + (1 - desat_) * (mean[c] - luma),
                                       real(-1), real(1));
      }
    return out;
  }
  std::string Name() const override { return "flatten"; }

 private:
  std::shared_ptr<FaceParser> parser_;
  int radius_;
  real desat_;
};

inline Image RemoveMakeup(const Image& image, const MakeupRemover& remover) {
  Image bare = remover.Remove(image);
  if (bare.height() != image.height() || bare.width() != image.width())
    throw std::runtime_error("remover '" + remover.Name() +
                             "' changed spatial dims (contract violation)");
  if (!bare.Canonical())
    throw std::runtime_error("remover '" + remover.Name() +
                             "' left the canonical range");
  return bare;
}

inline std::shared_ptr<MakeupRemover> MakeRemover(
    const std::string& name, const std::string& asset_dir,
    const std::shared_ptr<FaceParser>& parser) {
  if (name == "identity") return std::make_shared<IdentityRemover>();
  if (name == "flatten") return std::make_shared<ColorFlattenRemover>(parser);
  if (name == "precomputed" || name == "ladn") {
    if (asset_dir.empty())
      throw std::invalid_argument("remover '" + name +
                                  "' needs remover_assets (precomputed bare faces)");
    return std::make_shared<PrecomputedRemover>(asset_dir, name);
  }
  throw std::invalid_argument("unknown remover: " + name);
}

}  // namespace minpaint

#endif  // MINPAINT_FACE_REMOVAL_H_
