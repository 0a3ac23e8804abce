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

#ifndef MINPAINT_FACE_PARSING_H_
#define MINPAINT_FACE_PARSING_H_

#include <map>
#include <memory>
#include <opencv2/imgcodecs.hpp>
#include <set>
#include <stdexcept>
#include <string>

#include "minpaint/image.h"

namespace minpaint {

// Face-parsing taxonomy. Values are also the on-disk label encoding for
// precomputed parsing maps (8-bit PNG, one label per pixel).
enum class FaceClass : int {
  kBackground = 0,
  kSkin = 1,
  kLeftBrow = 2,
  kRightBrow = 3,
  kLeftEye = 4,
  kRightEye = 5,
  kEyeglasses = 6,
  kNose = 7,
  kUpperLip = 8,
  kLowerLip = 9,
  kInnerMouth = 10,
  kHair = 11,
  kNeck = 12,
  kEar = 13,
  kClothing = 14,
};
inline constexpr int kNumFaceClasses = 15;

inline bool ValidFaceClass(int v) { return v >= 0 && v < kNumFaceClasses; }

// Per-pixel labels for one image.
struct ParsingMap {
  std::vector<int> labels;
  int64_t height = 0, width = 0;

  int& at(int64_t y, int64_t x) { return labels[y * width + x]; }
  int at(int64_t y, int64_t x) const { return labels[y * width + x]; }

  bool Valid() const {
    for (int v : labels)
      if (!ValidFaceClass(v)) return false;
    return true;
  }
  std::map<int, int64_t> Histogram() const {
    std::map<int, int64_t> h;
    for (int v : labels) ++h[v];
    return h;
  }
};

// Which parse classes become mask value 1. Hair, neck, background and
// clothing are never makeup targets.
struct MakeupRegionPolicy {
  std::set<FaceClass> include;

  static MakeupRegionPolicy Default() {
    return MakeupRegionPolicy{{FaceClass::kSkin, FaceClass::kLeftBrow,
                               FaceClass::kRightBrow, FaceClass::kLeftEye,
                               FaceClass::kRightEye, FaceClass::kNose,
                               FaceClass::kUpperLip, FaceClass::kLowerLip,
                               FaceClass::kInnerMouth, FaceClass::kEar}};
  }

  void Validate() const {
    if (include.empty())
      throw std::invalid_argument("MakeupRegionPolicy: empty include set");
    for (FaceClass c : {FaceClass::kHair, FaceClass::kNeck,
                        FaceClass::kBackground, FaceClass::kClothing})
      if (include.count(c))
        throw std::invalid_argument(
            "MakeupRegionPolicy: hair/neck/background/clothing cannot be makeup targets");
  }

  MakeupRegionPolicy Union(const MakeupRegionPolicy& o) const {
    MakeupRegionPolicy p = *this;
    p.include.insert(o.include.begin(), o.include.end());
    return p;
  }
};

// Adapter seam for the face parser. Implementations must be safe for
// concurrent read-only calls or say otherwise via Serial().
class FaceParser {
 public:
  virtual ~FaceParser() = default;
  virtual ParsingMap Parse(const Image& image) const = 0;
  virtual std::string Name() const = 0;
  virtual bool Serial() const { return false; }
};

// Heuristic parser: a centered ellipse of skin on background. Enough to run
// the whole pipeline offline and to force a known mask in tests.
class EllipseParser : public FaceParser {
 public:
  EllipseParser(real rx = 0.32, real ry = 0.42) : rx_(rx), ry_(ry) {}

  ParsingMap Parse(const Image& image) const override {
    ParsingMap p;
    p.height = image.height();
    p.width = image.width();
    p.labels.assign(p.height * p.width, static_cast<int>(FaceClass::kBackground));
    const real cy = (p.height - 1) / real(2), cx = (p.width - 1) / real(2);
    const real ay = ry_ * p.height, ax = rx_ * p.width;
    for (int64_t y = 0; y < p.height; ++y)
      for (int64_t x = 0; x < p.width; ++x) {
        real dy = (y - cy) / ay, dx = (x - cx) / ax;
        if (dy * dy + dx * dx <= 1)
          p.at(y, x) = static_cast<int>(FaceClass::kSkin);
      }
    return p;
  }
  std::string Name() const override { return "ellipse"; }

 private:
  real rx_, ry_;
};

// Constant-label parser for tests.
class StubParser : public FaceParser {
 public:
  explicit StubParser(FaceClass label = FaceClass::kBackground) : label_(label) {}
  ParsingMap Parse(const Image& image) const override {
    ParsingMap p;
    p.height = image.height();
    p.width = image.width();
    p.labels.assign(p.height * p.width, static_cast<int>(label_));
    return p;
  }
  std::string Name() const override { return "stub"; }

 private:
  FaceClass label_;
};

// Consumes label maps produced offline by an external segmentation model
// (e.g. a BiSeNet run); asset_dir holds `<id>.png` files in the taxonomy
// encoding above. The id is threaded through via SetCurrentId.
class PrecomputedParser : public FaceParser {
 public:
  explicit PrecomputedParser(std::string asset_dir) : dir_(std::move(asset_dir)) {}

  void SetCurrentId(const std::string& id) { id_ = id; }

  ParsingMap Parse(const Image& image) const override {
    const std::string path = dir_ + "/" + id_ + ".png";
    cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (m.empty())
      throw std::runtime_error("precomputed parsing map missing: " + path);
    if (m.rows != image.height() || m.cols != image.width())
      throw std::runtime_error("parsing map size mismatch: " + path);
    ParsingMap p;
    p.height = m.rows;
    p.width = m.cols;
    p.labels.resize(p.height * p.width);
    for (int y = 0; y < m.rows; ++y)
      for (int x = 0; x < m.cols; ++x) {
        int v = m.at<uint8_t>(y, x);
        if (!ValidFaceClass(v))
          throw std::runtime_error("invalid face class " + std::to_string(v) +
                                   " in " + path);
        p.at(y, x) = v;
      }
    return p;
  }
  std::string Name() const override { return "bisenet"; }
  bool Serial() const override { return true; }  // mutable current-id state

 private:
  std::string dir_;
  std::string id_;
};

inline ParsingMap ParseFace(const Image& image, const FaceParser& parser) {
  ParsingMap p = parser.Parse(image);
  if (p.height != image.height() || p.width != image.width())
    throw std::runtime_error("parser '" + parser.Name() + "' returned wrong dims");
  if (!p.Valid())
    throw std::runtime_error("parser '" + parser.Name() + "' returned invalid labels");
  return p;
}

// mask = 1 exactly where label is in policy.include.
inline RoiMask BuildRoiMask(const ParsingMap& parsing,
                            const MakeupRegionPolicy& policy) {
  policy.Validate();
  RoiMask mask(parsing.height, parsing.width);
  for (int64_t y = 0; y < parsing.height; ++y)
    for (int64_t x = 0; x < parsing.width; ++x)
      mask.at(y, x) =
          policy.include.count(static_cast<FaceClass>(parsing.at(y, x))) ? 1 : 0;
  return mask;
}

inline std::shared_ptr<FaceParser> MakeParser(const std::string& name,
                                              const std::string& asset_dir) {
  if (name == "ellipse") return std::make_shared<EllipseParser>();
  if (name == "stub") return std::make_shared<StubParser>();
  if (name == "bisenet") {
    if (asset_dir.empty())
      throw std::invalid_argument("parser 'bisenet' needs parser_assets (precomputed label maps)");
    return std::make_shared<PrecomputedParser>(asset_dir);
  }
  throw std::invalid_argument("unknown parser: " + name);
}

}  // namespace minpaint

#endif  // MINPAINT_FACE_PARSING_H_
