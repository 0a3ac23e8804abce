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

#ifndef MINPAINT_EVAL_EMBEDDERS_H_
#define MINPAINT_EVAL_EMBEDDERS_H_

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "minpaint/core/rng.h"
#include "minpaint/image.h"

namespace minpaint {

// Maps an image to a feature vector. Pretrained embedding networks are
// external assets consumed through the "precomputed" adapter; the toy
// embedder keeps every metric runnable offline. Reports carry the embedder
// name so numbers are never compared across embedders.
class ImageEmbedder {
 public:
  virtual ~ImageEmbedder() = default;
  virtual std::vector<real> Embed(const Image& image, const std::string& id) const = 0;
  virtual int64_t Dim() const = 0;
  virtual std::string Name() const = 0;
};

// Fixed random projection of a downsampled image. Deterministic for a given
// seed and independent of input resolution.
class ToyEmbedder : public ImageEmbedder {
 public:
  explicit ToyEmbedder(uint64_t seed = 0, int64_t dim = 64, int64_t pool = 16,
                       std::string name = "toy")
      : dim_(dim), pool_(pool), name_(std::move(name)) {
    Rng rng(MixSeed(seed, "embedder/" + name_));
    const int64_t in = 3 * pool_ * pool_;
    proj_ = rng.NormalTensor({dim_, in}, std::sqrt(real(1) / real(in)));
  }

  std::vector<real> Embed(const Image& image, const std::string&) const override {
    Image small = (image.height() == pool_ && image.width() == pool_)
                      ? image
                      : ResizeBilinear(image, pool_, pool_);
    const int64_t in = 3 * pool_ * pool_;
    std::vector<real> out(dim_, 0);
    for (int64_t d = 0; d < dim_; ++d) {
      real acc = 0;
      for (int64_t i = 0; i < in; ++i) acc += proj_[d * in + i] * small.chw[i];
      out[d] = acc;
    }
    return out;
  }
  int64_t Dim() const override { return dim_; }
  std::string Name() const override { return name_; }

 private:
  int64_t dim_, pool_;
  std::string name_;
  Tensor proj_;
};

// Reads `<asset_dir>/<id>.emb`: whitespace-separated floats produced by an
// external embedding network (Inception- or ArcFace-style).
class PrecomputedEmbedder : public ImageEmbedder {
 public:
  PrecomputedEmbedder(std::string asset_dir, int64_t dim, std::string name)
      : dir_(std::move(asset_dir)), dim_(dim), name_(std::move(name)) {}

  std::vector<real> Embed(const Image&, const std::string& id) const override {
    const std::string path = dir_ + "/" + id + ".emb";
    std::ifstream f(path);
    if (!f) throw std::runtime_error("precomputed embedding missing: " + path);
    std::vector<real> out;
    real v;
    while (f >> v) out.push_back(v);
    if (dim_ > 0 && static_cast<int64_t>(out.size()) != dim_)
      throw std::runtime_error("embedding dim mismatch in " + path + ": got " +
                               std::to_string(out.size()) + " want " +
                               std::to_string(dim_));
    return out;
  }
  int64_t Dim() const override { return dim_; }
  std::string Name() const override { return name_; }

 private:
  std::string dir_;
  int64_t dim_;
  std::string name_;
};

inline std::shared_ptr<ImageEmbedder> MakeEmbedder(const std::string& name,
                                                   const std::string& asset_dir,
                                                   uint64_t seed) {
  if (name == "toy") return std::make_shared<ToyEmbedder>(seed);
  if (name == "toy-identity")
    return std::make_shared<ToyEmbedder>(seed, 64, 16, "toy-identity");
  if (name == "inception" || name == "arcface" || name == "precomputed") {
    if (asset_dir.empty())
      throw std::invalid_argument("embedder '" + name +
                                  "' needs an asset directory of .emb files");
    const int64_t dim = name == "inception" ? 2048 : name == "arcface" ? 512 : 0;
    return std::make_shared<PrecomputedEmbedder>(asset_dir, dim, name);
  }
  throw std::invalid_argument("unknown embedder: " + name);
}

}  // namespace minpaint

#endif  // MINPAINT_EVAL_EMBEDDERS_H_
