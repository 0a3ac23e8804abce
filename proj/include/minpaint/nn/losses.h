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

#ifndef MINPAINT_NN_LOSSES_H_
#define MINPAINT_NN_LOSSES_H_

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "minpaint/core/autograd.h"
#include "minpaint/core/rng.h"

namespace minpaint {

struct LossWeights {
  real lambda_rec = 10.0;
  real lambda_hrfpl = 5.0;

  void Validate() const {
    if (lambda_rec < 0 || lambda_hrfpl < 0)
      throw std::invalid_argument("loss weights must be >= 0");
  }
};

struct LossBundle {
  real adv = 0;
  real hrfpl = 0;
  real rec = 0;
  real total = 0;

  bool Consistent(const LossWeights& w, real tol = 1e-6) const {
    return std::abs(total - (adv + w.lambda_hrfpl * hrfpl + w.lambda_rec * rec)) <= tol;
  }
};

// Non-saturating generator objective: mean softplus(-logit).
inline Value AdvLossGenerator(const Value& fake_logits) {
  return MeanAll(Softplus(Scale(fake_logits, -1)));
}

// mean softplus(-real) + mean softplus(fake).
inline Value AdvLossDiscriminator(const Value& real_logits, const Value& fake_logits) {
  return Add(MeanAll(Softplus(Scale(real_logits, -1))),
             MeanAll(Softplus(fake_logits)));
}

// Pixel-wise L1, mean reduction.
inline Value RecLoss(const Value& output, const Value& target) {
  return MeanAll(Abs(Sub(output, target)));
}

// Feature extractor behind the perceptual loss. Gradients flow through to
// the images; the extractor's own weights are frozen constants.
class FeatureAdapter {
 public:
  virtual ~FeatureAdapter() = default;
  virtual Value Features(const Value& images) const = 0;
  virtual std::string Name() const = 0;
};

class IdentityFeatures : public FeatureAdapter {
 public:
  Value Features(const Value& images) const override { return images; }
  std::string Name() const override { return "identity"; }
};

// Frozen randomly-initialized dilated conv stack with a fixed seed. The
// growing dilation gives the wide receptive field; random frozen features
// are still a usable perceptual metric for desk-scale runs.
class FrozenRandomFeatures : public FeatureAdapter {
 public:
  explicit FrozenRandomFeatures(uint64_t seed = 7) {
    Rng rng(MixSeed(seed, "hrfpl"));
    int64_t ci = 3;
    for (int i = 0; i < 4; ++i) {
      const int64_t co = i < 2 ? 16 : 32;
      const int dilation = 1 << i;
      weights_.push_back(
          Constant(rng.NormalTensor({co, ci, 3, 3}, std::sqrt(real(2) / real(ci * 9)))));
      specs_.push_back(ConvSpec{1, dilation, dilation});
      ci = co;
    }
  }

  Value Features(const Value& images) const override {
    Value x = images;
    for (size_t i = 0; i < weights_.size(); ++i)
      x = LeakyRelu(Conv2d(x, weights_[i], nullptr, specs_[i]));
    return x;
  }
  std::string Name() const override { return "frozen_random"; }

 private:
  std::vector<Value> weights_;
  std::vector<ConvSpec> specs_;
};

inline std::shared_ptr<FeatureAdapter> MakeFeatureAdapter(const std::string& name,
                                                          uint64_t seed) {
  if (name == "identity") return std::make_shared<IdentityFeatures>();
  if (name == "frozen_random") return std::make_shared<FrozenRandomFeatures>(seed);
  throw std::invalid_argument("unknown hrfpl feature adapter: " + name);
}

// Mean squared distance in feature space.
inline Value HrfplLoss(const Value& output, const Value& target,
                       const FeatureAdapter& feat) {
  return MeanAll(Square(Sub(feat.Features(output), feat.Features(target))));
}

// total = adv + lambda_hrfpl * hrfpl + lambda_rec * rec.
inline Value TotalLoss(const Value& adv, const Value& hrfpl, const Value& rec,
                       const LossWeights& w) {
  w.Validate();
  return Add(adv, Add(Scale(hrfpl, w.lambda_hrfpl), Scale(rec, w.lambda_rec)));
}

inline LossBundle BundleOf(const Value& adv, const Value& hrfpl, const Value& rec,
                           const LossWeights& w) {
  LossBundle b;
  b.adv = adv->val[0];
  b.hrfpl = hrfpl->val[0];
  b.rec = rec->val[0];
  b.total = b.adv + w.lambda_hrfpl * b.hrfpl + w.lambda_rec * b.rec;
  return b;
}

}  // namespace minpaint

#endif  // MINPAINT_NN_LOSSES_H_
