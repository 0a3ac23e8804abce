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

#ifndef MINPAINT_NN_DISCRIMINATOR_H_
#define MINPAINT_NN_DISCRIMINATOR_H_

#include <string>
#include <vector>

#include "minpaint/nn/generator.h"
#include "minpaint/nn/modules.h"

namespace minpaint {

// Strided-conv critic mirroring the generator's encoder schedule; scalar
// logit per image.
class Discriminator {
 public:
  explicit Discriminator(GeneratorConfig cfg) : cfg_(cfg) {
    cfg_.Validate();
    in_ = ConvLayer::Make(store_, "disc.in", 3, cfg_.Channels(cfg_.resolution), 3,
                          {1, 1, 1}, MixSeed(cfg_.seed, "disc"));
    for (int res = cfg_.resolution; res > 4; res /= 2)
      down_.push_back(ConvLayer::Make(
          store_, "disc.down" + std::to_string(res), ChannelsAt(res),
          ChannelsAt(res / 2), 3, {2, 1, 1}, MixSeed(cfg_.seed, "disc")));
    head_ = Dense::Make(store_, "disc.head", ChannelsAt(4) * 4 * 4, 1,
                        MixSeed(cfg_.seed, "disc"));
  }

  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }

  // [N,3,R,R] -> [N,1] logits.
  Value Logits(const Value& x) const {
    CheckInput(x->val);
    Value h = LeakyRelu(in_.Apply(x));
    for (const auto& d : down_) h = LeakyRelu(d.Apply(h));
    const int64_t N = h->val.dim(0);
    return head_.Apply(Reshape(h, {N, h->val.numel() / N}));
  }

  // Builds d(logit)/d(input) as a graph over the conv weights, with the
  // leaky-relu derivative masks frozen at the forward activations (exact
  // a.e. for a piecewise-linear critic). Feeding the result into a squared
  // penalty yields a correct first-order R1 gradient for the weights.
  Value InputGradGraph(const Tensor& x) const {
    CheckInput(x);
    const real slope = 0.2;
    std::vector<Tensor> inputs;       // activation entering each conv
    std::vector<Tensor> deriv_masks;  // leaky-relu derivative after each conv
    Tensor cur = x;
    auto run_layer = [&](const ConvLayer& l) {
      inputs.push_back(cur);
      Tensor pre = ConvForwardCore(cur, l.w->val, l.b->val, l.cs);
      Tensor mask(pre.shape());
      for (int64_t i = 0; i < pre.numel(); ++i) {
        mask[i] = pre[i] < 0 ? slope : 1;
        if (pre[i] < 0) pre[i] *= slope;
      }
      deriv_masks.push_back(std::move(mask));
      cur = std::move(pre);
    };
    run_layer(in_);
    for (const auto& d : down_) run_layer(d);

    const int64_t N = x.dim(0);
    // d logit / d flat(features) is the head weight row, per sample.
    Value g = Reshape(TileRows(head_.w, N),
                      {N, cur.dim(1), cur.dim(2), cur.dim(3)});
    for (int64_t i = static_cast<int64_t>(down_.size()); i >= 0; --i) {
      const ConvLayer& l = i == 0 ? in_ : down_[i - 1];
      g = MulConst(g, deriv_masks[i]);
      g = ConvInputGrad(g, l.w, l.cs, inputs[i].dim(2), inputs[i].dim(3));
    }
    return g;
  }

  // (gamma/2) * E_n[ sum_pixels (d logit_n / d x_n)^2 ].
  Value R1Penalty(const Tensor& real_images, real gamma) const {
    Value g = InputGradGraph(real_images);
    const int64_t N = real_images.dim(0);
    return Scale(SumAll(Square(g)), gamma / (2 * real(N)));
  }

 private:
  int64_t ChannelsAt(int res) const {
    // extend the generator schedule below its base resolution
    int64_t c = static_cast<int64_t>(cfg_.base_channels) * cfg_.resolution / res;
    return std::min<int64_t>(c, cfg_.max_channels);
  }
  void CheckInput(const Tensor& x) const {
    if (x.ndim() != 4 || x.dim(1) != 3 || x.dim(2) != cfg_.resolution ||
        x.dim(3) != cfg_.resolution)
      throw std::invalid_argument("discriminate: want [N,3," +
                                  std::to_string(cfg_.resolution) + "," +
                                  std::to_string(cfg_.resolution) + "], got " +
                                  x.ShapeStr());
  }

  GeneratorConfig cfg_;
  ParamStore store_;
  ConvLayer in_;
  std::vector<ConvLayer> down_;
  Dense head_;
};

}  // namespace minpaint

#endif  // MINPAINT_NN_DISCRIMINATOR_H_
