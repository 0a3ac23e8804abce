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

#ifndef MINPAINT_NN_GENERATOR_H_
#define MINPAINT_NN_GENERATOR_H_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "minpaint/compositing.h"
#include "minpaint/config.h"
#include "minpaint/nn/modules.h"

namespace minpaint {

struct GeneratorConfig {
  int resolution = 256;
  int z_dim = 512;
  int w_dim = 512;
  int base_resolution = 8;  // bottleneck spatial size
  int base_channels = 32;   // channels at full resolution
  int max_channels = 256;
  int mapping_depth = 8;
  bool global_context = false;  // channel-attention block at the bottleneck
  uint64_t seed = 0;

  static GeneratorConfig FromRun(const RunConfig& rc) {
    GeneratorConfig g;
    g.resolution = rc.resolution;
    g.z_dim = rc.z_dim;
    g.w_dim = rc.w_dim;
    g.base_resolution = rc.base_resolution;
    g.base_channels = rc.base_channels;
    g.max_channels = rc.max_channels;
    g.mapping_depth = rc.mapping_depth;
    g.global_context = rc.global_context;
    g.seed = rc.seed;
    return g;
  }

  // Channels double as resolution halves, capped at max_channels.
  int64_t Channels(int res) const {
    int64_t c = static_cast<int64_t>(base_channels) * resolution / res;
    return std::min<int64_t>(c, max_channels);
  }

  void Validate() const {
    auto pow2 = [](int v) { return v > 0 && (v & (v - 1)) == 0; };
    if (!pow2(resolution) || resolution < 32)
      throw std::invalid_argument("resolution must be a power of 2 >= 32");
    if (!pow2(base_resolution) || base_resolution < 4 ||
        base_resolution >= resolution)
      throw std::invalid_argument("base_resolution must be a power of 2 in [4, resolution)");
    if (z_dim < 1 || w_dim < 1 || mapping_depth < 1)
      throw std::invalid_argument("z_dim, w_dim, mapping_depth must be positive");
  }
};

// Gaussian noise input to the mapping network.
struct LatentNoise {
  Tensor z;  // [N, Z]

  static LatentNoise Sample(int64_t n, int64_t z_dim, Rng& rng) {
    return LatentNoise{rng.NormalTensor({n, z_dim})};
  }
};

// Maps z to the style space that modulates the decoder.
class MappingNetwork {
 public:
  MappingNetwork() = default;
  MappingNetwork(ParamStore& store, const GeneratorConfig& cfg) : z_dim_(cfg.z_dim) {
    int64_t in = cfg.z_dim;
    for (int i = 0; i < cfg.mapping_depth; ++i) {
      int64_t out = cfg.w_dim;
      layers_.push_back(Dense::Make(store, "map." + std::to_string(i), in, out,
                                    cfg.seed));
      in = out;
    }
  }

  // Input rows are normalized to unit RMS before the MLP; z itself is a leaf
  // constant so this happens eagerly on the tensor.
  Value Apply(const LatentNoise& noise) const {
    if (noise.z.ndim() != 2 || noise.z.dim(1) != z_dim_)
      throw std::invalid_argument("map_latent: z dimension mismatch, want " +
                                  std::to_string(z_dim_) + " got " +
                                  noise.z.ShapeStr());
    Tensor z = noise.z;
    const int64_t N = z.dim(0), Z = z.dim(1);
    for (int64_t n = 0; n < N; ++n) {
      real ss = 0;
      for (int64_t i = 0; i < Z; ++i) ss += z[n * Z + i] * z[n * Z + i];
      real inv = real(1) / std::sqrt(ss / Z + real(1e-8));
      for (int64_t i = 0; i < Z; ++i) z[n * Z + i] *= inv;
    }
    Value x = Constant(std::move(z));
    for (const auto& l : layers_) x = LeakyRelu(l.Apply(x));
    return x;
  }

 private:
  int64_t z_dim_ = 0;
  std::vector<Dense> layers_;
};

// U-shaped makeup synthesis network: strided-conv encoder over the 4-channel
// input, style-modulated coarse-to-fine decoder with skip fusion at every
// level, tanh RGB head.
class Generator {
 public:
  explicit Generator(GeneratorConfig cfg) : cfg_(cfg) {
    cfg_.Validate();
    mapping_ = MappingNetwork(store_, cfg_);

    enc_in_ = ConvLayer::Make(store_, "enc.in", 4, cfg_.Channels(cfg_.resolution),
                              3, {1, 1, 1}, cfg_.seed);
    for (int res = cfg_.resolution; res > cfg_.base_resolution; res /= 2)
      enc_down_.push_back(ConvLayer::Make(
          store_, "enc.down" + std::to_string(res), cfg_.Channels(res),
          cfg_.Channels(res / 2), 3, {2, 1, 1}, cfg_.seed));

    const int64_t cb = cfg_.Channels(cfg_.base_resolution);
    if (cfg_.global_context) {
      ctx_squeeze_ = Dense::Make(store_, "ctx.squeeze", cb, cb / 2, cfg_.seed);
      ctx_excite_ = Dense::Make(store_, "ctx.excite", cb / 2, cb, cfg_.seed);
    }

    base_style_ = Dense::Make(store_, "dec.style_base", cfg_.w_dim, cb,
                              cfg_.seed, /*bias_init=*/1);
    base_conv_ = ConvLayer::Make(store_, "dec.base", cb, cb, 3, {1, 1, 1}, cfg_.seed);
    for (int res = cfg_.base_resolution; res < cfg_.resolution; res *= 2) {
      // after upsample: Channels(res) feature channels + Channels(2*res) skip
      const int64_t cin = cfg_.Channels(res) + cfg_.Channels(2 * res);
      const int64_t cout = cfg_.Channels(2 * res);
      up_style_.push_back(Dense::Make(store_, "dec.style" + std::to_string(res),
                                      cfg_.w_dim, cin, cfg_.seed, /*bias_init=*/1));
      up_conv_.push_back(ConvLayer::Make(store_, "dec.up" + std::to_string(res),
                                         cin, cout, 3, {1, 1, 1}, cfg_.seed));
    }
    to_rgb_ = ConvLayer::Make(store_, "dec.rgb", cfg_.Channels(cfg_.resolution),
                              3, 1, {1, 0, 1}, cfg_.seed);
  }

  const GeneratorConfig& config() const { return cfg_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }

  Value MapLatent(const LatentNoise& z) const { return mapping_.Apply(z); }

  // Multi-resolution features, full resolution first. The masked-region
  // pixels enter untouched: nothing is zeroed out of the input.
  std::vector<Value> Encode(const Value& input) const {
    if (input->val.ndim() != 4 || input->val.dim(1) != 4 ||
        input->val.dim(2) != cfg_.resolution || input->val.dim(3) != cfg_.resolution)
      throw std::invalid_argument("encode: want [N,4," +
                                  std::to_string(cfg_.resolution) + "," +
                                  std::to_string(cfg_.resolution) + "], got " +
                                  input->val.ShapeStr());
    std::vector<Value> feats;
    Value x = LeakyRelu(enc_in_.Apply(input));
    feats.push_back(x);
    for (const auto& down : enc_down_) {
      x = LeakyRelu(down.Apply(x));
      feats.push_back(x);
    }
    if (cfg_.global_context) {
      Value s = Sigmoid(ctx_excite_.Apply(LeakyRelu(ctx_squeeze_.Apply(GlobalAvgPool(x)))));
      feats.back() = ChannelScale(x, s);
    }
    return feats;
  }

  // I_pred = decode(encode(I), w).
  Value Synthesize(const Value& input, const Value& w) const {
    std::vector<Value> feats = Encode(input);
    const int64_t N = input->val.dim(0);
    if (w->val.ndim() != 2 || w->val.dim(0) != N || w->val.dim(1) != cfg_.w_dim)
      throw std::invalid_argument("synthesize: bad style code shape " +
                                  w->val.ShapeStr());

    Value x = feats.back();
    x = LeakyRelu(base_conv_.Apply(ChannelScale(x, base_style_.Apply(w))));
    int level = 0;
    for (int res = cfg_.base_resolution; res < cfg_.resolution; res *= 2, ++level) {
      // feats[i] lives at resolution / 2^i
      const int skip_index =
          static_cast<int>(std::log2(cfg_.resolution / (2 * res)));
      Value fused = ConcatChannels(UpsampleNearest2x(x), feats[skip_index]);
      x = LeakyRelu(up_conv_[level].Apply(
          ChannelScale(fused, up_style_[level].Apply(w))));
    }
    Value pred = Tanh(to_rgb_.Apply(x));
    if (!pred->val.AllFinite())
      throw std::runtime_error("synthesize: non-finite activation at RGB head");
    return pred;
  }

  Value SynthesizeFromNoise(const NetworkInput& in, const LatentNoise& z) const {
    Tensor batch = in.chw.Reshaped({1, 4, in.height(), in.width()});
    return Synthesize(Constant(std::move(batch)), MapLatent(z));
  }

 private:
  GeneratorConfig cfg_;
  ParamStore store_;
  MappingNetwork mapping_;
  ConvLayer enc_in_;
  std::vector<ConvLayer> enc_down_;
  Dense ctx_squeeze_, ctx_excite_;
  Dense base_style_;
  ConvLayer base_conv_;
  std::vector<Dense> up_style_;
  std::vector<ConvLayer> up_conv_;
  ConvLayer to_rgb_;
};

// Stacks sample tensors into one [N,...] batch.
inline Tensor StackInputs(const std::vector<NetworkInput>& ins) {
  if (ins.empty()) throw std::invalid_argument("StackInputs: empty batch");
  const int64_t H = ins[0].height(), W = ins[0].width();
  Tensor out({static_cast<int64_t>(ins.size()), 4, H, W});
  for (size_t i = 0; i < ins.size(); ++i) {
    CheckSameShape(ins[i].chw, ins[0].chw, "StackInputs");
    std::copy_n(ins[i].chw.data(), 4 * H * W, out.data() + i * 4 * H * W);
  }
  return out;
}

inline Tensor StackImages(const std::vector<Image>& imgs) {
  if (imgs.empty()) throw std::invalid_argument("StackImages: empty batch");
  const int64_t H = imgs[0].height(), W = imgs[0].width();
  Tensor out({static_cast<int64_t>(imgs.size()), 3, H, W});
  for (size_t i = 0; i < imgs.size(); ++i) {
    CheckSameShape(imgs[i].chw, imgs[0].chw, "StackImages");
    std::copy_n(imgs[i].chw.data(), 3 * H * W, out.data() + i * 3 * H * W);
  }
  return out;
}

inline Image ImageFromBatch(const Tensor& batch, int64_t n) {
  const int64_t H = batch.dim(2), W = batch.dim(3);
  Image img(H, W);
  std::copy_n(batch.data() + n * 3 * H * W, 3 * H * W, img.chw.data());
  return img;
}

}  // namespace minpaint

#endif  // MINPAINT_NN_GENERATOR_H_
