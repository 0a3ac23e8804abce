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

#ifndef MINPAINT_INFER_H_
#define MINPAINT_INFER_H_

#include <memory>
#include <string>
#include <vector>

#include "minpaint/compositing.h"
#include "minpaint/data/pipeline.h"
#include "minpaint/face/parsing.h"
#include "minpaint/face/removal.h"
#include "minpaint/nn/generator.h"
#include "minpaint/train/checkpoint.h"
#include "minpaint/train/trainer.h"

namespace minpaint {

struct InferOptions {
  uint64_t seed = 0;
  int num_styles = 1;
  bool apply_remover = false;  // inputs are usually already makeup-free
};

struct InferResult {
  Image input;                 // preprocessed I_D stand-in
  RoiMask mask;                // M
  std::vector<Image> outputs;  // one I_output per style draw
};

// Full generation pipeline for one face: parse -> mask -> (optional
// removal) -> bare composite -> synthesize per style draw -> masked
// composite with the input. The style noise is
// keyed by (seed, id, style index) so re-runs are bit-identical and batch
// order never matters.
inline InferResult InferOne(const Generator& gen, const Image& raw,
                            const std::string& id, const FaceParser& parser,
                            const MakeupRemover* remover,
                            const MakeupRegionPolicy& policy,
                            const InferOptions& opts) {
  const int res = gen.config().resolution;
  InferResult r;
  r.input = Preprocess(raw, res);

  ParsingMap parsing = ParseFace(r.input, parser);
  r.mask = BuildRoiMask(parsing, policy);

  Image bare = remover ? RemoveMakeup(r.input, *remover) : r.input;
  Image composed = ComposeBare(bare, r.input, r.mask);
  NetworkInput net_input = AssembleInput(composed, r.mask);

  for (int k = 0; k < opts.num_styles; ++k) {
    Rng rng(MixSeed(opts.seed, "infer/" + id + "/" + std::to_string(k)));
    LatentNoise z = LatentNoise::Sample(1, gen.config().z_dim, rng);
    Value pred = gen.SynthesizeFromNoise(net_input, z);
    Image pred_img = ImageFromBatch(pred->val, 0);
    r.outputs.push_back(CompositeOutput(pred_img, r.input, r.mask));
  }
  return r;
}

// Input plus all styles side by side, for quick visual inspection.
inline Image MakeGrid(const InferResult& r) {
  const int64_t H = r.input.height(), W = r.input.width();
  const int64_t cols = 1 + static_cast<int64_t>(r.outputs.size());
  Image grid(H, W * cols);
  auto paste = [&](const Image& img, int64_t col) {
    for (int c = 0; c < 3; ++c)
      for (int64_t y = 0; y < H; ++y)
        for (int64_t x = 0; x < W; ++x)
          grid.at(c, y, col * W + x) = img.at(c, y, x);
  };
  paste(r.input, 0);
  for (size_t k = 0; k < r.outputs.size(); ++k) paste(r.outputs[k], 1 + k);
  return grid;
}

// Rebuilds a generator from a checkpoint's own config echo.
inline std::unique_ptr<Generator> GeneratorFromCheckpoint(const Checkpoint& ck) {
  RunConfig cfg = RunConfig::FromString(ck.config_echo);
  auto gen = std::make_unique<Generator>(GeneratorConfig::FromRun(cfg));
  detail::RestoreParams(gen->params(), ck.gen_params);
  return gen;
}

}  // namespace minpaint

#endif  // MINPAINT_INFER_H_
