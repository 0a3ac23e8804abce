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

#ifndef MINPAINT_TRAIN_TRAINER_H_
#define MINPAINT_TRAIN_TRAINER_H_

#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "minpaint/compositing.h"
#include "minpaint/config.h"
#include "minpaint/data/pipeline.h"
#include "minpaint/nn/discriminator.h"
#include "minpaint/nn/generator.h"
#include "minpaint/nn/losses.h"
#include "minpaint/train/adam.h"
#include "minpaint/train/checkpoint.h"

namespace minpaint {

namespace detail {

inline void RestoreParams(ParamStore& store, const std::map<std::string, Tensor>& saved) {
  if (saved.size() != store.All().size())
    throw std::runtime_error("checkpoint parameter set does not match this architecture");
  for (const auto& [name, t] : saved) {
    Value p = store.Get(name);
    if (p->val.shape() != t.shape())
      throw std::runtime_error("checkpoint shape mismatch for " + name);
    p->val = t;
  }
}

inline std::map<std::string, Tensor> SnapshotParams(const ParamStore& store) {
  std::map<std::string, Tensor> out;
  for (const auto& [name, p] : store.All()) out[name] = p->val;
  return out;
}

inline real GradNorm(const ParamStore& store) {
  real s = 0;
  for (const auto& [name, p] : store.All())
    for (int64_t i = 0; i < p->grad.numel(); ++i) s += p->grad[i] * p->grad[i];
  return std::sqrt(s);
}

}  // namespace detail

// Owns both networks, both optimizers, and the training RNG stream; one
// optimization stream, single writer for all parameters.
class Trainer {
 public:
  Trainer(const RunConfig& cfg, uint64_t manifest_hash)
      : cfg_(cfg),
        gen_(GeneratorConfig::FromRun(cfg)),
        disc_(GeneratorConfig::FromRun(cfg)),
        opt_g_(cfg.learning_rate),
        opt_d_(cfg.learning_rate),
        rng_(MixSeed(cfg.seed, "train")),
        manifest_hash_(manifest_hash) {
    weights_.lambda_rec = cfg.lambda_rec;
    weights_.lambda_hrfpl = cfg.lambda_hrfpl;
    feat_ = MakeFeatureAdapter(cfg.hrfpl_features, cfg.seed);
  }

  Generator& generator() { return gen_; }
  Discriminator& discriminator() { return disc_; }
  uint64_t step() const { return step_; }
  const RunConfig& config() const { return cfg_; }
  void SetLearningRate(real lr) {
    opt_g_.set_lr(lr);
    opt_d_.set_lr(lr);
  }

  // One D update on (I_D vs I_output), then one G update on the total loss.
  // I_output is built exactly as in inference: bare composite -> concat ->
  // synthesize -> masked composite.
  LossBundle TrainStep(const std::vector<MakeupSample>& batch) {
    const int64_t B = static_cast<int64_t>(batch.size());
    if (B == 0) throw std::invalid_argument("TrainStep: empty batch");
    const int64_t R = cfg_.resolution;

    std::vector<NetworkInput> inputs;
    std::vector<Image> sources;
    Tensor mask3({B, 3, R, R});
    for (int64_t i = 0; i < B; ++i) {
      const MakeupSample& s = batch[i];
      s.CheckInvariants();
      Image bare_composited = ComposeBare(s.bare, s.source, s.mask);
      inputs.push_back(AssembleInput(bare_composited, s.mask));
      sources.push_back(s.source);
      for (int c = 0; c < 3; ++c)
        std::copy_n(s.mask.hw.data(), R * R,
                    mask3.data() + ((i * 3 + c) * R * R));
    }
    Tensor src = StackImages(sources);
    Tensor src_outside(src.shape());
    for (int64_t i = 0; i < src.numel(); ++i)
      src_outside[i] = mask3[i] == 1 ? 0 : src[i];

    // Generator forward (shared by both phases; only G params behind it).
    LatentNoise z = LatentNoise::Sample(B, cfg_.z_dim, rng_);
    Value w = gen_.MapLatent(z);
    Value pred = gen_.Synthesize(Constant(StackInputs(inputs)), w);
    // Masked composite inside the graph: gradients exist only where the mask
    // is 1 and non-face pixels are copied from I_D bit-exactly.
    Value output = Add(MulConst(pred, mask3), Constant(src_outside));

    // --- discriminator update ---
    gen_.params().ZeroGrad();
    disc_.params().ZeroGrad();
    Value real_logits = disc_.Logits(Constant(src));
    Value fake_logits = disc_.Logits(Constant(output->val));  // detached
    Value d_loss = AdvLossDiscriminator(real_logits, fake_logits);
    if (cfg_.r1_enabled && step_ % cfg_.r1_interval == 0)
      d_loss = Add(d_loss, disc_.R1Penalty(src, cfg_.r1_gamma));
    CheckFinite(d_loss->val[0], "discriminator loss");
    Backward(d_loss);
    opt_d_.Step(disc_.params());

    // --- generator update (through the just-updated discriminator) ---
    gen_.params().ZeroGrad();
    disc_.params().ZeroGrad();
    Value adv = AdvLossGenerator(disc_.Logits(output));
    Value rec = RecLoss(output, Constant(src));
    Value hrfpl = HrfplLoss(output, Constant(src), *feat_);
    Value total = TotalLoss(adv, hrfpl, rec, weights_);
    LossBundle bundle = BundleOf(adv, hrfpl, rec, weights_);
    CheckFinite(bundle.total, "generator loss");
    Backward(total);
    opt_g_.Step(gen_.params());
    disc_.params().ZeroGrad();  // discard critic grads from the G graph

    if (step_ % cfg_.log_interval == 0) AssertNonFacePreserved(output->val, src, mask3);
    ++step_;
    last_d_loss_ = d_loss->val[0];
    return bundle;
  }

  Checkpoint ToCheckpoint() const {
    Checkpoint ck;
    ck.step = step_;
    ck.config_echo = cfg_.ToString();
    ck.manifest_hash = manifest_hash_;
    ck.rng_state = rng_.SerializeState();
    ck.gen_params = detail::SnapshotParams(gen_.params());
    ck.disc_params = detail::SnapshotParams(disc_.params());
    ck.opt_g_m = opt_g_.moments1();
    ck.opt_g_v = opt_g_.moments2();
    ck.opt_g_t = opt_g_.step_count();
    ck.opt_d_m = opt_d_.moments1();
    ck.opt_d_v = opt_d_.moments2();
    ck.opt_d_t = opt_d_.step_count();
    return ck;
  }

  void FromCheckpoint(const Checkpoint& ck, bool force = false) {
    if (!force && ck.config_echo != cfg_.ToString())
      throw std::runtime_error(
          "checkpoint was trained with a different config (pass force to override)");
    step_ = ck.step;
    rng_.RestoreState(ck.rng_state);
    detail::RestoreParams(gen_.params(), ck.gen_params);
    detail::RestoreParams(disc_.params(), ck.disc_params);
    opt_g_.moments1() = ck.opt_g_m;
    opt_g_.moments2() = ck.opt_g_v;
    opt_g_.set_step_count(ck.opt_g_t);
    opt_d_.moments1() = ck.opt_d_m;
    opt_d_.moments2() = ck.opt_d_v;
    opt_d_.set_step_count(ck.opt_d_t);
  }

 private:
  void CheckFinite(real v, const char* what) const {
    if (std::isfinite(v)) return;
    std::ostringstream os;
    os << "non-finite " << what << " at step " << step_
       << " (last D loss " << last_d_loss_
       << ", |gG| " << detail::GradNorm(gen_.params())
       << ", |gD| " << detail::GradNorm(disc_.params()) << ")";
    throw std::runtime_error(os.str());
  }

  static void AssertNonFacePreserved(const Tensor& out, const Tensor& src,
                                     const Tensor& mask3) {
    for (int64_t i = 0; i < out.numel(); ++i)
      if (mask3[i] == 0 && out[i] != src[i])
        throw std::logic_error("non-face pixel changed during training");
  }

  RunConfig cfg_;
  Generator gen_;
  Discriminator disc_;
  Adam opt_g_, opt_d_;
  Rng rng_;
  uint64_t manifest_hash_;
  LossWeights weights_;
  std::shared_ptr<FeatureAdapter> feat_;
  uint64_t step_ = 0;
  real last_d_loss_ = 0;
};

// Bounded id -> prepared-sample cache (sample prep is pure per entry).
class SampleCache {
 public:
  SampleCache(const DatasetManifest& manifest, const SampleServices& services,
              const RunConfig& cfg, size_t capacity = 512)
      : manifest_(manifest), services_(services), cfg_(cfg), capacity_(capacity) {}

  const MakeupSample& Get(const ManifestEntry& entry) {
    auto it = cache_.find(entry.id);
    if (it != cache_.end()) return it->second;
    if (cache_.size() >= capacity_) {
      cache_.erase(fifo_.front());
      fifo_.pop_front();
    }
    auto [pos, inserted] = cache_.emplace(
        entry.id, MakeSample(entry, services_, cfg_, manifest_.root));
    fifo_.push_back(entry.id);
    return pos->second;
  }

 private:
  const DatasetManifest& manifest_;
  const SampleServices& services_;
  const RunConfig& cfg_;
  size_t capacity_;
  std::unordered_map<std::string, MakeupSample> cache_;
  std::deque<std::string> fifo_;
};

struct TrainResult {
  std::string checkpoint_path;
  std::vector<LossBundle> losses;
};

// Full training loop: round-robin batches over the train split, flip
// augmentation from per-sample coins, JSONL loss log, periodic checkpoints.
inline TrainResult Train(const RunConfig& cfg, const DatasetManifest& manifest,
                         const SampleServices& services, const std::string& out_dir,
                         const std::string& resume_path = "", bool force = false,
                         std::ostream* progress = nullptr) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  Trainer trainer(cfg, manifest.Hash());
  if (!resume_path.empty()) trainer.FromCheckpoint(LoadCheckpoint(resume_path), force);

  auto train_entries = manifest.SplitEntries(Split::kTrain);
  if (train_entries.empty()) throw std::runtime_error("no training samples");

  const std::string log_path = (fs::path(out_dir) / "train_log.jsonl").string();
  std::ofstream log(log_path, resume_path.empty() ? std::ios::trunc : std::ios::app);

  SampleCache cache(manifest, services, cfg);
  TrainResult result;
  const int64_t n = static_cast<int64_t>(train_entries.size());
  for (uint64_t step = trainer.step();
       step < static_cast<uint64_t>(cfg.total_steps);) {
    std::vector<MakeupSample> batch;
    for (int i = 0; i < cfg.batch_size; ++i) {
      const ManifestEntry& e = *train_entries[(step * cfg.batch_size + i) % n];
      MakeupSample s = cache.Get(e);
      if (cfg.augment_flip && FlipCoin(cfg.seed, e.id, static_cast<int64_t>(step))) {
        s.source = FlipHorizontal(s.source);
        s.bare = FlipHorizontal(s.bare);
        s.mask = FlipHorizontal(s.mask);
      }
      batch.push_back(std::move(s));
    }
    LossBundle b = trainer.TrainStep(batch);
    step = trainer.step();
    result.losses.push_back(b);
    log << "{\"step\":" << step << ",\"adv\":" << b.adv << ",\"hrfpl\":" << b.hrfpl
        << ",\"rec\":" << b.rec << ",\"total\":" << b.total << "}\n";
    if (progress && step % cfg.log_interval == 0)
      *progress << "step " << step << " total " << b.total << " rec " << b.rec
                << "\n";
    if (step % cfg.checkpoint_interval == 0 ||
        step == static_cast<uint64_t>(cfg.total_steps)) {
      const std::string path =
          (fs::path(out_dir) / ("ckpt_" + std::to_string(step) + ".bin")).string();
      SaveCheckpoint(trainer.ToCheckpoint(), path);
      SaveCheckpoint(trainer.ToCheckpoint(),
                     (fs::path(out_dir) / "latest.bin").string());
      result.checkpoint_path = path;
    }
  }
  if (result.checkpoint_path.empty()) {
    result.checkpoint_path = (fs::path(out_dir) / "latest.bin").string();
    SaveCheckpoint(trainer.ToCheckpoint(), result.checkpoint_path);
  }
  return result;
}

}  // namespace minpaint

#endif  // MINPAINT_TRAIN_TRAINER_H_
