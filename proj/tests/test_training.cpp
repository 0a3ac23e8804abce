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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "minpaint/train/trainer.h"
#include "test_util.h"

using namespace minpaint;
using testutil::RandomImage;
using testutil::TempDir;

namespace {

RunConfig ToyRun(uint64_t seed = 1) {
  RunConfig cfg;
  cfg.resolution = 32;
  cfg.base_resolution = 8;
  cfg.base_channels = 2;
  cfg.max_channels = 8;
  cfg.z_dim = 8;
  cfg.w_dim = 8;
  cfg.mapping_depth = 2;
  cfg.batch_size = 2;
  cfg.learning_rate = 1e-4;
  cfg.total_steps = 4;
  cfg.log_interval = 1;  // check non-face preservation on every step
  cfg.checkpoint_interval = 2;
  cfg.seed = seed;
  return cfg;
}

MakeupSample MakeToySample(Rng& rng, const std::string& id, int res) {
  MakeupSample s;
  s.id = id;
  s.source = RandomImage(rng, res, res);
  s.bare = RandomImage(rng, res, res);
  s.mask = RoiMask(res, res);
  // ellipse-ish blob so both mask values occur
  for (int64_t y = 0; y < res; ++y)
    for (int64_t x = 0; x < res; ++x) {
      real dy = (y - res / 2.0) / (0.4 * res), dx = (x - res / 2.0) / (0.3 * res);
      s.mask.at(y, x) = dy * dy + dx * dx <= 1 ? 1 : 0;
    }
  return s;
}

std::vector<MakeupSample> ToyBatch(uint64_t seed, int res, int n = 2) {
  Rng rng(seed);
  std::vector<MakeupSample> batch;
  for (int i = 0; i < n; ++i)
    batch.push_back(MakeToySample(rng, "s" + std::to_string(i), res));
  return batch;
}

}  // namespace

TEST_CASE("one training step yields a finite, consistent loss bundle") {
  RunConfig cfg = ToyRun();
  Trainer trainer(cfg, 123);
  LossBundle b = trainer.TrainStep(ToyBatch(2, cfg.resolution));
  LossWeights w{cfg.lambda_rec, cfg.lambda_hrfpl};
  CHECK(b.Consistent(w));
  CHECK(std::isfinite(b.total));
  CHECK(b.rec >= 0);
  CHECK(b.hrfpl >= 0);
  CHECK(trainer.step() == 1);
  CHECK_THROWS(trainer.TrainStep({}));
}

TEST_CASE("training steps actually move the generator parameters") {
  RunConfig cfg = ToyRun();
  Trainer trainer(cfg, 0);
  trainer.SetLearningRate(1e-3);
  auto before = detail::SnapshotParams(trainer.generator().params());
  trainer.TrainStep(ToyBatch(3, cfg.resolution));
  auto after = detail::SnapshotParams(trainer.generator().params());
  real moved = 0;
  for (const auto& [name, t] : before)
    for (int64_t i = 0; i < t.numel(); ++i) moved += std::abs(after[name][i] - t[i]);
  CHECK(moved > 0);
}

TEST_CASE("two trainers with the same seed replay the same loss sequence") {
  RunConfig cfg = ToyRun(9);
  Trainer a(cfg, 7), b(cfg, 7);
  for (int step = 0; step < 3; ++step) {
    auto batch = ToyBatch(100 + step, cfg.resolution);
    LossBundle la = a.TrainStep(batch);
    LossBundle lb = b.TrainStep(batch);
    REQUIRE(la.total == lb.total);
    REQUIRE(la.adv == lb.adv);
    REQUIRE(la.rec == lb.rec);
    REQUIRE(la.hrfpl == lb.hrfpl);
  }
}

TEST_CASE("checkpoint save -> load -> save is byte-identical") {
  TempDir tmp("ckpt_bytes");
  RunConfig cfg = ToyRun();
  Trainer trainer(cfg, 42);
  trainer.TrainStep(ToyBatch(4, cfg.resolution));

  const std::string p1 = tmp.str() + "/a.bin", p2 = tmp.str() + "/b.bin";
  SaveCheckpoint(trainer.ToCheckpoint(), p1);
  Checkpoint loaded = LoadCheckpoint(p1);
  SaveCheckpoint(loaded, p2);

  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  REQUIRE(!s1.empty());
  CHECK(s1 == s2);
}

TEST_CASE("resume from checkpoint replays the uninterrupted run exactly") {
  RunConfig cfg = ToyRun(11);
  auto batch_at = [&](int step) { return ToyBatch(200 + step, cfg.resolution); };

  // uninterrupted: 4 steps
  Trainer full(cfg, 77);
  std::vector<LossBundle> want;
  for (int s = 0; s < 4; ++s) want.push_back(full.TrainStep(batch_at(s)));

  // interrupted after 2 steps, checkpointed, resumed in a fresh trainer
  Trainer first(cfg, 77);
  first.TrainStep(batch_at(0));
  first.TrainStep(batch_at(1));
  Checkpoint ck = first.ToCheckpoint();

  Trainer second(cfg, 77);
  second.FromCheckpoint(ck);
  CHECK(second.step() == 2);
  LossBundle r2 = second.TrainStep(batch_at(2));
  LossBundle r3 = second.TrainStep(batch_at(3));
  CHECK(r2.total == want[2].total);
  CHECK(r3.total == want[3].total);
}

TEST_CASE("checkpoint config echo guards resume; force overrides") {
  RunConfig cfg = ToyRun();
  Trainer a(cfg, 1);
  Checkpoint ck = a.ToCheckpoint();
  RunConfig other = cfg;
  other.learning_rate = 5e-4;
  Trainer b(other, 1);
  CHECK_THROWS_WITH_AS(b.FromCheckpoint(ck), doctest::Contains("different config"),
                       std::runtime_error);
  CHECK_NOTHROW(b.FromCheckpoint(ck, /*force=*/true));
}

TEST_CASE("corrupt and mismatched checkpoints fail with clear errors") {
  TempDir tmp("ckpt_bad");
  const std::string bad = tmp.str() + "/bad.bin";
  std::ofstream(bad, std::ios::binary) << "NOPEnope";
  CHECK_THROWS_WITH_AS(LoadCheckpoint(bad), doctest::Contains("bad magic"),
                       std::runtime_error);
  CHECK_THROWS(LoadCheckpoint(tmp.str() + "/missing.bin"));

  // architecture mismatch on restore
  RunConfig cfg = ToyRun();
  Trainer a(cfg, 1);
  Checkpoint ck = a.ToCheckpoint();
  ck.gen_params.erase(ck.gen_params.begin());
  Trainer b(cfg, 1);
  CHECK_THROWS(b.FromCheckpoint(ck));
}

TEST_CASE("version mismatch is reported with both versions") {
  TempDir tmp("ckpt_version");
  const std::string path = tmp.str() + "/v.bin";
  {
    std::ofstream os(path, std::ios::binary);
    os.write("MKPT", 4);
    uint32_t v = 999;
    os.write(reinterpret_cast<const char*>(&v), 4);
  }
  CHECK_THROWS_WITH_AS(LoadCheckpoint(path), doctest::Contains("version 999"),
                       std::runtime_error);
}

TEST_CASE("full training loop writes logs and checkpoints over a tiny dataset") {
  TempDir tmp("train_loop");
  namespace fs = std::filesystem;
  fs::create_directories(tmp.path() / "images");
  Rng rng(71);
  for (const char* id : {"a", "b", "c"}) {
    SaveImage(testutil::MakePortrait(32, 32, Fnv1a(id)),
              (tmp.path() / "images" / (std::string(id) + ".png")).string());
  }

  RunConfig cfg = ToyRun(13);
  cfg.total_steps = 3;
  cfg.checkpoint_interval = 2;
  cfg.split_ratio = 0.7;

  SampleServices services;
  services.parser = std::make_shared<EllipseParser>();
  services.remover = std::make_shared<IdentityRemover>();
  services.cache_derived = false;

  DatasetManifest manifest = LoadDataset(tmp.str(), cfg);
  const std::string out = (tmp.path() / "run").string();
  TrainResult result = Train(cfg, manifest, services, out);
  CHECK(result.losses.size() == 3);
  CHECK(fs::exists(fs::path(out) / "ckpt_2.bin"));
  CHECK(fs::exists(fs::path(out) / "latest.bin"));
  CHECK(fs::exists(result.checkpoint_path));

  std::ifstream log(fs::path(out) / "train_log.jsonl");
  int lines = 0;
  std::string line;
  while (std::getline(log, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 3);

  // resuming from the final checkpoint with more steps continues the run
  cfg.total_steps = 5;
  TrainResult more = Train(cfg, manifest, services, out,
                           (fs::path(out) / "latest.bin").string(), /*force=*/true);
  CHECK(more.losses.size() == 2);
}

TEST_CASE("adam skips parameters that received no gradient") {
  ParamStore store;
  Value a = store.Create("a", Tensor::Scalar(1));
  Value b = store.Create("b", Tensor::Scalar(1));
  a->grad = Tensor::Scalar(0.5);
  Adam opt(0.1);
  opt.Step(store);
  CHECK(a->val[0] < 1);
  CHECK(b->val[0] == 1);
  CHECK(opt.step_count() == 1);
}
