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

// minpaint CLI: prepare | train | infer | evaluate.
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure,
// 3 partial batch failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "minpaint/config.h"
#include "minpaint/data/pipeline.h"
#include "minpaint/eval/evaluate.h"
#include "minpaint/infer.h"
#include "minpaint/train/trainer.h"

namespace fs = std::filesystem;
using namespace minpaint;

namespace {

SampleServices ServicesFromConfig(const RunConfig& cfg) {
  SampleServices s;
  s.parser = MakeParser(cfg.parser, cfg.parser_assets);
  s.remover = MakeRemover(cfg.remover, cfg.remover_assets, s.parser);
  return s;
}

int CmdPrepare(const std::string& root, const std::string& config_path) {
  RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::FromFile(config_path);
  std::cout << "resolved config:\n" << cfg.ToString();
  DatasetManifest manifest = LoadDataset(root, cfg);
  SampleServices services = ServicesFromConfig(cfg);

  int64_t prepared = 0;
  std::vector<std::string> rejects = manifest.errors;
  for (const auto& entry : manifest.entries) {
    try {
      MakeSample(entry, services, cfg, root);
      ++prepared;
    } catch (const std::exception& e) {
      rejects.push_back(e.what());
    }
  }
  std::cout << "train entries: " << manifest.CountSplit(Split::kTrain) << "\n"
            << "test entries:  " << manifest.CountSplit(Split::kTest) << "\n"
            << "prepared:      " << prepared << "\n"
            << "rejected:      " << rejects.size() << "\n";
  for (const auto& r : rejects) std::cout << "  reject: " << r << "\n";
  if (prepared == 0) {
    std::cerr << "error: no usable samples\n";
    return 2;
  }
  return rejects.empty() ? 0 : 3;
}

int CmdTrain(const std::string& root, const std::string& config_path,
             const std::string& out_dir, const std::string& resume, bool force) {
  RunConfig cfg = RunConfig::FromFile(config_path);
  std::cout << "resolved config:\n" << cfg.ToString();
  DatasetManifest manifest = LoadDataset(root, cfg);
  SampleServices services = ServicesFromConfig(cfg);
  TrainResult result =
      Train(cfg, manifest, services, out_dir, resume, force, &std::cout);
  std::cout << "final checkpoint: " << result.checkpoint_path << "\n";
  return 0;
}

int CmdInfer(const std::string& input, const std::string& checkpoint_path,
             const std::string& config_path, uint64_t seed, int num_styles,
             bool remove_makeup, const std::string& out_dir) {
  Checkpoint ck = LoadCheckpoint(checkpoint_path);
  RunConfig cfg = config_path.empty() ? RunConfig::FromString(ck.config_echo)
                                      : RunConfig::FromFile(config_path);
  std::cout << "resolved config:\n" << cfg.ToString();
  auto gen = std::make_unique<Generator>(GeneratorConfig::FromRun(cfg));
  detail::RestoreParams(gen->params(), ck.gen_params);

  SampleServices services = ServicesFromConfig(cfg);
  InferOptions opts{seed, num_styles, remove_makeup};

  std::vector<std::pair<std::string, std::string>> files;
  if (fs::is_directory(input)) {
    for (const auto& de : fs::directory_iterator(input))
      if (de.is_regular_file() && detail::IsImageFile(de.path()))
        files.emplace_back(de.path().stem().string(), de.path().string());
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(fs::path(input).stem().string(), input);
  }
  if (files.empty()) {
    std::cerr << "error: no input images under " << input << "\n";
    return 1;
  }

  fs::create_directories(out_dir);
  int failures = 0;
  for (const auto& [id, path] : files) {
    try {
      if (auto* p = dynamic_cast<PrecomputedParser*>(services.parser.get()))
        p->SetCurrentId(id);
      if (auto* r = dynamic_cast<PrecomputedRemover*>(services.remover.get()))
        r->SetCurrentId(id);
      Image raw = LoadImage(path);
      InferResult result = InferOne(*gen, raw, id, *services.parser,
                                    remove_makeup ? services.remover.get() : nullptr,
                                    services.policy, opts);
      for (int k = 0; k < num_styles; ++k) {
        const std::string name =
            id + "__s" + std::to_string(seed) + "_k" + std::to_string(k) + ".png";
        SaveImage(result.outputs[k], (fs::path(out_dir) / name).string());
      }
      SaveImage(MakeGrid(result),
                (fs::path(out_dir) / (id + "__grid.png")).string());
      std::cout << id << ": " << num_styles << " style(s), mask covers "
                << result.mask.CountOnes() << " px\n";
    } catch (const std::exception& e) {
      std::cerr << id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  if (failures == static_cast<int>(files.size())) return 2;
  return failures ? 3 : 0;
}

int CmdEvaluate(const std::string& generated, const std::string& reference,
                const std::string& bare, const std::vector<std::string>& baselines,
                const std::string& config_path, const std::string& out_prefix) {
  RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::FromFile(config_path);
  std::map<std::string, std::string> baseline_dirs;
  for (const auto& b : baselines) {
    auto eq = b.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --baseline wants name=dir, got '" << b << "'\n";
      return 1;
    }
    baseline_dirs[b.substr(0, eq)] = b.substr(eq + 1);
  }
  auto style = MakeEmbedder(cfg.embedder, cfg.embedder_assets, cfg.seed);
  auto identity =
      MakeEmbedder(cfg.identity_embedder == "toy" ? "toy-identity"
                                                  : cfg.identity_embedder,
                   cfg.identity_assets, cfg.seed);
  EvalReport report =
      EvaluateRun(generated, reference, bare, *style, *identity, baseline_dirs);
  std::cout << FormatReportTable(report);
  if (!out_prefix.empty()) {
    WriteReportFiles(report, out_prefix);
    std::cout << "wrote " << out_prefix << ".txt and " << out_prefix << ".json\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minpaint: learn a makeup style from a paired-mask dataset and "
               "apply it to makeup-free faces"};
  app.require_subcommand(1);

  std::string root, config_path, out_dir = "out", resume, input, checkpoint;
  std::string generated, reference, bare, out_prefix;
  std::vector<std::string> baselines;
  uint64_t seed = 0;
  int num_styles = 1;
  bool force = false, remove_flag = false;

  auto* prepare = app.add_subcommand("prepare", "derive and cache masks/bare faces");
  prepare->add_option("--root", root, "dataset root")->required();
  prepare->add_option("--config", config_path, "config file");

  auto* train = app.add_subcommand("train", "train the makeup model");
  train->add_option("--root", root, "dataset root")->required();
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--resume", resume, "checkpoint to resume from");
  train->add_flag("--force", force, "resume even if the config echo differs");

  auto* infer = app.add_subcommand("infer", "apply makeup to faces");
  infer->add_option("--input", input, "input image or directory")->required();
  infer->add_option("--checkpoint", checkpoint, "trained checkpoint")->required();
  infer->add_option("--config", config_path, "config override (default: checkpoint echo)");
  infer->add_option("--seed", seed, "style seed");
  infer->add_option("--num-styles", num_styles, "style draws per input")
      ->check(CLI::PositiveNumber);
  infer->add_flag("--remove-makeup", remove_flag, "run the makeup remover first");
  infer->add_option("--out", out_dir, "output directory");

  auto* evaluate = app.add_subcommand("evaluate", "score generated outputs");
  evaluate->add_option("--generated", generated, "generated output dir")->required();
  evaluate->add_option("--reference", reference, "reference makeup dir")->required();
  evaluate->add_option("--bare", bare, "makeup-free faces dir")->required();
  evaluate->add_option("--baseline", baselines, "extra name=dir output sets");
  evaluate->add_option("--config", config_path, "config file (embedder selection)");
  evaluate->add_option("--out", out_prefix, "report file prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prepare->parsed()) return CmdPrepare(root, config_path);
    if (train->parsed()) return CmdTrain(root, config_path, out_dir, resume, force);
    if (infer->parsed())
      return CmdInfer(input, checkpoint, config_path, seed, num_styles,
                      remove_flag, out_dir);
    if (evaluate->parsed())
      return CmdEvaluate(generated, reference, bare, baselines, config_path,
                         out_prefix);
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    std::cerr << "error: " << msg << "\n";
    return msg.rfind("config errors:", 0) == 0 ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
