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

#ifndef MINPAINT_EVAL_EVALUATE_H_
#define MINPAINT_EVAL_EVALUATE_H_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "minpaint/eval/embedders.h"
#include "minpaint/eval/frechet.h"
#include "minpaint/image.h"

namespace minpaint {

struct ScoreRow {
  std::string name;
  real fid = 0;
  real identity_mean = 0;
  real identity_std = 0;
  int64_t n_images = 0;
  int64_t n_pairs = 0;
};

struct EvalReport {
  ScoreRow main;
  std::vector<ScoreRow> baselines;
  std::string style_embedder;
  std::string identity_embedder;
  std::vector<std::string> excluded;  // generated ids without a bare partner

  void Validate() const {
    if (main.identity_mean < -1 || main.identity_mean > 1)
      throw std::logic_error("EvalReport: identity_mean out of [-1,1]");
    if (main.fid < -1e-6) throw std::logic_error("EvalReport: negative fid");
  }
};

namespace detail {

inline std::vector<std::pair<std::string, std::string>> ListImages(
    const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::string, std::string>> out;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  for (const auto& de : fs::directory_iterator(dir)) {
    if (!de.is_regular_file()) continue;
    auto ext = de.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
      out.emplace_back(de.path().stem().string(), de.path().string());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::runtime_error("no images under " + dir);
  return out;
}

// Output names encode (input id, seed, style index) as <id>__s<seed>_k<j>;
// everything before the first "__" is the pairing key.
inline std::string PairId(const std::string& stem) {
  auto pos = stem.find("__");
  return pos == std::string::npos ? stem : stem.substr(0, pos);
}

struct DirScores {
  real fid;
  real id_mean, id_std;
  int64_t n_images, n_pairs;
  std::vector<std::string> excluded;
};

inline DirScores ScoreDirectory(const std::string& dir,
                                const FeatureStats& reference_stats,
                                const std::string& bare_dir,
                                const ImageEmbedder& style,
                                const ImageEmbedder& identity) {
  namespace fs = std::filesystem;
  auto files = ListImages(dir);
  DirScores s{};
  s.n_images = static_cast<int64_t>(files.size());

  std::vector<std::vector<real>> style_emb;
  std::vector<real> sims;
  for (const auto& [stem, path] : files) {
    Image img = LoadImage(path);
    style_emb.push_back(style.Embed(img, stem));
    const std::string pid = PairId(stem);
    const fs::path bare = fs::path(bare_dir) / (pid + ".png");
    if (!fs::exists(bare)) {
      s.excluded.push_back(stem);
      continue;
    }
    Image bare_img = LoadImage(bare.string());
    sims.push_back(IdentitySimilarity(identity.Embed(img, stem),
                                      identity.Embed(bare_img, pid)));
  }
  if (sims.empty())
    throw std::runtime_error(dir + ": no generated image has a matching bare face");

  s.fid = FrechetDistance(ComputeFeatureStats(style_emb), reference_stats);
  s.n_pairs = static_cast<int64_t>(sims.size());
  real mean = 0;
  for (real v : sims) mean += v;
  mean /= sims.size();
  real var = 0;
  for (real v : sims) var += (v - mean) * (v - mean);
  s.id_mean = mean;
  s.id_std = std::sqrt(var / sims.size());
  return s;
}

}  // namespace detail

// FID(generated, reference) + per-pair identity between each generated image
// and the makeup-free face it came from. Extra output directories (external
// baselines) are scored against the same reference and bare sets.
inline EvalReport EvaluateRun(
    const std::string& generated_dir, const std::string& reference_dir,
    const std::string& bare_dir, const ImageEmbedder& style_embedder,
    const ImageEmbedder& identity_embedder,
    const std::map<std::string, std::string>& baseline_dirs = {}) {
  std::vector<std::vector<real>> ref_emb;
  for (const auto& [stem, path] : detail::ListImages(reference_dir))
    ref_emb.push_back(style_embedder.Embed(LoadImage(path), stem));
  FeatureStats ref_stats = ComputeFeatureStats(ref_emb);

  EvalReport report;
  report.style_embedder = style_embedder.Name();
  report.identity_embedder = identity_embedder.Name();

  auto fill = [&](const std::string& name, const std::string& dir) {
    detail::DirScores s = detail::ScoreDirectory(dir, ref_stats, bare_dir,
                                                 style_embedder, identity_embedder);
    ScoreRow row{name, s.fid, s.id_mean, s.id_std, s.n_images, s.n_pairs};
    if (name == "minpaint") {
      report.main = row;
      report.excluded = s.excluded;
    } else {
      report.baselines.push_back(row);
    }
  };
  fill("minpaint", generated_dir);
  for (const auto& [name, dir] : baseline_dirs) fill(name, dir);
  report.Validate();
  return report;
}

inline std::string FormatReportTable(const EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "style embedder:    " << r.style_embedder << "\n";
  os << "identity embedder: " << r.identity_embedder << "\n\n";
  os << std::left << std::setw(16) << "method" << std::right << std::setw(12)
     << "FID" << std::setw(22) << "identity (mean+-std)" << std::setw(10)
     << "images" << "\n";
  auto row = [&](const ScoreRow& s) {
    std::ostringstream id;
    id << std::fixed << std::setprecision(4) << s.identity_mean << " (+-"
       << s.identity_std << ")";
    os << std::left << std::setw(16) << s.name << std::right << std::setw(12)
       << s.fid << std::setw(22) << id.str() << std::setw(10) << s.n_images
       << "\n";
  };
  row(r.main);
  for (const auto& b : r.baselines) row(b);
  if (!r.excluded.empty()) {
    os << "\nexcluded (no bare partner):";
    for (const auto& e : r.excluded) os << " " << e;
    os << "\n";
  }
  return os.str();
}

inline nlohmann::json ReportToJson(const EvalReport& r) {
  auto row = [](const ScoreRow& s) {
    return nlohmann::json{{"name", s.name},
                          {"fid", s.fid},
                          {"identity_mean", s.identity_mean},
                          {"identity_std", s.identity_std},
                          {"n_images", s.n_images},
                          {"n_pairs", s.n_pairs}};
  };
  nlohmann::json j;
  j["style_embedder"] = r.style_embedder;
  j["identity_embedder"] = r.identity_embedder;
  j["main"] = row(r.main);
  j["baselines"] = nlohmann::json::array();
  for (const auto& b : r.baselines) j["baselines"].push_back(row(b));
  j["excluded"] = r.excluded;
  return j;
}

inline void WriteReportFiles(const EvalReport& r, const std::string& prefix) {
  {
    std::ofstream txt(prefix + ".txt");
    txt << FormatReportTable(r);
  }
  std::ofstream js(prefix + ".json");
  js << ReportToJson(r).dump(2) << "\n";
}

}  // namespace minpaint

#endif  // MINPAINT_EVAL_EVALUATE_H_
