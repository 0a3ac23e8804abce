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

#ifndef MINPAINT_DATA_PIPELINE_H_
#define MINPAINT_DATA_PIPELINE_H_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minpaint/config.h"
#include "minpaint/core/rng.h"
#include "minpaint/face/parsing.h"
#include "minpaint/face/removal.h"
#include "minpaint/image.h"

namespace minpaint {

namespace fs = std::filesystem;

enum class Split { kTrain, kTest };

struct ManifestEntry {
  std::string id;
  std::string image_path;
  std::string mask_path;  // empty = derive via face parsing
  std::string bare_path;  // empty = derive via makeup removal
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;  // ordered lexicographically by id
  std::vector<std::string> errors;     // skipped samples, with reasons
  std::string root;

  int64_t CountSplit(Split s) const {
    int64_t n = 0;
    for (const auto& e : entries) n += e.split == s;
    return n;
  }
  std::vector<const ManifestEntry*> SplitEntries(Split s) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& e : entries)
      if (e.split == s) out.push_back(&e);
    return out;
  }
  const ManifestEntry* Find(const std::string& id) const {
    for (const auto& e : entries)
      if (e.id == id) return &e;
    return nullptr;
  }

  uint64_t Hash() const {
    uint64_t h = 1469598103934665603ull;
    for (const auto& e : entries) {
      h = Fnv1a(e.id, h);
      h = Fnv1a(e.split == Split::kTrain ? "t" : "e", h);
    }
    return h;
  }
};

// (I_D, M, N') triple, preprocessed to the configured resolution.
struct MakeupSample {
  std::string id;
  Image source;  // I_D
  RoiMask mask;  // M
  Image bare;    // N' (makeup-removed)

  void CheckInvariants() const {
    if (!mask.Binary()) throw std::runtime_error(id + ": mask not binary");
    if (source.height() != bare.height() || source.width() != bare.width() ||
        mask.height() != source.height() || mask.width() != source.width())
      throw std::runtime_error(id + ": sample shapes disagree");
    if (!source.Canonical() || !bare.Canonical())
      throw std::runtime_error(id + ": pixel values out of range");
  }
};

namespace detail {

// Cheap readability probe: nonempty file with a known image magic.
inline bool LooksReadable(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  unsigned char magic[8] = {0};
  f.read(reinterpret_cast<char*>(magic), 8);
  if (f.gcount() < 8) return false;
  static const unsigned char png[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (std::equal(png, png + 8, magic)) return true;
  if (magic[0] == 0xff && magic[1] == 0xd8) return true;  // JPEG
  return false;
}

inline bool IsImageFile(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace detail

// Layout: root/images/<id>.png (required), root/masks/<id>.png,
// root/bare/<id>.png (both optional), root/split.txt (optional,
// lines "<id> <train|test>"). Without a split file the lexicographically
// sorted ids are split train-first by split_ratio.
inline DatasetManifest LoadDataset(const std::string& root, const RunConfig& config) {
  DatasetManifest m;
  m.root = root;
  const fs::path images = fs::path(root) / "images";
  if (!fs::is_directory(images))
    throw std::runtime_error("dataset root missing images/ directory: " + root);

  std::vector<std::pair<std::string, fs::path>> found;
  for (const auto& de : fs::directory_iterator(images)) {
    if (!de.is_regular_file() || !detail::IsImageFile(de.path())) continue;
    found.emplace_back(de.path().stem().string(), de.path());
  }
  std::sort(found.begin(), found.end());

  std::optional<std::map<std::string, Split>> split_file;
  const fs::path split_path = fs::path(root) / "split.txt";
  if (fs::exists(split_path)) {
    split_file.emplace();
    std::ifstream f(split_path);
    std::string id, which;
    while (f >> id >> which) {
      if (which == "train")
        (*split_file)[id] = Split::kTrain;
      else if (which == "test")
        (*split_file)[id] = Split::kTest;
      else
        throw std::runtime_error("split.txt: bad split '" + which + "' for " + id);
    }
  }

  for (const auto& [id, path] : found) {
    if (!detail::LooksReadable(path)) {
      m.errors.push_back(id + ": unreadable image file, skipped");
      continue;
    }
    ManifestEntry e;
    e.id = id;
    e.image_path = path.string();
    const fs::path mask = fs::path(root) / "masks" / (id + ".png");
    const fs::path bare = fs::path(root) / "bare" / (id + ".png");
    if (fs::exists(mask)) e.mask_path = mask.string();
    if (fs::exists(bare)) e.bare_path = bare.string();
    if (split_file) {
      auto it = split_file->find(id);
      if (it == split_file->end()) {
        m.errors.push_back(id + ": not listed in split.txt, skipped");
        continue;
      }
      e.split = it->second;
    }
    m.entries.push_back(std::move(e));
  }

  if (!split_file) {
    const int64_t n_train =
        static_cast<int64_t>(m.entries.size() * config.split_ratio);
    for (size_t i = 0; i < m.entries.size(); ++i)
      m.entries[i].split =
          static_cast<int64_t>(i) < n_train ? Split::kTrain : Split::kTest;
  }

  if (m.entries.empty()) throw std::runtime_error("no samples under " + root);
  return m;
}

// Bilinear resize + [-1,1] normalization happens in LoadImage; this is the
// geometry half applied to an already-canonical image.
inline Image Preprocess(const Image& raw, int resolution) {
  if (raw.height() == resolution && raw.width() == resolution) return raw;
  return ResizeBilinear(raw, resolution, resolution);
}

// Mask-synchronized horizontal flip; the only augmentation in use.
inline std::pair<Image, RoiMask> AugmentFlip(const Image& image,
                                             const RoiMask& mask, bool coin) {
  if (image.height() != mask.height() || image.width() != mask.width())
    throw std::invalid_argument("AugmentFlip: image/mask misaligned");
  if (!coin) return {image, mask};
  return {FlipHorizontal(image), FlipHorizontal(mask)};
}

// Per-sample flip draw; independent of worker scheduling.
inline bool FlipCoin(uint64_t global_seed, const std::string& id, int64_t step) {
  Rng rng(MixSeed(global_seed, "flip/" + id + "/" + std::to_string(step)));
  return rng.Bernoulli(0.5);
}

struct SampleServices {
  std::shared_ptr<FaceParser> parser;
  std::shared_ptr<MakeupRemover> remover;
  MakeupRegionPolicy policy = MakeupRegionPolicy::Default();
  bool cache_derived = true;  // write derived masks/bare next to the dataset
};

// Assembles one training triple. Masks and bare faces found on disk are
// trusted; missing ones are derived through the adapters and cached so a
// second run is pure passthrough.
inline MakeupSample MakeSample(const ManifestEntry& entry,
                               const SampleServices& services,
                               const RunConfig& config,
                               const std::string& dataset_root) {
  MakeupSample s;
  s.id = entry.id;
  s.source = Preprocess(LoadImage(entry.image_path), config.resolution);

  if (auto* p = dynamic_cast<PrecomputedParser*>(services.parser.get()))
    p->SetCurrentId(entry.id);
  if (auto* r = dynamic_cast<PrecomputedRemover*>(services.remover.get()))
    r->SetCurrentId(entry.id);

  if (!entry.mask_path.empty()) {
    s.mask = ResizeNearest(LoadMask(entry.mask_path), config.resolution,
                           config.resolution);
  } else {
    ParsingMap parsing = ParseFace(s.source, *services.parser);
    s.mask = BuildRoiMask(parsing, services.policy);
    if (services.cache_derived && !dataset_root.empty()) {
      const fs::path dir = fs::path(dataset_root) / "masks";
      fs::create_directories(dir);
      SaveMask(s.mask, (dir / (entry.id + ".png")).string());
    }
  }
  if (s.mask.CountOnes() == 0)
    throw std::runtime_error(entry.id +
                             ": empty ROI mask (no face region found), sample rejected");

  if (!entry.bare_path.empty()) {
    s.bare = Preprocess(LoadImage(entry.bare_path), config.resolution);
  } else {
    s.bare = RemoveMakeup(s.source, *services.remover);
    if (services.cache_derived && !dataset_root.empty()) {
      const fs::path dir = fs::path(dataset_root) / "bare";
      fs::create_directories(dir);
      SaveImage(s.bare, (dir / (entry.id + ".png")).string());
    }
  }

  s.CheckInvariants();
  return s;
}

}  // namespace minpaint

#endif  // MINPAINT_DATA_PIPELINE_H_
