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

#ifndef MINPAINT_TRAIN_CHECKPOINT_H_
#define MINPAINT_TRAIN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "minpaint/core/tensor.h"

namespace minpaint {

// Binary training snapshot. Field order is fixed:
//   magic "MKPT" | u32 version | u64 step | config echo | manifest hash |
//   rng state | G tensors | D tensors | optG m | optG v | i64 optG t |
//   optD m | optD v | i64 optD t
// Tensor maps are written sorted by name, so save -> load -> save is
// byte-identical.
struct Checkpoint {
  static constexpr uint32_t kVersion = 1;
  static constexpr char kMagic[5] = "MKPT";

  uint64_t step = 0;
  std::string config_echo;
  uint64_t manifest_hash = 0;
  std::string rng_state;
  std::map<std::string, Tensor> gen_params;
  std::map<std::string, Tensor> disc_params;
  std::map<std::string, Tensor> opt_g_m, opt_g_v;
  int64_t opt_g_t = 0;
  std::map<std::string, Tensor> opt_d_m, opt_d_v;
  int64_t opt_d_t = 0;
};

namespace detail {

inline void WriteU32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void WriteU64(std::ostream& os, uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void WriteI64(std::ostream& os, int64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void WriteStr(std::ostream& os, const std::string& s) {
  WriteU64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
inline void WriteTensor(std::ostream& os, const Tensor& t) {
  WriteU32(os, static_cast<uint32_t>(t.ndim()));
  for (int i = 0; i < t.ndim(); ++i) WriteI64(os, t.dim(i));
  os.write(reinterpret_cast<const char*>(t.data()),
           static_cast<std::streamsize>(t.numel() * sizeof(real)));
}
inline void WriteTensorMap(std::ostream& os, const std::map<std::string, Tensor>& m) {
  WriteU64(os, m.size());
  for (const auto& [name, t] : m) {
    WriteStr(os, name);
    WriteTensor(os, t);
  }
}

inline uint32_t ReadU32(std::istream& is) {
  uint32_t v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
inline uint64_t ReadU64(std::istream& is) {
  uint64_t v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
inline int64_t ReadI64(std::istream& is) {
  int64_t v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
inline std::string ReadStr(std::istream& is) {
  uint64_t n = ReadU64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}
inline Tensor ReadTensor(std::istream& is) {
  uint32_t nd = ReadU32(is);
  std::vector<int64_t> shape(nd);
  for (auto& d : shape) d = ReadI64(is);
  Tensor t(shape);
  is.read(reinterpret_cast<char*>(t.data()),
          static_cast<std::streamsize>(t.numel() * sizeof(real)));
  return t;
}
inline std::map<std::string, Tensor> ReadTensorMap(std::istream& is) {
  std::map<std::string, Tensor> m;
  uint64_t n = ReadU64(is);
  for (uint64_t i = 0; i < n; ++i) {
    std::string name = ReadStr(is);
    m[name] = ReadTensor(is);
  }
  return m;
}

}  // namespace detail

// Atomic write: temp file then rename.
inline void SaveCheckpoint(const Checkpoint& ck, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + tmp);
    os.write(Checkpoint::kMagic, 4);
    detail::WriteU32(os, Checkpoint::kVersion);
    detail::WriteU64(os, ck.step);
    detail::WriteStr(os, ck.config_echo);
    detail::WriteU64(os, ck.manifest_hash);
    detail::WriteStr(os, ck.rng_state);
    detail::WriteTensorMap(os, ck.gen_params);
    detail::WriteTensorMap(os, ck.disc_params);
    detail::WriteTensorMap(os, ck.opt_g_m);
    detail::WriteTensorMap(os, ck.opt_g_v);
    detail::WriteI64(os, ck.opt_g_t);
    detail::WriteTensorMap(os, ck.opt_d_m);
    detail::WriteTensorMap(os, ck.opt_d_v);
    detail::WriteI64(os, ck.opt_d_t);
    if (!os) throw std::runtime_error("checkpoint write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "MKPT")
    throw std::runtime_error("not a checkpoint file (bad magic): " + path);
  uint32_t version = detail::ReadU32(is);
  if (version != Checkpoint::kVersion)
    throw std::runtime_error("checkpoint format version " + std::to_string(version) +
                             " unsupported (this build reads version " +
                             std::to_string(Checkpoint::kVersion) + "): " + path);
  Checkpoint ck;
  ck.step = detail::ReadU64(is);
  ck.config_echo = detail::ReadStr(is);
  ck.manifest_hash = detail::ReadU64(is);
  ck.rng_state = detail::ReadStr(is);
  ck.gen_params = detail::ReadTensorMap(is);
  ck.disc_params = detail::ReadTensorMap(is);
  ck.opt_g_m = detail::ReadTensorMap(is);
  ck.opt_g_v = detail::ReadTensorMap(is);
  ck.opt_g_t = detail::ReadI64(is);
  ck.opt_d_m = detail::ReadTensorMap(is);
  ck.opt_d_v = detail::ReadTensorMap(is);
  ck.opt_d_t = detail::ReadI64(is);
  if (!is) throw std::runtime_error("truncated checkpoint: " + path);
  return ck;
}

}  // namespace minpaint

#endif  // MINPAINT_TRAIN_CHECKPOINT_H_
