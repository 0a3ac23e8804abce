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

#ifndef MINPAINT_CORE_RNG_H_
#define MINPAINT_CORE_RNG_H_

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "minpaint/core/tensor.h"

namespace minpaint {

// FNV-1a, used to derive per-sample seeds and to hash manifests.
inline uint64_t Fnv1a(const std::string& s, uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t MixSeed(uint64_t seed, const std::string& tag) {
  std::ostringstream os;
  os << seed << '/' << tag;
  return Fnv1a(os.str());
}

class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  real Normal(real mean = 0, real stddev = 1) {
    std::normal_distribution<real> d(mean, stddev);
    return d(engine_);
  }
  real Uniform(real lo = 0, real hi = 1) {
    std::uniform_real_distribution<real> d(lo, hi);
    return d(engine_);
  }
  bool Bernoulli(real p) { return Uniform() < p; }
  int64_t UniformInt(int64_t lo, int64_t hi) {  // inclusive
    std::uniform_int_distribution<int64_t> d(lo, hi);
    return d(engine_);
  }

  Tensor NormalTensor(std::vector<int64_t> shape, real stddev = 1) {
    Tensor t(std::move(shape));
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = Normal(0, stddev);
    return t;
  }
  Tensor UniformTensor(std::vector<int64_t> shape, real lo, real hi) {
    Tensor t(std::move(shape));
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = Uniform(lo, hi);
    return t;
  }

  std::mt19937_64& engine() { return engine_; }

  std::string SerializeState() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }
  void RestoreState(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace minpaint

#endif  // MINPAINT_CORE_RNG_H_
