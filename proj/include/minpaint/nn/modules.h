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

#ifndef MINPAINT_NN_MODULES_H_
#define MINPAINT_NN_MODULES_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "minpaint/core/autograd.h"
#include "minpaint/core/rng.h"

namespace minpaint {

// Named parameter container; the unit of optimization and checkpointing.
// Iteration order is the (deterministic) lexicographic name order.
class ParamStore {
 public:
  Value Create(const std::string& name, Tensor init) {
    if (params_.count(name))
      throw std::invalid_argument("duplicate parameter: " + name);
    Value v = Leaf(std::move(init));
    params_[name] = v;
    return v;
  }
  Value Get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end())
      throw std::invalid_argument("unknown parameter: " + name);
    return it->second;
  }
  const std::map<std::string, Value>& All() const { return params_; }

  int64_t TotalParams() const {
    int64_t n = 0;
    for (const auto& [k, v] : params_) n += v->val.numel();
    return n;
  }
  void ZeroGrad() {
    for (auto& [k, v] : params_) v->grad = Tensor();
  }

 private:
  std::map<std::string, Value> params_;
};

namespace init {

inline Tensor HeNormal(std::vector<int64_t> shape, int64_t fan_in, Rng& rng) {
  return rng.NormalTensor(std::move(shape), std::sqrt(real(2) / real(fan_in)));
}

}  // namespace init

struct Dense {
  Value w, b;

  static Dense Make(ParamStore& store, const std::string& name, int64_t in,
                    int64_t out, uint64_t seed, real bias_init = 0) {
    Rng rng(MixSeed(seed, name));
    Dense d;
    d.w = store.Create(name + ".w", init::HeNormal({out, in}, in, rng));
    d.b = store.Create(name + ".b", Tensor::Full({out}, bias_init));
    return d;
  }
  Value Apply(const Value& x) const { return Linear(x, w, b); }
};

struct ConvLayer {
  Value w, b;
  ConvSpec cs;

  static ConvLayer Make(ParamStore& store, const std::string& name, int64_t ci,
                        int64_t co, int64_t k, ConvSpec cs, uint64_t seed) {
    Rng rng(MixSeed(seed, name));
    ConvLayer l;
    l.w = store.Create(name + ".w", init::HeNormal({co, ci, k, k}, ci * k * k, rng));
    l.b = store.Create(name + ".b", Tensor({co}));
    l.cs = cs;
    return l;
  }
  Value Apply(const Value& x) const { return Conv2d(x, w, b, cs); }
};

}  // namespace minpaint

#endif  // MINPAINT_NN_MODULES_H_
