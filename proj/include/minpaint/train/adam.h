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

#ifndef MINPAINT_TRAIN_ADAM_H_
#define MINPAINT_TRAIN_ADAM_H_

#include <cmath>
#include <map>
#include <string>

#include "minpaint/nn/modules.h"

namespace minpaint {

// Adam with the canonical defaults; one instance per network.
class Adam {
 public:
  explicit Adam(real lr, real beta1 = 0.9, real beta2 = 0.999, real eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void Step(ParamStore& store) {
    ++t_;
    const real bc1 = 1 - std::pow(beta1_, t_);
    const real bc2 = 1 - std::pow(beta2_, t_);
    for (const auto& [name, p] : store.All()) {
      if (p->grad.numel() == 0) continue;  // parameter untouched this step
      Tensor& m = m_[name];
      Tensor& v = v_[name];
      if (m.numel() == 0) {
        m = Tensor::Zeros(p->val.shape());
        v = Tensor::Zeros(p->val.shape());
      }
      for (int64_t i = 0; i < p->val.numel(); ++i) {
        const real g = p->grad[i];
        m[i] = beta1_ * m[i] + (1 - beta1_) * g;
        v[i] = beta2_ * v[i] + (1 - beta2_) * g * g;
        p->val[i] -= lr_ * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps_);
      }
    }
  }

  real lr() const { return lr_; }
  void set_lr(real lr) { lr_ = lr; }
  int64_t step_count() const { return t_; }

  // Checkpoint access.
  std::map<std::string, Tensor>& moments1() { return m_; }
  std::map<std::string, Tensor>& moments2() { return v_; }
  const std::map<std::string, Tensor>& moments1() const { return m_; }
  const std::map<std::string, Tensor>& moments2() const { return v_; }
  void set_step_count(int64_t t) { t_ = t; }

 private:
  real lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::map<std::string, Tensor> m_, v_;
};

}  // namespace minpaint

#endif  // MINPAINT_TRAIN_ADAM_H_
