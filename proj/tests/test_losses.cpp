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

#include <cmath>

#include "minpaint/nn/losses.h"
#include "test_util.h"

using namespace minpaint;

TEST_CASE("generator adversarial loss at zero logits is ln 2") {
  Value logits = Constant(Tensor({4, 1}));  // all zeros
  CHECK(AdvLossGenerator(logits)->val[0] ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("discriminator adversarial loss at zero logits is 2 ln 2") {
  Value zeros = Constant(Tensor({3, 1}));
  CHECK(AdvLossDiscriminator(zeros, zeros)->val[0] ==
        doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("adversarial losses fall as the expected player wins") {
  Value strong = Constant(Tensor::Full({2, 1}, 10));
  Value weak = Constant(Tensor::Full({2, 1}, -10));
  // generator wants positive fake logits
  CHECK(AdvLossGenerator(strong)->val[0] < AdvLossGenerator(weak)->val[0]);
  // discriminator wants positive real, negative fake
  CHECK(AdvLossDiscriminator(strong, weak)->val[0] <
        AdvLossDiscriminator(weak, strong)->val[0]);
}

TEST_CASE("reconstruction loss endpoints: identical images 0, opposite saturated 2") {
  Rng rng(31);
  Tensor a = rng.UniformTensor({1, 3, 8, 8}, -1, 1);
  CHECK(RecLoss(Constant(a), Constant(a))->val[0] == 0.0);
  Tensor ones = Tensor::Full({1, 3, 8, 8}, 1);
  Tensor neg = Tensor::Full({1, 3, 8, 8}, -1);
  CHECK(RecLoss(Constant(ones), Constant(neg))->val[0] == 2.0);
}

TEST_CASE("reconstruction loss equals a mean-absolute-difference oracle") {
  Rng rng(32);
  Tensor a = rng.UniformTensor({2, 3, 6, 6}, -1, 1);
  Tensor b = rng.UniformTensor({2, 3, 6, 6}, -1, 1);
  real want = 0;
  for (int64_t i = 0; i < a.numel(); ++i) want += std::abs(a[i] - b[i]);
  want /= a.numel();
  CHECK(RecLoss(Constant(a), Constant(b))->val[0] ==
        doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("perceptual loss with identity features reduces to pixel MSE") {
  Rng rng(33);
  Tensor a = rng.UniformTensor({2, 3, 8, 8}, -1, 1);
  Tensor b = rng.UniformTensor({2, 3, 8, 8}, -1, 1);
  real mse = 0;
  for (int64_t i = 0; i < a.numel(); ++i) mse += (a[i] - b[i]) * (a[i] - b[i]);
  mse /= a.numel();
  IdentityFeatures feat;
  CHECK(HrfplLoss(Constant(a), Constant(b), feat)->val[0] ==
        doctest::Approx(mse).epsilon(1e-9));
}

TEST_CASE("frozen random features are deterministic, nonzero, and zero at equal inputs") {
  FrozenRandomFeatures f1(7), f2(7);
  Rng rng(34);
  Tensor img = rng.UniformTensor({1, 3, 16, 16}, -1, 1);
  Value a = f1.Features(Constant(img));
  Value b = f2.Features(Constant(img));
  REQUIRE(a->val.SameShape(b->val));
  for (int64_t i = 0; i < a->val.numel(); ++i) REQUIRE(a->val[i] == b->val[i]);
  CHECK(HrfplLoss(Constant(img), Constant(img), f1)->val[0] == 0.0);
  Tensor other = rng.UniformTensor({1, 3, 16, 16}, -1, 1);
  CHECK(HrfplLoss(Constant(img), Constant(other), f1)->val[0] > 0);
}

TEST_CASE("frozen features keep spatial dims (dilated convs, pad == dilation)") {
  FrozenRandomFeatures f(7);
  Rng rng(35);
  Value out = f.Features(Constant(rng.UniformTensor({2, 3, 32, 32}, -1, 1)));
  CHECK(out->val.dim(2) == 32);
  CHECK(out->val.dim(3) == 32);
}

TEST_CASE("total loss combines terms with the default weights") {
  LossWeights w;  // lambda_rec 10, lambda_hrfpl 5
  Value adv = Constant(Tensor::Scalar(0.7));
  Value hrfpl = Constant(Tensor::Scalar(0.2));
  Value rec = Constant(Tensor::Scalar(0.05));
  // 0.7 + 5*0.2 + 10*0.05 = 2.2
  CHECK(TotalLoss(adv, hrfpl, rec, w)->val[0] == doctest::Approx(2.2).epsilon(1e-12));
  LossBundle b = BundleOf(adv, hrfpl, rec, w);
  CHECK(b.total == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(b.Consistent(w));
}

TEST_CASE("zeroed weights drop their terms") {
  LossWeights w;
  w.lambda_rec = 0;
  w.lambda_hrfpl = 0;
  Value adv = Constant(Tensor::Scalar(0.3));
  Value big = Constant(Tensor::Scalar(100));
  CHECK(TotalLoss(adv, big, big, w)->val[0] == doctest::Approx(0.3));
  w.lambda_rec = -1;
  CHECK_THROWS(TotalLoss(adv, big, big, w));
}

TEST_CASE("losses are differentiable end to end") {
  Rng rng(36);
  ParamStore store;
  Value out = store.Create("out", rng.UniformTensor({1, 3, 8, 8}, -0.9, 0.9));
  Value tgt = Constant(rng.UniformTensor({1, 3, 8, 8}, -0.9, 0.9));
  FrozenRandomFeatures feat(7);
  LossWeights w;
  auto loss = [&] {
    Value rec = RecLoss(out, tgt);
    Value hr = HrfplLoss(out, tgt, feat);
    Value adv = Constant(Tensor::Scalar(0));
    return TotalLoss(adv, hr, rec, w);
  };
  auto res = testutil::GradCheckParams({&store}, loss, 40, 2e-3);
  CHECK(res.failed == 0);
}
