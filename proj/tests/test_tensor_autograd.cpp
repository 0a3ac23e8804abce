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

#include "minpaint/core/autograd.h"
#include "minpaint/core/rng.h"
#include "test_util.h"

using namespace minpaint;
using testutil::GradCheckParams;

namespace {

// Naive convolution, the oracle for the im2col path.
Tensor NaiveConv(const Tensor& x, const Tensor& w, const Tensor& b,
                 const ConvSpec& cs) {
  const int64_t N = x.dim(0), Ci = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int64_t Co = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const int64_t Ho = cs.OutDim(H, kh), Wo = cs.OutDim(W, kw);
  Tensor y({N, Co, Ho, Wo});
  for (int64_t n = 0; n < N; ++n)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t oy = 0; oy < Ho; ++oy)
        for (int64_t ox = 0; ox < Wo; ++ox) {
          real acc = b.numel() ? b[co] : 0;
          for (int64_t ci = 0; ci < Ci; ++ci)
            for (int64_t dy = 0; dy < kh; ++dy)
              for (int64_t dx = 0; dx < kw; ++dx) {
                int64_t iy = oy * cs.stride - cs.pad + dy * cs.dilation;
                int64_t ix = ox * cs.stride - cs.pad + dx * cs.dilation;
                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                acc += x.at4(n, ci, iy, ix) * w.at4(co, ci, dy, dx);
              }
          y.at4(n, co, oy, ox) = acc;
        }
  return y;
}

}  // namespace

TEST_CASE("conv forward matches the naive oracle") {
  Rng rng(5);
  for (ConvSpec cs : {ConvSpec{1, 1, 1}, ConvSpec{2, 1, 1}, ConvSpec{1, 2, 2},
                      ConvSpec{1, 0, 1}}) {
    Tensor x = rng.NormalTensor({2, 3, 9, 7});
    Tensor w = rng.NormalTensor({4, 3, 3, 3});
    Tensor b = rng.NormalTensor({4});
    Tensor got = ConvForwardCore(x, w, b, cs);
    Tensor want = NaiveConv(x, w, b, cs);
    REQUIRE(got.shape() == want.shape());
    for (int64_t i = 0; i < got.numel(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("elementwise and reduction ops backprop correctly") {
  Rng rng(7);
  ParamStore store;
  Value a = store.Create("a", rng.NormalTensor({2, 3, 4, 4}));
  Value b = store.Create("b", rng.NormalTensor({2, 3, 4, 4}));

  auto loss = [&] {
    Value m = Mul(LeakyRelu(a), Tanh(b));
    Value s = Softplus(Sub(m, Abs(b)));
    return MeanAll(Add(Square(s), Sigmoid(a)));
  };
  auto res = GradCheckParams({&store}, loss, 60, 1e-4);
  CHECK(res.failed == 0);
}

TEST_CASE("linear backprop matches finite differences") {
  Rng rng(9);
  ParamStore store;
  Value x = store.Create("x", rng.NormalTensor({5, 7}));
  Value w = store.Create("w", rng.NormalTensor({3, 7}));
  Value b = store.Create("b", rng.NormalTensor({3}));
  auto loss = [&] { return MeanAll(Square(Linear(x, w, b))); };
  auto res = GradCheckParams({&store}, loss, 45, 1e-4);
  CHECK(res.failed == 0);
}

TEST_CASE("conv backprop (strided, padded, dilated) matches finite differences") {
  Rng rng(13);
  for (ConvSpec cs : {ConvSpec{1, 1, 1}, ConvSpec{2, 1, 1}, ConvSpec{1, 2, 2}}) {
    ParamStore store;
    Value x = store.Create("x", rng.NormalTensor({2, 2, 8, 8}));
    Value w = store.Create("w", rng.NormalTensor({3, 2, 3, 3}));
    Value b = store.Create("b", rng.NormalTensor({3}));
    auto loss = [&] { return MeanAll(Square(Conv2d(x, w, b, cs))); };
    auto res = GradCheckParams({&store}, loss, 40, 1e-4);
    CHECK(res.failed == 0);
  }
}

TEST_CASE("shape ops backprop: concat, upsample, channel scale, reshape, tile") {
  Rng rng(17);
  ParamStore store;
  Value a = store.Create("a", rng.NormalTensor({2, 2, 4, 4}));
  Value b = store.Create("b", rng.NormalTensor({2, 3, 8, 8}));
  Value s = store.Create("s", rng.NormalTensor({2, 2}));
  Value wrow = store.Create("wrow", rng.NormalTensor({1, 6}));
  auto loss = [&] {
    Value up = UpsampleNearest2x(ChannelScale(a, s));
    Value cat = ConcatChannels(up, b);
    Value flat = Reshape(cat, {2, cat->val.numel() / 2});
    Value tiled = Reshape(TileRows(wrow, 2), {2, 6});
    return Add(MeanAll(Square(flat)), MeanAll(Mul(tiled, tiled)));
  };
  auto res = GradCheckParams({&store}, loss, 60, 1e-4);
  CHECK(res.failed == 0);
}

TEST_CASE("adjoint conv op is the exact input gradient and is itself differentiable") {
  Rng rng(19);
  ConvSpec cs{2, 1, 1};
  Tensor x = rng.NormalTensor({1, 2, 8, 8});
  Tensor w = rng.NormalTensor({3, 2, 3, 3});

  // <u, A(w) g> must equal <C(w) u, g> for the adjoint pair.
  Tensor g = rng.NormalTensor({1, 2, 8, 8});  // input-shaped
  Tensor u = rng.NormalTensor({1, 3, 4, 4});  // output-shaped
  Tensor Au = ConvInputGradCore(u, w, cs, 8, 8);
  Tensor Cg = ConvForwardCore(g, w, Tensor(), cs);
  real lhs = 0, rhs = 0;
  for (int64_t i = 0; i < g.numel(); ++i) lhs += Au[i] * g[i];
  for (int64_t i = 0; i < u.numel(); ++i) rhs += Cg[i] * u[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  // the graph op's own gradients
  ParamStore store;
  Value gv = store.Create("g", rng.NormalTensor({1, 3, 4, 4}));
  Value wv = store.Create("w", w);
  auto loss = [&] { return MeanAll(Square(ConvInputGrad(gv, wv, cs, 8, 8))); };
  auto res = GradCheckParams({&store}, loss, 40, 1e-4);
  CHECK(res.failed == 0);
}

TEST_CASE("backward on a diamond graph accumulates both paths") {
  ParamStore store;
  Value x = store.Create("x", Tensor::Scalar(3));
  Value y = Add(Mul(x, x), Scale(x, 2));  // x^2 + 2x, dy/dx = 2x + 2 = 8
  Backward(y);
  CHECK(x->grad[0] == doctest::Approx(8.0));
}

TEST_CASE("softplus is overflow-safe at extreme logits") {
  CHECK(SoftplusScalar(0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(SoftplusScalar(-800) == 0.0);
  CHECK(SoftplusScalar(800) == doctest::Approx(800.0));
  CHECK(std::isfinite(SoftplusScalar(1e308)));
}

TEST_CASE("tensor invariants: shape checks and reshape") {
  Tensor t({2, 3});
  CHECK(t.numel() == 6);
  CHECK_THROWS(t.Reshaped({4, 2}));
  CHECK(t.Reshaped({3, 2}).dim(0) == 3);
  CHECK_THROWS(Tensor({2}, {1, 2, 3}));
}
