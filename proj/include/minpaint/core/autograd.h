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

#ifndef MINPAINT_CORE_AUTOGRAD_H_
#define MINPAINT_CORE_AUTOGRAD_H_

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <unordered_set>
#include <utility>
#include <vector>

#include "minpaint/core/tensor.h"

namespace minpaint {

// Reverse-mode tape over Tensor. Nodes are built eagerly; Backward() walks
// the graph in reverse topological order.
struct Node;
using Value = std::shared_ptr<Node>;

struct Node {
  Tensor val;
  Tensor grad;  // allocated by Backward()
  bool requires_grad = false;
  std::vector<Value> parents;
  std::function<void(Node&)> backprop;  // scatter this->grad into parents

  explicit Node(Tensor v) : val(std::move(v)) {}
};

inline Value Constant(Tensor t) { return std::make_shared<Node>(std::move(t)); }

inline Value Leaf(Tensor t) {
  auto n = std::make_shared<Node>(std::move(t));
  n->requires_grad = true;
  return n;
}

namespace detail {

inline Value MakeOp(Tensor out, std::vector<Value> parents,
                    std::function<void(Node&)> backprop) {
  auto n = std::make_shared<Node>(std::move(out));
  for (const auto& p : parents)
    if (p->requires_grad) n->requires_grad = true;
  if (n->requires_grad) {
    n->parents = std::move(parents);
    n->backprop = std::move(backprop);
  }
  return n;
}

inline void Accum(Node& p, const Tensor& g) {
  if (!p.requires_grad) return;
  if (p.grad.numel() == 0) p.grad = Tensor::Zeros(p.val.shape());
  for (int64_t i = 0; i < g.numel(); ++i) p.grad[i] += g[i];
}

using EMat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const EMat>;
using MMap = Eigen::Map<EMat>;

}  // namespace detail

// ---------------------------------------------------------------------------
// Convolution cores (plain Tensor in / Tensor out, shared by ops below).
// ---------------------------------------------------------------------------

struct ConvSpec {
  int stride = 1;
  int pad = 0;
  int dilation = 1;
  int64_t OutDim(int64_t in, int64_t k) const {
    return (in + 2 * pad - dilation * (k - 1) - 1) / stride + 1;
  }
};

namespace detail {

// col buffer layout: [Ci*kh*kw, Ho*Wo], one sample at a time.
inline void Im2Col(const Tensor& x, int64_t n, int64_t kh, int64_t kw,
                   const ConvSpec& cs, std::vector<real>& col) {
  const int64_t Ci = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int64_t Ho = cs.OutDim(H, kh), Wo = cs.OutDim(W, kw);
  col.assign(Ci * kh * kw * Ho * Wo, real(0));
  const real* xp = x.data() + n * Ci * H * W;
  int64_t row = 0;
  for (int64_t c = 0; c < Ci; ++c) {
    for (int64_t dy = 0; dy < kh; ++dy) {
      for (int64_t dx = 0; dx < kw; ++dx, ++row) {
        real* dst = col.data() + row * Ho * Wo;
        for (int64_t oy = 0; oy < Ho; ++oy) {
          int64_t iy = oy * cs.stride - cs.pad + dy * cs.dilation;
          if (iy < 0 || iy >= H) continue;
          const real* src = xp + (c * H + iy) * W;
          for (int64_t ox = 0; ox < Wo; ++ox) {
            int64_t ix = ox * cs.stride - cs.pad + dx * cs.dilation;
            if (ix >= 0 && ix < W) dst[oy * Wo + ox] = src[ix];
          }
        }
      }
    }
  }
}

inline void Col2ImAdd(const std::vector<real>& col, Tensor& gx, int64_t n,
                      int64_t kh, int64_t kw, const ConvSpec& cs) {
  const int64_t Ci = gx.dim(1), H = gx.dim(2), W = gx.dim(3);
  const int64_t Ho = cs.OutDim(H, kh), Wo = cs.OutDim(W, kw);
  real* gp = gx.data() + n * Ci * H * W;
  int64_t row = 0;
  for (int64_t c = 0; c < Ci; ++c) {
    for (int64_t dy = 0; dy < kh; ++dy) {
      for (int64_t dx = 0; dx < kw; ++dx, ++row) {
        const real* src = col.data() + row * Ho * Wo;
        for (int64_t oy = 0; oy < Ho; ++oy) {
          int64_t iy = oy * cs.stride - cs.pad + dy * cs.dilation;
          if (iy < 0 || iy >= H) continue;
          real* dst = gp + (c * H + iy) * W;
          for (int64_t ox = 0; ox < Wo; ++ox) {
            int64_t ix = ox * cs.stride - cs.pad + dx * cs.dilation;
            if (ix >= 0 && ix < W) dst[ix] += src[oy * Wo + ox];
          }
        }
      }
    }
  }
}

}  // namespace detail

// y[N,Co,Ho,Wo] = conv(x[N,Ci,H,W], w[Co,Ci,kh,kw]); bias optional (size 0).
inline Tensor ConvForwardCore(const Tensor& x, const Tensor& w, const Tensor& b,
                              const ConvSpec& cs) {
  const int64_t N = x.dim(0), Ci = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int64_t Co = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  if (w.dim(1) != Ci)
    throw std::invalid_argument("conv: channel mismatch " + x.ShapeStr() + " vs " + w.ShapeStr());
  const int64_t Ho = cs.OutDim(H, kh), Wo = cs.OutDim(W, kw);
  Tensor y({N, Co, Ho, Wo});
  std::vector<real> col;
  detail::CMap wm(w.data(), Co, Ci * kh * kw);
  for (int64_t n = 0; n < N; ++n) {
    detail::Im2Col(x, n, kh, kw, cs, col);
    detail::CMap cm(col.data(), Ci * kh * kw, Ho * Wo);
    detail::MMap ym(y.data() + n * Co * Ho * Wo, Co, Ho * Wo);
    ym.noalias() = wm * cm;
  }
  if (b.numel() > 0) {
    for (int64_t n = 0; n < N; ++n)
      for (int64_t c = 0; c < Co; ++c) {
        real* yp = y.data() + (n * Co + c) * Ho * Wo;
        for (int64_t i = 0; i < Ho * Wo; ++i) yp[i] += b[c];
      }
  }
  return y;
}

// Adjoint of ConvForwardCore in its input slot.
inline Tensor ConvInputGradCore(const Tensor& gy, const Tensor& w,
                                const ConvSpec& cs, int64_t H, int64_t W) {
  const int64_t N = gy.dim(0), Co = gy.dim(1), Ho = gy.dim(2), Wo = gy.dim(3);
  const int64_t Ci = w.dim(1), kh = w.dim(2), kw = w.dim(3);
  Tensor gx({N, Ci, H, W});
  std::vector<real> col(Ci * kh * kw * Ho * Wo);
  detail::CMap wm(w.data(), Co, Ci * kh * kw);
  for (int64_t n = 0; n < N; ++n) {
    detail::CMap gm(gy.data() + n * Co * Ho * Wo, Co, Ho * Wo);
    detail::MMap cm(col.data(), Ci * kh * kw, Ho * Wo);
    cm.noalias() = wm.transpose() * gm;
    detail::Col2ImAdd(col, gx, n, kh, kw, cs);
  }
  return gx;
}

inline Tensor ConvWeightGradCore(const Tensor& x, const Tensor& gy,
                                 const ConvSpec& cs, int64_t kh, int64_t kw) {
  const int64_t N = x.dim(0), Ci = x.dim(1);
  const int64_t Co = gy.dim(1), Ho = gy.dim(2), Wo = gy.dim(3);
  Tensor gw({Co, Ci, kh, kw});
  std::vector<real> col;
  detail::MMap gwm(gw.data(), Co, Ci * kh * kw);
  for (int64_t n = 0; n < N; ++n) {
    detail::Im2Col(x, n, kh, kw, cs, col);
    detail::CMap cm(col.data(), Ci * kh * kw, Ho * Wo);
    detail::CMap gm(gy.data() + n * Co * Ho * Wo, Co, Ho * Wo);
    gwm.noalias() += gm * cm.transpose();
  }
  return gw;
}

// ---------------------------------------------------------------------------
// Graph ops.
// ---------------------------------------------------------------------------

inline Value Add(const Value& a, const Value& b) {
  CheckSameShape(a->val, b->val, "Add");
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] += b->val[i];
  return detail::MakeOp(std::move(out), {a, b}, [](Node& n) {
    detail::Accum(*n.parents[0], n.grad);
    detail::Accum(*n.parents[1], n.grad);
  });
}

inline Value Sub(const Value& a, const Value& b) {
  CheckSameShape(a->val, b->val, "Sub");
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] -= b->val[i];
  return detail::MakeOp(std::move(out), {a, b}, [](Node& n) {
    detail::Accum(*n.parents[0], n.grad);
    Tensor neg = n.grad;
    for (int64_t i = 0; i < neg.numel(); ++i) neg[i] = -neg[i];
    detail::Accum(*n.parents[1], neg);
  });
}

inline Value Mul(const Value& a, const Value& b) {
  CheckSameShape(a->val, b->val, "Mul");
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= b->val[i];
  return detail::MakeOp(std::move(out), {a, b}, [](Node& n) {
    Tensor ga = n.grad, gb = n.grad;
    const Tensor& av = n.parents[0]->val;
    const Tensor& bv = n.parents[1]->val;
    for (int64_t i = 0; i < ga.numel(); ++i) {
      ga[i] *= bv[i];
      gb[i] *= av[i];
    }
    detail::Accum(*n.parents[0], ga);
    detail::Accum(*n.parents[1], gb);
  });
}

inline Value Scale(const Value& a, real c) {
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= c;
  return detail::MakeOp(std::move(out), {a}, [c](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i) g[i] *= c;
    detail::Accum(*n.parents[0], g);
  });
}

// Elementwise multiply by a constant tensor (e.g. a mask).
inline Value MulConst(const Value& a, Tensor mask) {
  CheckSameShape(a->val, mask, "MulConst");
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= mask[i];
  auto m = std::make_shared<Tensor>(std::move(mask));
  return detail::MakeOp(std::move(out), {a}, [m](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i) g[i] *= (*m)[i];
    detail::Accum(*n.parents[0], g);
  });
}

inline Value LeakyRelu(const Value& a, real slope = 0.2) {
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i)
    if (out[i] < 0) out[i] *= slope;
  return detail::MakeOp(std::move(out), {a}, [slope](Node& n) {
    Tensor g = n.grad;
    const Tensor& x = n.parents[0]->val;
    for (int64_t i = 0; i < g.numel(); ++i)
      if (x[i] < 0) g[i] *= slope;
    detail::Accum(*n.parents[0], g);
  });
}

inline Value Tanh(const Value& a) {
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::tanh(out[i]);
  auto y = std::make_shared<Tensor>(out);
  return detail::MakeOp(std::move(out), {a}, [y](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i) g[i] *= 1 - (*y)[i] * (*y)[i];
    detail::Accum(*n.parents[0], g);
  });
}

inline real SoftplusScalar(real x) {
  // log(1 + e^x), overflow-safe.
  return std::max(x, real(0)) + std::log1p(std::exp(-std::abs(x)));
}

inline Value Softplus(const Value& a) {
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = SoftplusScalar(out[i]);
  return detail::MakeOp(std::move(out), {a}, [](Node& n) {
    Tensor g = n.grad;
    const Tensor& x = n.parents[0]->val;
    for (int64_t i = 0; i < g.numel(); ++i)
      g[i] *= real(1) / (real(1) + std::exp(-x[i]));
    detail::Accum(*n.parents[0], g);
  });
}

inline Value Sigmoid(const Value& a) {
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i)
    out[i] = real(1) / (real(1) + std::exp(-out[i]));
  auto y = std::make_shared<Tensor>(out);
  return detail::MakeOp(std::move(out), {a}, [y](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i) g[i] *= (*y)[i] * (1 - (*y)[i]);
    detail::Accum(*n.parents[0], g);
  });
}

// [N,C,H,W] -> [N,C] spatial mean.
inline Value GlobalAvgPool(const Value& x) {
  const int64_t N = x->val.dim(0), C = x->val.dim(1);
  const int64_t hw = x->val.dim(2) * x->val.dim(3);
  Tensor out({N, C});
  for (int64_t nc = 0; nc < N * C; ++nc) {
    const real* p = x->val.data() + nc * hw;
    real s = 0;
    for (int64_t i = 0; i < hw; ++i) s += p[i];
    out[nc] = s / real(hw);
  }
  return detail::MakeOp(std::move(out), {x}, [N, C, hw](Node& n) {
    Tensor gx(n.parents[0]->val.shape());
    for (int64_t nc = 0; nc < N * C; ++nc) {
      real g = n.grad[nc] / real(hw);
      real* p = gx.data() + nc * hw;
      for (int64_t i = 0; i < hw; ++i) p[i] = g;
    }
    detail::Accum(*n.parents[0], gx);
  });
}

inline Value Abs(const Value& a) {
  Tensor out = a->val;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::abs(out[i]);
  return detail::MakeOp(std::move(out), {a}, [](Node& n) {
    Tensor g = n.grad;
    const Tensor& x = n.parents[0]->val;
    for (int64_t i = 0; i < g.numel(); ++i)
      if (x[i] < 0) g[i] = -g[i];
    detail::Accum(*n.parents[0], g);
  });
}

inline Value Square(const Value& a) { return Mul(a, a); }

inline Value MeanAll(const Value& a) {
  const int64_t n = a->val.numel();
  real s = 0;
  for (int64_t i = 0; i < n; ++i) s += a->val[i];
  return detail::MakeOp(Tensor::Scalar(s / real(n)), {a}, [n](Node& nd) {
    Tensor g = Tensor::Full(nd.parents[0]->val.shape(), nd.grad[0] / real(n));
    detail::Accum(*nd.parents[0], g);
  });
}

inline Value SumAll(const Value& a) {
  real s = 0;
  for (int64_t i = 0; i < a->val.numel(); ++i) s += a->val[i];
  return detail::MakeOp(Tensor::Scalar(s), {a}, [](Node& nd) {
    Tensor g = Tensor::Full(nd.parents[0]->val.shape(), nd.grad[0]);
    detail::Accum(*nd.parents[0], g);
  });
}

inline Value Reshape(const Value& a, std::vector<int64_t> shape) {
  Tensor out = a->val.Reshaped(shape);
  return detail::MakeOp(std::move(out), {a}, [](Node& n) {
    detail::Accum(*n.parents[0], n.grad.Reshaped(n.parents[0]->val.shape()));
  });
}

// y = x @ W^T + b.  x:[N,I], W:[O,I], b:[O] (or empty).
inline Value Linear(const Value& x, const Value& w, const Value& b) {
  const int64_t N = x->val.dim(0), I = x->val.dim(1), O = w->val.dim(0);
  if (w->val.dim(1) != I)
    throw std::invalid_argument("Linear: dimension mismatch");
  Tensor out({N, O});
  {
    detail::CMap xm(x->val.data(), N, I), wm(w->val.data(), O, I);
    detail::MMap om(out.data(), N, O);
    om.noalias() = xm * wm.transpose();
  }
  const bool has_b = b && b->val.numel() > 0;
  if (has_b)
    for (int64_t n = 0; n < N; ++n)
      for (int64_t o = 0; o < O; ++o) out[n * O + o] += b->val[o];
  std::vector<Value> parents = {x, w};
  if (has_b) parents.push_back(b);
  return detail::MakeOp(std::move(out), parents, [N, I, O, has_b](Node& n) {
    detail::CMap gm(n.grad.data(), N, O);
    detail::CMap xm(n.parents[0]->val.data(), N, I);
    detail::CMap wm(n.parents[1]->val.data(), O, I);
    Tensor gx({N, I}), gw({O, I});
    detail::MMap gxm(gx.data(), N, I), gwm(gw.data(), O, I);
    gxm.noalias() = gm * wm;
    gwm.noalias() = gm.transpose() * xm;
    detail::Accum(*n.parents[0], gx);
    detail::Accum(*n.parents[1], gw);
    if (has_b) {
      Tensor gb({O});
      for (int64_t r = 0; r < N; ++r)
        for (int64_t o = 0; o < O; ++o) gb[o] += n.grad[r * O + o];
      detail::Accum(*n.parents[2], gb);
    }
  });
}

inline Value Conv2d(const Value& x, const Value& w, const Value& b,
                    const ConvSpec& cs) {
  const bool has_b = b && b->val.numel() > 0;
  Tensor out = ConvForwardCore(x->val, w->val, has_b ? b->val : Tensor(), cs);
  std::vector<Value> parents = {x, w};
  if (has_b) parents.push_back(b);
  return detail::MakeOp(std::move(out), parents, [cs, has_b](Node& n) {
    const Tensor& xv = n.parents[0]->val;
    const Tensor& wv = n.parents[1]->val;
    detail::Accum(*n.parents[0],
                  ConvInputGradCore(n.grad, wv, cs, xv.dim(2), xv.dim(3)));
    detail::Accum(*n.parents[1],
                  ConvWeightGradCore(xv, n.grad, cs, wv.dim(2), wv.dim(3)));
    if (has_b) {
      const int64_t N = n.grad.dim(0), Co = n.grad.dim(1);
      const int64_t hw = n.grad.dim(2) * n.grad.dim(3);
      Tensor gb({Co});
      for (int64_t nn = 0; nn < N; ++nn)
        for (int64_t c = 0; c < Co; ++c) {
          const real* gp = n.grad.data() + (nn * Co + c) * hw;
          for (int64_t i = 0; i < hw; ++i) gb[c] += gp[i];
        }
      detail::Accum(*n.parents[2], gb);
    }
  });
}

// Differentiable adjoint-convolution: y = d/dx conv(x, w) applied to g.
// Needed to express d(logit)/d(input) of a conv net as a graph (R1 penalty).
inline Value ConvInputGrad(const Value& g, const Value& w, const ConvSpec& cs,
                           int64_t H, int64_t W) {
  Tensor out = ConvInputGradCore(g->val, w->val, cs, H, W);
  return detail::MakeOp(std::move(out), {g, w}, [cs](Node& n) {
    const Tensor& gv = n.parents[0]->val;
    const Tensor& wv = n.parents[1]->val;
    // upstream grad has the shape of the conv *input*; its adjoints:
    detail::Accum(*n.parents[0], ConvForwardCore(n.grad, wv, Tensor(), cs));
    detail::Accum(*n.parents[1],
                  ConvWeightGradCore(n.grad, gv, cs, wv.dim(2), wv.dim(3)));
  });
}

// Per-sample per-channel scaling: y[n,c,:,:] = x[n,c,:,:] * s[n,c].
inline Value ChannelScale(const Value& x, const Value& s) {
  const int64_t N = x->val.dim(0), C = x->val.dim(1);
  const int64_t hw = x->val.dim(2) * x->val.dim(3);
  if (s->val.dim(0) != N || s->val.dim(1) != C)
    throw std::invalid_argument("ChannelScale: shape mismatch");
  Tensor out = x->val;
  for (int64_t n = 0; n < N; ++n)
    for (int64_t c = 0; c < C; ++c) {
      real* p = out.data() + (n * C + c) * hw;
      const real sc = s->val[n * C + c];
      for (int64_t i = 0; i < hw; ++i) p[i] *= sc;
    }
  return detail::MakeOp(std::move(out), {x, s}, [N, C, hw](Node& nd) {
    const Tensor& xv = nd.parents[0]->val;
    const Tensor& sv = nd.parents[1]->val;
    Tensor gx = nd.grad, gs({N, C});
    for (int64_t n = 0; n < N; ++n)
      for (int64_t c = 0; c < C; ++c) {
        real* gp = gx.data() + (n * C + c) * hw;
        const real* xp = xv.data() + (n * C + c) * hw;
        const real* up = nd.grad.data() + (n * C + c) * hw;
        real acc = 0;
        for (int64_t i = 0; i < hw; ++i) acc += up[i] * xp[i];
        gs[n * C + c] = acc;
        const real sc = sv[n * C + c];
        for (int64_t i = 0; i < hw; ++i) gp[i] *= sc;
      }
    detail::Accum(*nd.parents[0], gx);
    detail::Accum(*nd.parents[1], gs);
  });
}

inline Value ConcatChannels(const Value& a, const Value& b) {
  const int64_t N = a->val.dim(0), Ca = a->val.dim(1), Cb = b->val.dim(1);
  const int64_t H = a->val.dim(2), W = a->val.dim(3);
  if (b->val.dim(0) != N || b->val.dim(2) != H || b->val.dim(3) != W)
    throw std::invalid_argument("ConcatChannels: shape mismatch");
  Tensor out({N, Ca + Cb, H, W});
  const int64_t hw = H * W;
  for (int64_t n = 0; n < N; ++n) {
    std::copy_n(a->val.data() + n * Ca * hw, Ca * hw,
                out.data() + n * (Ca + Cb) * hw);
    std::copy_n(b->val.data() + n * Cb * hw, Cb * hw,
                out.data() + (n * (Ca + Cb) + Ca) * hw);
  }
  return detail::MakeOp(std::move(out), {a, b}, [N, Ca, Cb, hw](Node& nd) {
    Tensor ga({N, Ca, nd.grad.dim(2), nd.grad.dim(3)});
    Tensor gb({N, Cb, nd.grad.dim(2), nd.grad.dim(3)});
    for (int64_t n = 0; n < N; ++n) {
      std::copy_n(nd.grad.data() + n * (Ca + Cb) * hw, Ca * hw,
                  ga.data() + n * Ca * hw);
      std::copy_n(nd.grad.data() + (n * (Ca + Cb) + Ca) * hw, Cb * hw,
                  gb.data() + n * Cb * hw);
    }
    detail::Accum(*nd.parents[0], ga);
    detail::Accum(*nd.parents[1], gb);
  });
}

inline Value UpsampleNearest2x(const Value& x) {
  const int64_t N = x->val.dim(0), C = x->val.dim(1);
  const int64_t H = x->val.dim(2), W = x->val.dim(3);
  Tensor out({N, C, 2 * H, 2 * W});
  for (int64_t nc = 0; nc < N * C; ++nc) {
    const real* src = x->val.data() + nc * H * W;
    real* dst = out.data() + nc * 4 * H * W;
    for (int64_t y = 0; y < H; ++y)
      for (int64_t xx = 0; xx < W; ++xx) {
        real v = src[y * W + xx];
        dst[(2 * y) * 2 * W + 2 * xx] = v;
        dst[(2 * y) * 2 * W + 2 * xx + 1] = v;
        dst[(2 * y + 1) * 2 * W + 2 * xx] = v;
        dst[(2 * y + 1) * 2 * W + 2 * xx + 1] = v;
      }
  }
  return detail::MakeOp(std::move(out), {x}, [N, C, H, W](Node& nd) {
    Tensor gx({N, C, H, W});
    for (int64_t nc = 0; nc < N * C; ++nc) {
      const real* g = nd.grad.data() + nc * 4 * H * W;
      real* dst = gx.data() + nc * H * W;
      for (int64_t y = 0; y < H; ++y)
        for (int64_t xx = 0; xx < W; ++xx)
          dst[y * W + xx] = g[(2 * y) * 2 * W + 2 * xx] +
                            g[(2 * y) * 2 * W + 2 * xx + 1] +
                            g[(2 * y + 1) * 2 * W + 2 * xx] +
                            g[(2 * y + 1) * 2 * W + 2 * xx + 1];
    }
    detail::Accum(*nd.parents[0], gx);
  });
}

// Broadcast the single row of w:[1,F] to n rows. Used when backpropagating a
// scalar-output linear head as a graph.
inline Value TileRows(const Value& w, int64_t n) {
  const int64_t F = w->val.dim(1);
  Tensor out({n, F});
  for (int64_t r = 0; r < n; ++r)
    std::copy_n(w->val.data(), F, out.data() + r * F);
  return detail::MakeOp(std::move(out), {w}, [n, F](Node& nd) {
    Tensor gw({1, F});
    for (int64_t r = 0; r < n; ++r)
      for (int64_t f = 0; f < F; ++f) gw[f] += nd.grad[r * F + f];
    detail::Accum(*nd.parents[0], gw);
  });
}

// ---------------------------------------------------------------------------
// Backward pass.
// ---------------------------------------------------------------------------

inline void Backward(const Value& root) {
  if (root->val.numel() != 1)
    throw std::invalid_argument("Backward: root must be scalar");
  // Iterative post-order DFS.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node* p = node->parents[idx++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node* n : order) n->grad = Tensor();
  root->grad = Tensor::Scalar(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backprop && n->grad.numel() > 0) n->backprop(*n);
  }
}

}  // namespace minpaint

#endif  // MINPAINT_CORE_AUTOGRAD_H_
