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

#ifndef MINPAINT_CORE_TENSOR_H_
#define MINPAINT_CORE_TENSOR_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace minpaint {

using real = double;

// Dense row-major tensor. Shapes are small (at most 4 dims in practice:
// N x C x H x W); everything is value-semantic.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int64_t> shape)
      : shape_(std::move(shape)), data_(CountOf(shape_), real(0)) {}
  Tensor(std::vector<int64_t> shape, std::vector<real> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<int64_t>(data_.size()) != CountOf(shape_))
      throw std::invalid_argument("Tensor: data size does not match shape");
  }

  static Tensor Zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }
  static Tensor Full(std::vector<int64_t> shape, real v) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
  }
  static Tensor Scalar(real v) { return Tensor({1}, {v}); }

  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t dim(int i) const { return shape_.at(i); }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }

  real* data() { return data_.data(); }
  const real* data() const { return data_.data(); }
  std::vector<real>& vec() { return data_; }
  const std::vector<real>& vec() const { return data_; }

  real& operator[](int64_t i) { return data_[i]; }
  real operator[](int64_t i) const { return data_[i]; }

  // NCHW indexing helper.
  real& at4(int64_t n, int64_t c, int64_t h, int64_t w) {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  real at4(int64_t n, int64_t c, int64_t h, int64_t w) const {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }

  bool SameShape(const Tensor& o) const { return shape_ == o.shape_; }

  bool AllFinite() const {
    for (real v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Tensor Reshaped(std::vector<int64_t> shape) const {
    if (CountOf(shape) != numel())
      throw std::invalid_argument("Tensor::Reshaped: element count mismatch");
    Tensor t = *this;
    t.shape_ = std::move(shape);
    return t;
  }

  std::string ShapeStr() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
    os << "]";
    return os.str();
  }

  static int64_t CountOf(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
      if (d < 0) throw std::invalid_argument("Tensor: negative dimension");
      n *= d;
    }
    return n;
  }

 private:
  std::vector<int64_t> shape_;
  std::vector<real> data_;
};

inline void CheckSameShape(const Tensor& a, const Tensor& b, const char* where) {
  if (!a.SameShape(b))
    throw std::invalid_argument(std::string(where) + ": shape mismatch " +
                                a.ShapeStr() + " vs " + b.ShapeStr());
}

}  // namespace minpaint

#endif  // MINPAINT_CORE_TENSOR_H_
