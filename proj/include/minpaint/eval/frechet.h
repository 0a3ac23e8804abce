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

#ifndef MINPAINT_EVAL_FRECHET_H_
#define MINPAINT_EVAL_FRECHET_H_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "minpaint/core/tensor.h"

namespace minpaint {

// Gaussian fit of an embedded image set: the operands of the Fréchet
// distance. Covariance uses the N-1 denominator (FID implementations differ
// here and it changes values at small N).
struct FeatureStats {
  std::vector<real> mu;
  Eigen::MatrixXd sigma;
  int64_t count = 0;

  void Validate() const {
    if (count < 2) throw std::invalid_argument("FeatureStats: count must be >= 2");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() >= 1e-8)
      throw std::invalid_argument("FeatureStats: covariance not symmetric");
  }
};

// Mergeable partial sums; accumulation is associative so a parallel
// reduction in fixed order stays deterministic.
class StatsAccumulator {
 public:
  explicit StatsAccumulator(int64_t dim)
      : dim_(dim), sum_(Eigen::VectorXd::Zero(dim)),
        outer_(Eigen::MatrixXd::Zero(dim, dim)) {}

  void Add(const std::vector<real>& x) {
    if (static_cast<int64_t>(x.size()) != dim_)
      throw std::invalid_argument("StatsAccumulator: dim mismatch");
    Eigen::Map<const Eigen::VectorXd> v(x.data(), dim_);
    sum_ += v;
    outer_ += v * v.transpose();
    ++n_;
  }

  void Merge(const StatsAccumulator& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("StatsAccumulator: dim mismatch");
    sum_ += o.sum_;
    outer_ += o.outer_;
    n_ += o.n_;
  }

  FeatureStats Finalize() const {
    if (n_ < 2)
      throw std::invalid_argument("feature_stats: need >= 2 images (covariance undefined)");
    FeatureStats s;
    s.count = n_;
    Eigen::VectorXd mu = sum_ / real(n_);
    s.mu.assign(mu.data(), mu.data() + dim_);
    Eigen::MatrixXd cov = (outer_ - real(n_) * mu * mu.transpose()) / real(n_ - 1);
    s.sigma = (cov + cov.transpose()) / 2;  // kill rounding asymmetry
    return s;
  }

 private:
  int64_t dim_;
  Eigen::VectorXd sum_;
  Eigen::MatrixXd outer_;
  int64_t n_ = 0;
};

inline FeatureStats ComputeFeatureStats(const std::vector<std::vector<real>>& embeddings) {
  if (embeddings.size() < 2)
    throw std::invalid_argument("feature_stats: need >= 2 images (covariance undefined)");
  StatsAccumulator acc(static_cast<int64_t>(embeddings[0].size()));
  for (const auto& e : embeddings) acc.Add(e);
  return acc.Finalize();
}

namespace detail {

// PSD matrix square root via eigendecomposition. Eigenvalues below
// -tol*scale mean the operand was not a valid covariance; smaller negatives
// are rounding noise and are clamped. This check is the symmetric-route
// analogue of the classic "imaginary residue" guard around sqrtm.
inline Eigen::MatrixXd PsdSqrt(const Eigen::MatrixXd& m, real tol, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error(std::string("frechet_distance: eigensolver failed on ") + what);
  Eigen::VectorXd ev = es.eigenvalues();
  const real scale = std::max<real>(ev.cwiseAbs().maxCoeff(), 1);
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol * scale)
      throw std::runtime_error(std::string("frechet_distance: ") + what +
                               " is not PSD (numerically invalid stats)");
    ev[i] = ev[i] > 0 ? std::sqrt(ev[i]) : 0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

// d^2 = |mu_a - mu_b|^2 + Tr(Sa + Sb - 2 (Sa^1/2 Sb Sa^1/2)^1/2).
inline real FrechetDistance(const FeatureStats& a, const FeatureStats& b) {
  a.Validate();
  b.Validate();
  if (a.mu.size() != b.mu.size())
    throw std::invalid_argument("frechet_distance: dimension mismatch");
  const int64_t d = static_cast<int64_t>(a.mu.size());

  real mean_term = 0;
  for (int64_t i = 0; i < d; ++i) {
    real diff = a.mu[i] - b.mu[i];
    mean_term += diff * diff;
  }

  Eigen::MatrixXd sqrt_a = detail::PsdSqrt(a.sigma, 1e-3, "first covariance");
  Eigen::MatrixXd inner = sqrt_a * b.sigma * sqrt_a;
  inner = (inner + inner.transpose()) / 2;
  Eigen::MatrixXd cross = detail::PsdSqrt(inner, 1e-3, "cross covariance");

  real dist = mean_term + a.sigma.trace() + b.sigma.trace() - 2 * cross.trace();
  if (dist < 0) {
    if (dist < -1e-6)
      throw std::runtime_error("frechet_distance: negative distance " +
                               std::to_string(dist) + " (numerically invalid stats)");
    dist = 0;
  }
  return dist;
}

// Cosine similarity of the two embeddings; invariant to positive scaling.
inline real IdentitySimilarity(const std::vector<real>& a, const std::vector<real>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("identity_similarity: dimension mismatch");
  real dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0)
    throw std::invalid_argument("identity_similarity: zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace minpaint

#endif  // MINPAINT_EVAL_FRECHET_H_
