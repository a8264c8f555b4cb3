//
// Copyright 2026 The wdp-lti Authors
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
//

// Multivariate Gaussians, symmetric PSD matrix utilities and the closed-form
// distances between Gaussians (2-Wasserstein, KL, symmetrized KL) together
// with the KL-vs-Wasserstein and Pinsker bounds built on them.

#ifndef WDP_LTI_MATGAUSS_HPP_
#define WDP_LTI_MATGAUSS_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "wdp_lti/errors.hpp"

namespace wdp_lti::matgauss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative asymmetry tolerated before symmetrization.
inline constexpr double kSymmetryTolerance = 1e-12;
// Eigenvalues in [-kPsdClipBand * lambda_max, 0) are round-off and get
// clipped to zero; anything more negative is rejected.
inline constexpr double kPsdClipBand = 1e-10;
// A covariance is treated as singular when lambda_min < this * lambda_max.
inline constexpr double kSingularityRatio = 1e-12;

struct EigenExtremes {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// Eigendecomposition of a validated symmetric PSD matrix. Eigenvalues are
// ascending and already clipped at zero.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

namespace internal {

inline void RequireSquare(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " must be square, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline Matrix Symmetrized(const Matrix& m, const char* what) {
  RequireSquare(m, what);
  if (m.size() == 0) return m;
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " has non-finite entries");
  }
  const double scale = m.norm();
  const double asym = (m - m.transpose()).norm();
  if (asym > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::kNotSymmetric,
                std::string(what) + " asymmetry " + std::to_string(asym) +
                    " exceeds tolerance relative to norm " +
                    std::to_string(scale));
  }
  return 0.5 * (m + m.transpose());
}

inline Eigen::SelfAdjointEigenSolver<Matrix> Solve(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument,
                "symmetric eigendecomposition did not converge");
  }
  return solver;
}

// Eigendecomposition of an already symmetrized matrix with PSD validation
// and clipping. Sets *clipped when any eigenvalue was raised to zero.
inline SymmetricEigen ClippedEigen(const Matrix& sym, bool* clipped) {
  if (clipped != nullptr) *clipped = false;
  if (sym.size() == 0) return {Vector(0), Matrix(0, 0)};
  auto solver = Solve(sym);
  Vector values = solver.eigenvalues();
  const double lambda_max = std::max(values.maxCoeff(), 0.0);
  const double lowest = values.minCoeff();
  if (lowest < -kPsdClipBand * lambda_max || (lambda_max == 0.0 && lowest < 0.0)) {
    throw Error(ErrorCode::kNotPsd,
                "eigenvalue " + std::to_string(lowest) +
                    " is below the clipping band for lambda_max " +
                    std::to_string(lambda_max));
  }
  if (clipped != nullptr) *clipped = lowest < 0.0;
  values = values.cwiseMax(0.0);
  return {std::move(values), solver.eigenvectors()};
}

}  // namespace internal

// Validates symmetry and positive semidefiniteness, then returns the clipped
// eigendecomposition.
inline SymmetricEigen PsdEigen(const Matrix& m) {
  return internal::ClippedEigen(internal::Symmetrized(m, "matrix"), nullptr);
}

namespace internal {

// Square root from a clipped eigensystem. Eigenvalues below the solver's
// absolute accuracy (n * eps * lambda_max) are zeroed: their square roots
// are pure round-off at the 1e-8 level and would otherwise leak into
// distances between singular covariances.
inline Matrix SqrtFromEigen(const SymmetricEigen& eig) {
  const auto n = eig.values.size();
  if (n == 0) return Matrix(0, 0);
  const double floor = static_cast<double>(n) *
                       std::numeric_limits<double>::epsilon() *
                       eig.values.maxCoeff();
  const Vector roots =
      eig.values.unaryExpr([floor](double v) { return v <= floor ? 0.0 : std::sqrt(v); });
  const Matrix root = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (root + root.transpose());
}

}  // namespace internal

// Symmetric PSD square root via eigendecomposition with negative-eigenvalue
// clipping.
inline Matrix SpdSqrt(const Matrix& m) {
  return internal::SqrtFromEigen(PsdEigen(m));
}

// Smallest and largest eigenvalue of a symmetric (not necessarily PSD) matrix.
inline EigenExtremes EigExtremes(const Matrix& m) {
  const Matrix sym = internal::Symmetrized(m, "matrix");
  if (sym.size() == 0) return {};
  auto solver = internal::Solve(sym);
  const Vector& values = solver.eigenvalues();
  return {values.minCoeff(), values.maxCoeff()};
}

// N(mean, cov) with cov symmetric PSD. Immutable; the eigendecomposition of
// the covariance is computed once at construction and reused by every
// distance, sampler and density in the library. A zero covariance is the
// Dirac measure at the mean.
class Gaussian {
 public:
  Gaussian() : Gaussian(Vector(0), Matrix(0, 0)) {}

  Gaussian(Vector mean, const Matrix& cov) : mean_(std::move(mean)) {
    if (cov.rows() != mean_.size() || cov.cols() != mean_.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "mean has dimension " + std::to_string(mean_.size()) +
                      " but covariance is " + std::to_string(cov.rows()) +
                      "x" + std::to_string(cov.cols()));
    }
    if (!mean_.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "mean has non-finite entries");
    }
    cov_ = internal::Symmetrized(cov, "covariance");
    bool clipped = false;
    eig_ = internal::ClippedEigen(cov_, &clipped);
    // Only rebuild when clipping changed something, so exact inputs
    // (diagonal, zero) stay bit-exact.
    if (clipped) {
      cov_ = eig_.vectors * eig_.values.asDiagonal() * eig_.vectors.transpose();
      cov_ = (0.5 * (cov_ + cov_.transpose())).eval();
    }
  }

  static Gaussian Dirac(Vector mean) {
    const auto n = mean.size();
    return Gaussian(std::move(mean), Matrix::Zero(n, n));
  }

  static Gaussian Isotropic(Vector mean, double variance) {
    const auto n = mean.size();
    return Gaussian(std::move(mean), variance * Matrix::Identity(n, n));
  }

  Eigen::Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }
  const SymmetricEigen& eigen() const { return eig_; }

  double lambda_min() const {
    return dim() == 0 ? 0.0 : eig_.values(0);
  }
  double lambda_max() const {
    return dim() == 0 ? 0.0 : eig_.values(dim() - 1);
  }

  // Strict definiteness in the sense used by the KL routines.
  bool IsNonSingular() const {
    if (dim() == 0) return true;
    return lambda_max() > 0.0 && lambda_min() >= kSingularityRatio * lambda_max();
  }

  // Symmetric square root of the covariance.
  Matrix CovSqrt() const { return internal::SqrtFromEigen(eig_); }

 private:
  Vector mean_;
  Matrix cov_;
  SymmetricEigen eig_;
};

struct TvBoundReport {
  double sym_kl = 0.0;
  double w2 = 0.0;
  double lemma1_rhs = 0.0;
  double pinsker_tv_bound = 0.0;
};

namespace internal {

inline void RequireSameDim(const Gaussian& p, const Gaussian& q) {
  if (p.dim() != q.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "Gaussians have dimensions " + std::to_string(p.dim()) +
                    " and " + std::to_string(q.dim()));
  }
}

inline void RequireNonSingular(const Gaussian& g, const char* which) {
  if (!g.IsNonSingular()) {
    throw Error(ErrorCode::kSingularCovariance,
                std::string(which) + " covariance has lambda_min " +
                    std::to_string(g.lambda_min()) + " against lambda_max " +
                    std::to_string(g.lambda_max()));
  }
}

}  // namespace internal

// Squared 2-Wasserstein distance.
//
// The covariance (Bures) term tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2) equals
// min over orthogonal U of ||S1^1/2 - S2^1/2 U||_F^2, attained at the polar
// factor of S1^1/2 S2^1/2. Evaluating that norm directly keeps the result
// nonnegative and avoids the cancellation of the trace form when the two
// covariances are close.
inline double W2Squared(const Gaussian& p, const Gaussian& q) {
  internal::RequireSameDim(p, q);
  if (p.dim() == 0) return 0.0;
  const double mean_term = (p.mean() - q.mean()).squaredNorm();
  const Matrix root_p = p.CovSqrt();
  const Matrix root_q = q.CovSqrt();
  Eigen::JacobiSVD<Matrix> svd(root_p * root_q,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  // root_p * root_q = U_s S V_s^T; the optimal rotation is V_s U_s^T.
  const Matrix rotation = svd.matrixV() * svd.matrixU().transpose();
  const double cov_term = (root_p - root_q * rotation).squaredNorm();
  return mean_term + std::max(cov_term, 0.0);
}

inline double W2Distance(const Gaussian& p, const Gaussian& q) {
  return std::sqrt(W2Squared(p, q));
}

// KL(P || Q). Both covariances must be non-singular; log-determinants come
// from each covariance's own eigenvalues.
inline double KlDivergence(const Gaussian& p, const Gaussian& q) {
  internal::RequireSameDim(p, q);
  internal::RequireNonSingular(p, "first");
  internal::RequireNonSingular(q, "second");
  const auto n = p.dim();
  if (n == 0) return 0.0;
  const SymmetricEigen& eq = q.eigen();
  const Vector inv_values = eq.values.cwiseInverse();
  // Whitened mean difference and whitened first covariance.
  const Vector diff = eq.vectors.transpose() * (q.mean() - p.mean());
  const double mahalanobis = diff.cwiseAbs2().dot(inv_values);
  const Matrix rotated = eq.vectors.transpose() * p.cov() * eq.vectors;
  const double trace_term = rotated.diagonal().dot(inv_values);
  const double log_det_q = eq.values.array().log().sum();
  const double log_det_p = p.eigen().values.array().log().sum();
  return 0.5 * (mahalanobis + trace_term - static_cast<double>(n) +
                log_det_q - log_det_p);
}

inline double SymmetrizedKl(const Gaussian& p, const Gaussian& q) {
  return KlDivergence(p, q) + KlDivergence(q, p);
}

// TV <= 1/2 sqrt(KL(P||Q) + KL(Q||P)).
inline double PinskerTvBound(double sym_kl) {
  return 0.5 * std::sqrt(std::max(sym_kl, 0.0));
}

// Textbook single-direction form sqrt(KL/2); exposed for comparison only.
inline double OneSidedPinskerBound(double kl) {
  return std::sqrt(0.5 * std::max(kl, 0.0));
}

// Symmetrized KL together with its Wasserstein upper bound
// (2 / min(lambda_min(S1), lambda_min(S2))) * W2^2.
inline TvBoundReport Lemma1Bound(const Gaussian& p, const Gaussian& q) {
  internal::RequireSameDim(p, q);
  internal::RequireNonSingular(p, "first");
  internal::RequireNonSingular(q, "second");
  TvBoundReport report;
  if (p.dim() == 0) return report;
  report.sym_kl = SymmetrizedKl(p, q);
  const double w2_sq = W2Squared(p, q);
  report.w2 = std::sqrt(w2_sq);
  report.lemma1_rhs = 2.0 / std::min(p.lambda_min(), q.lambda_min()) * w2_sq;
  report.pinsker_tv_bound = PinskerTvBound(report.sym_kl);
  return report;
}

// Independent product P x Q: stacked means, block-diagonal covariance.
inline Gaussian Product(const Gaussian& p, const Gaussian& q) {
  const auto n = p.dim();
  const auto m = q.dim();
  Vector mean(n + m);
  mean << p.mean(), q.mean();
  Matrix cov = Matrix::Zero(n + m, n + m);
  cov.topLeftCorner(n, n) = p.cov();
  cov.bottomRightCorner(m, m) = q.cov();
  return Gaussian(std::move(mean), cov);
}

}  // namespace wdp_lti::matgauss

#endif  // WDP_LTI_MATGAUSS_HPP_
