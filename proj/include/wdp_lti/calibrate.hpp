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

// Wasserstein adjacency and the (0, delta) output-noise design rules.
//
// All rules are sufficient conditions of the form
//   lambda_min(output covariance) >= c^2 * sensitivity / (2 delta^2)
// and the designers return the smallest isotropic noise meeting them.

#ifndef WDP_LTI_CALIBRATE_HPP_
#define WDP_LTI_CALIBRATE_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "wdp_lti/errors.hpp"
#include "wdp_lti/lti.hpp"
#include "wdp_lti/matgauss.hpp"

namespace wdp_lti::calibrate {

using lti::StackedMaps;
using matgauss::Gaussian;
using matgauss::Matrix;
using matgauss::Vector;

// c-adjacency under the 2-Wasserstein distance.
class AdjacencySpec {
 public:
  explicit AdjacencySpec(double c, int p = 2) : c_(c), p_(p) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw Error(ErrorCode::kInvalidArgument, "adjacency radius c must be > 0");
    }
    if (p != 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "only the 2-Wasserstein adjacency is supported, got p = " +
                      std::to_string(p));
    }
  }
  double c() const { return c_; }
  int p() const { return p_; }

 private:
  double c_;
  int p_;
};

class PrivacySpec {
 public:
  explicit PrivacySpec(double delta, double epsilon = 0.0)
      : epsilon_(epsilon), delta_(delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
    }
  }
  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

  // The design rules only cover epsilon = 0.
  void RequireZeroEpsilon() const {
    if (epsilon_ != 0.0) {
      throw Error(ErrorCode::kUnsupportedEpsilon,
                  "only (0, delta) calibration is available, got epsilon = " +
                      std::to_string(epsilon_));
    }
  }

 private:
  double epsilon_;
  double delta_;
};

// Output noise covariance: sigma2 * I or an explicit PSD matrix.
class NoiseSpec {
 public:
  enum class Kind { kIsotropic, kFull };

  static NoiseSpec Isotropic(double sigma2) {
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
      throw Error(ErrorCode::kInvalidArgument, "sigma2 must be >= 0");
    }
    return NoiseSpec(Kind::kIsotropic, sigma2, Matrix(0, 0));
  }

  static NoiseSpec Full(const Matrix& cov) {
    matgauss::PsdEigen(cov);
    Matrix sym = 0.5 * (cov + cov.transpose());
    return NoiseSpec(Kind::kFull, 0.0, std::move(sym));
  }

  Kind kind() const { return kind_; }
  double sigma2() const { return sigma2_; }
  const Matrix& cov() const { return cov_; }

  Matrix Materialize(Eigen::Index dim) const {
    if (kind_ == Kind::kIsotropic) return sigma2_ * Matrix::Identity(dim, dim);
    if (cov_.rows() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "noise covariance is " + std::to_string(cov_.rows()) +
                      "-dimensional, expected " + std::to_string(dim));
    }
    return cov_;
  }

  double LambdaMin(Eigen::Index dim) const {
    if (kind_ == Kind::kIsotropic) return sigma2_;
    if (dim == 0) return 0.0;
    return std::max(matgauss::EigExtremes(Materialize(dim)).lambda_min, 0.0);
  }

  // Same noise shape with the standard deviation multiplied by factor.
  NoiseSpec ScaledStddev(double factor) const {
    if (kind_ == Kind::kIsotropic) return Isotropic(sigma2_ * factor * factor);
    return Full(cov_ * (factor * factor));
  }

 private:
  NoiseSpec(Kind kind, double sigma2, Matrix cov)
      : kind_(kind), sigma2_(sigma2), cov_(std::move(cov)) {}

  Kind kind_;
  double sigma2_;
  Matrix cov_;
};

struct AdjacencyResult {
  bool adjacent = false;
  double w2 = 0.0;
};

// Arguments are the full input products P_x0 x P_U.
inline AdjacencyResult CheckAdjacent(const Gaussian& first,
                                     const Gaussian& second,
                                     const AdjacencySpec& spec) {
  const double w2 = matgauss::W2Distance(first, second);
  return {w2 <= spec.c(), w2};
}

// Initial-state distributions must coincide when x0 is public.
inline void CheckPublicInitialState(const Gaussian& px0, const Gaussian& px0p) {
  if (px0.dim() != px0p.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "initial-state distributions differ in dimension");
  }
  const double scale = 1.0 + px0.mean().norm() + px0.cov().norm();
  const double gap =
      (px0.mean() - px0p.mean()).norm() + (px0.cov() - px0p.cov()).norm();
  if (gap > 1e-12 * scale) {
    throw Error(ErrorCode::kPublicStateMismatch,
                "pair does not share the public initial-state distribution");
  }
}

// Relative slack on the theorem 1 comparison, so noise designed to sit
// exactly on the bound is not rejected by eigenvalue round-off.
inline constexpr double kTheorem1RelTolerance = 1e-12;

struct Theorem1Result {
  bool satisfied = false;
  double lhs = 0.0;  // min of the two output lambda_min
  double rhs = 0.0;  // c^2 lambda_max(gram) / (2 delta^2)
};

// Pair-specific sufficient condition for (0, delta)-DP.
inline Theorem1Result Theorem1Check(const StackedMaps& maps, const Gaussian& px0,
                                    const Gaussian& pu, const Gaussian& px0p,
                                    const Gaussian& pup, const NoiseSpec& noise,
                                    const AdjacencySpec& spec,
                                    const PrivacySpec& priv) {
  priv.RequireZeroEpsilon();
  const Matrix noise_cov = noise.Materialize(maps.stacked_output_dim());
  const Gaussian out = lti::Pushforward(maps, px0, pu, noise_cov);
  const Gaussian out_p = lti::Pushforward(maps, px0p, pup, noise_cov);
  Theorem1Result result;
  result.lhs = std::min(out.lambda_min(), out_p.lambda_min());
  result.rhs = spec.c() * spec.c() * lti::Sensitivity(maps) /
               (2.0 * priv.delta() * priv.delta());
  result.satisfied = result.lhs >= result.rhs * (1.0 - kTheorem1RelTolerance);
  return result;
}

// Uniform over all adjacent pairs: lambda_min(S_V) >= c^2 lambda_max / (2 delta^2).
inline NoiseSpec Corollary1Noise(const StackedMaps& maps,
                                 const AdjacencySpec& spec,
                                 const PrivacySpec& priv) {
  priv.RequireZeroEpsilon();
  const double delta = priv.delta();
  return NoiseSpec::Isotropic(spec.c() * spec.c() * lti::Sensitivity(maps) /
                              (2.0 * delta * delta));
}

// lambda_min(O S_x0 O^T), the noise already supplied by a public x0.
inline double PublicStateFloor(const StackedMaps& maps, const Matrix& sigma_x0) {
  if (sigma_x0.rows() != maps.state_dim() ||
      sigma_x0.cols() != maps.state_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "initial-state covariance must be " +
                    std::to_string(maps.state_dim()) + "x" +
                    std::to_string(maps.state_dim()));
  }
  matgauss::PsdEigen(sigma_x0);
  if (maps.O.rows() == 0) return 0.0;
  const Matrix term = maps.O * sigma_x0 * maps.O.transpose();
  return std::max(
      matgauss::EigExtremes(0.5 * (term + term.transpose())).lambda_min, 0.0);
}

// Public-x0 rule: smallest sigma2 >= 0 with
//   lambda_min(O S_x0 O^T) + sigma2 >= c^2 lambda_max(N^T N) / (2 delta^2).
inline NoiseSpec Theorem2Noise(const StackedMaps& maps, const Matrix& sigma_x0,
                               const AdjacencySpec& spec,
                               const PrivacySpec& priv) {
  priv.RequireZeroEpsilon();
  const double delta = priv.delta();
  const double floor = PublicStateFloor(maps, sigma_x0);
  const double required = spec.c() * spec.c() * lti::InputSensitivity(maps) /
                          (2.0 * delta * delta);
  return NoiseSpec::Isotropic(std::max(0.0, required - floor));
}

// Smallest delta certified for the given noise: inverse of the designers.
// With public_x0 set, the public-state rule is used.
inline double AchievableDelta(const StackedMaps& maps, const NoiseSpec& noise,
                              const AdjacencySpec& spec,
                              const std::optional<Matrix>& public_x0) {
  const auto out = maps.stacked_output_dim();
  const double noise_floor = noise.LambdaMin(out);
  double sensitivity = 0.0;
  double denom = 0.0;
  if (public_x0.has_value()) {
    sensitivity = lti::InputSensitivity(maps);
    denom = PublicStateFloor(maps, *public_x0) + noise_floor;
  } else {
    sensitivity = lti::Sensitivity(maps);
    denom = noise_floor;
  }
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::kZeroNoise,
                "no noise in the directions the rule requires");
  }
  return spec.c() * std::sqrt(sensitivity / (2.0 * denom));
}

enum class Rule { kCorollary1, kTheorem2 };

inline std::string_view RuleName(Rule rule) {
  return rule == Rule::kCorollary1 ? "corollary1" : "theorem2";
}

inline Rule ParseRule(std::string_view name) {
  if (name == "corollary1") return Rule::kCorollary1;
  if (name == "theorem2") return Rule::kTheorem2;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown calibration rule '" + std::string(name) + "'");
}

struct CalibrationReport {
  Rule rule = Rule::kCorollary1;
  double c = 0.0;
  double delta = 0.0;
  double lambda_max = 0.0;              // lambda_max(gram) or lambda_max(N^T N)
  double lambda_min_public_term = 0.0;  // lambda_min(O S_x0 O^T); 0 for corollary1
  double sigma2 = 0.0;
  double sigma = 0.0;

  NoiseSpec noise() const { return NoiseSpec::Isotropic(sigma2); }
};

// Runs one design rule and collects the quantities that went into it.
// sigma_x0 is required for the public-state rule.
inline CalibrationReport Calibrate(Rule rule, const StackedMaps& maps,
                                   const AdjacencySpec& spec,
                                   const PrivacySpec& priv,
                                   const std::optional<Matrix>& sigma_x0) {
  CalibrationReport report;
  report.rule = rule;
  report.c = spec.c();
  report.delta = priv.delta();
  if (rule == Rule::kCorollary1) {
    report.lambda_max = lti::Sensitivity(maps);
    report.sigma2 = Corollary1Noise(maps, spec, priv).sigma2();
  } else {
    if (!sigma_x0.has_value()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "the public-state rule needs the initial-state covariance");
    }
    report.lambda_max = lti::InputSensitivity(maps);
    report.lambda_min_public_term = PublicStateFloor(maps, *sigma_x0);
    report.sigma2 = Theorem2Noise(maps, *sigma_x0, spec, priv).sigma2();
  }
  report.sigma = std::sqrt(report.sigma2);
  return report;
}

}  // namespace wdp_lti::calibrate

#endif  // WDP_LTI_CALIBRATE_HPP_
