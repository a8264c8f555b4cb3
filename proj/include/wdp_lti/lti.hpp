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

#ifndef WDP_LTI_LTI_HPP_
#define WDP_LTI_LTI_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "wdp_lti/errors.hpp"
#include "wdp_lti/matgauss.hpp"

namespace wdp_lti::lti {

using matgauss::Gaussian;
using matgauss::Matrix;
using matgauss::Vector;

// x(k+1) = A x(k) + B u(k),  y(k) = C x(k) + D u(k).
class LtiSystem {
 public:
  LtiSystem(Matrix a, Matrix b, Matrix c, Matrix d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    const auto n = a_.rows();
    auto fail = [](const std::string& what) {
      throw Error(ErrorCode::kDimensionMismatch, what);
    };
    if (a_.cols() != n) fail("A must be square");
    if (b_.rows() != n) fail("B must have as many rows as A");
    if (c_.cols() != n) fail("C must have as many columns as A");
    if (d_.rows() != c_.rows() || d_.cols() != b_.cols()) {
      fail("D must be " + std::to_string(c_.rows()) + "x" +
           std::to_string(b_.cols()));
    }
  }

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }
  const Matrix& D() const { return d_; }

  Eigen::Index state_dim() const { return a_.rows(); }
  Eigen::Index input_dim() const { return b_.cols(); }
  Eigen::Index output_dim() const { return c_.rows(); }

 private:
  Matrix a_;
  Matrix b_;
  Matrix c_;
  Matrix d_;
};

// Horizon-t stacked maps: Y_t = O x0 + N U_t with U_t = [u(0); ...; u(t)].
struct StackedMaps {
  int horizon = 0;
  Matrix O;     // (t+1)q x n, row block k = C A^k
  Matrix N;     // (t+1)q x (t+1)m, block lower-triangular Toeplitz
  Matrix gram;  // [O N]^T [O N]

  Eigen::Index state_dim() const { return O.cols(); }
  Eigen::Index stacked_input_dim() const { return N.cols(); }
  Eigen::Index stacked_output_dim() const { return O.rows(); }

  // [O N]
  Matrix Joint() const {
    Matrix joint(O.rows(), O.cols() + N.cols());
    joint << O, N;
    return joint;
  }
};

inline StackedMaps BuildStacked(const LtiSystem& sys, int horizon) {
  if (horizon < 0) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be nonnegative");
  }
  const auto n = sys.state_dim();
  const auto m = sys.input_dim();
  const auto q = sys.output_dim();
  const auto steps = static_cast<Eigen::Index>(horizon) + 1;

  StackedMaps maps;
  maps.horizon = horizon;
  maps.O.resize(steps * q, n);
  // markov[k] = C A^(k-1) B for k >= 1, markov[0] = D.
  std::vector<Matrix> markov(static_cast<size_t>(steps));
  markov[0] = sys.D();
  Matrix c_pow = sys.C();  // C A^k
  for (Eigen::Index k = 0; k < steps; ++k) {
    maps.O.middleRows(k * q, q) = c_pow;
    if (k + 1 < steps) markov[static_cast<size_t>(k + 1)] = c_pow * sys.B();
    c_pow = (c_pow * sys.A()).eval();
  }
  maps.N = Matrix::Zero(steps * q, steps * m);
  for (Eigen::Index i = 0; i < steps; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      maps.N.block(i * q, j * m, q, m) = markov[static_cast<size_t>(i - j)];
    }
  }
  const Matrix joint = maps.Joint();
  maps.gram = joint.transpose() * joint;
  maps.gram = (0.5 * (maps.gram + maps.gram.transpose())).eval();
  return maps;
}

// lambda_max([O N]^T [O N]), the squared Lipschitz constant of (x0, U) -> Y.
inline double Sensitivity(const StackedMaps& maps) {
  if (maps.gram.size() == 0) return 0.0;
  return std::max(matgauss::EigExtremes(maps.gram).lambda_max, 0.0);
}

// lambda_max(N^T N), the input-only sensitivity used when x0 is public.
inline double InputSensitivity(const StackedMaps& maps) {
  if (maps.N.size() == 0) return 0.0;
  const Matrix ntn = maps.N.transpose() * maps.N;
  return std::max(matgauss::EigExtremes(0.5 * (ntn + ntn.transpose())).lambda_max,
                  0.0);
}

// Induced 2-norm (largest singular value), from the smaller Gram matrix.
inline double LipschitzBound(const Matrix& f) {
  if (f.size() == 0) return 0.0;
  const Matrix gram =
      f.rows() < f.cols() ? Matrix(f * f.transpose()) : Matrix(f.transpose() * f);
  const double top =
      matgauss::EigExtremes(0.5 * (gram + gram.transpose())).lambda_max;
  return std::sqrt(std::max(top, 0.0));
}

// Affine pushforward y = F x + v for independent x ~ px, v ~ N(0, noise_cov).
inline Gaussian AffinePushforward(const Matrix& f, const Gaussian& px,
                                  const Matrix& noise_cov) {
  if (f.cols() != px.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "map has " + std::to_string(f.cols()) +
                    " columns but distribution has dimension " +
                    std::to_string(px.dim()));
  }
  if (noise_cov.rows() != f.rows() || noise_cov.cols() != f.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "noise covariance must be " + std::to_string(f.rows()) + "x" +
                    std::to_string(f.rows()));
  }
  const Matrix noise = matgauss::internal::Symmetrized(noise_cov, "noise");
  matgauss::PsdEigen(noise);
  Matrix cov = f * px.cov() * f.transpose() + noise;
  cov = (0.5 * (cov + cov.transpose())).eval();
  return Gaussian(f * px.mean(), cov);
}

// Distribution of Y_{v,t} = O x0 + N U_t + V_t:
// mean O m_x0 + N m_U, covariance O S_x0 O^T + N S_U N^T + S_V.
inline Gaussian Pushforward(const StackedMaps& maps, const Gaussian& px0,
                            const Gaussian& pu, const Matrix& noise_cov) {
  if (px0.dim() != maps.state_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "initial-state distribution has dimension " +
                    std::to_string(px0.dim()) + ", expected " +
                    std::to_string(maps.state_dim()));
  }
  if (pu.dim() != maps.stacked_input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "stacked input distribution has dimension " +
                    std::to_string(pu.dim()) + ", expected " +
                    std::to_string(maps.stacked_input_dim()));
  }
  const auto out = maps.stacked_output_dim();
  if (noise_cov.rows() != out || noise_cov.cols() != out) {
    throw Error(ErrorCode::kDimensionMismatch,
                "noise covariance must be " + std::to_string(out) + "x" +
                    std::to_string(out));
  }
  const Matrix noise = matgauss::internal::Symmetrized(noise_cov, "noise");
  matgauss::PsdEigen(noise);
  Vector mean = maps.O * px0.mean() + maps.N * pu.mean();
  Matrix cov = maps.O * px0.cov() * maps.O.transpose() +
               maps.N * pu.cov() * maps.N.transpose() + noise;
  cov = (0.5 * (cov + cov.transpose())).eval();
  return Gaussian(std::move(mean), cov);
}

// Rolls the recursion forward from x0 over the stacked inputs and returns
// the stacked outputs [y(0); ...; y(t)]. Does not use the stacked maps.
inline Vector Simulate(const LtiSystem& sys, const Vector& x0,
                       const Vector& stacked_inputs) {
  const auto n = sys.state_dim();
  const auto m = sys.input_dim();
  const auto q = sys.output_dim();
  if (x0.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "initial state dimension");
  }
  if (m == 0 ? stacked_inputs.size() != 0 : stacked_inputs.size() % m != 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "stacked inputs are not a multiple of the input dimension");
  }
  const Eigen::Index steps = m == 0 ? 1 : stacked_inputs.size() / m;
  Vector y(steps * q);
  Vector x = x0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const auto u = stacked_inputs.segment(k * m, m);
    y.segment(k * q, q) = sys.C() * x + sys.D() * u;
    x = (sys.A() * x + sys.B() * u).eval();
  }
  return y;
}

}  // namespace wdp_lti::lti

#endif  // WDP_LTI_LTI_HPP_
