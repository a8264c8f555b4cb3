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

// Random instance generators and independent oracles shared by the unit and
// acceptance suites. Nothing here calls into the code paths it is used to
// check: the matrix square root comes from Eigen's Schur-based
// MatrixFunctions and the 1-D TV integral from Boost quadrature.

#ifndef WDP_LTI_TESTS_TEST_SUPPORT_HPP_
#define WDP_LTI_TESTS_TEST_SUPPORT_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>
#include <unsupported/Eigen/MatrixFunctions>

#include "wdp_lti/matgauss.hpp"

namespace wdp_lti::testing {

using matgauss::Gaussian;
using matgauss::Matrix;
using matgauss::Vector;

class RandomInstances {
 public:
  explicit RandomInstances(std::uint64_t seed) : gen_(seed) {}

  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  Matrix NormalMatrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen_);
    return m;
  }

  Matrix Orthogonal(Eigen::Index n) {
    Eigen::HouseholderQR<Matrix> qr(NormalMatrix(n, n));
    return qr.householderQ() * Matrix::Identity(n, n);
  }

  // SPD with eigenvalues drawn uniformly from [lo, hi].
  Matrix Spd(Eigen::Index n, double lo, double hi) {
    Vector values(n);
    for (Eigen::Index i = 0; i < n; ++i) values(i) = Uniform(lo, hi);
    const Matrix q = Orthogonal(n);
    Matrix m = q * values.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
  }

  // PSD of the given rank (rank < n gives a singular matrix).
  Matrix Psd(Eigen::Index n, Eigen::Index rank, double scale = 1.0) {
    const Matrix f = NormalMatrix(n, rank, scale);
    Matrix m = f * f.transpose();
    return 0.5 * (m + m.transpose());
  }

  Vector UniformVector(Eigen::Index n, double lo, double hi) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Uniform(lo, hi);
    return v;
  }

  matgauss::Gaussian SpdGaussian(Eigen::Index n, double lo = 0.1, double hi = 10.0,
                                 double mean_range = 5.0) {
    return matgauss::Gaussian(UniformVector(n, -mean_range, mean_range),
                              Spd(n, lo, hi));
  }

 private:
  std::mt19937_64 gen_;
};

// Literal closed form |m1 - m2|^2 + tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2),
// with square roots from Eigen's Schur-based matrix function.
inline double W2SquaredTraceForm(const Gaussian& p, const Gaussian& q) {
  const Matrix root_p = Matrix(p.cov()).sqrt();
  const Matrix inner = root_p * q.cov() * root_p;
  const Matrix cross = Matrix(0.5 * (inner + inner.transpose())).sqrt();
  return (p.mean() - q.mean()).squaredNorm() +
         (p.cov() + q.cov() - 2.0 * cross).trace();
}

// Scalar closed forms.
inline double ScalarW2(double m1, double v1, double m2, double v2) {
  const double ds = std::sqrt(v1) - std::sqrt(v2);
  return std::sqrt((m1 - m2) * (m1 - m2) + ds * ds);
}

inline double ScalarKl(double m1, double v1, double m2, double v2) {
  return 0.5 * ((m2 - m1) * (m2 - m1) / v2 + v1 / v2 - 1.0 + std::log(v2 / v1));
}

inline double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// TV of two equal-variance scalar Gaussians.
inline double EqualVarianceTv(double dm, double sigma) {
  return 2.0 * NormalCdf(std::abs(dm) / (2.0 * sigma)) - 1.0;
}

inline double NormalPdf(double x, double m, double var) {
  const double z = (x - m) * (x - m) / var;
  return std::exp(-0.5 * z) / std::sqrt(2.0 * std::numbers::pi * var);
}

// 1/2 int |p - q| by adaptive Gauss-Kronrod over +-12 sigma, split at the
// density crossings so the integrand is smooth on each piece.
inline double ScalarTvQuadrature(double m1, double v1, double m2, double v2) {
  auto integrand = [&](double x) {
    return 0.5 * std::abs(NormalPdf(x, m1, v1) - NormalPdf(x, m2, v2));
  };
  const double spread = 12.0 * std::sqrt(std::max(v1, v2));
  const double lo = std::min(m1, m2) - spread;
  const double hi = std::max(m1, m2) + spread;
  // Crossings solve a quadratic in x from log p = log q.
  std::vector<double> cuts{lo};
  const double a = 0.5 / v2 - 0.5 / v1;
  const double b = m1 / v1 - m2 / v2;
  const double c = 0.5 * m2 * m2 / v2 - 0.5 * m1 * m1 / v1 + 0.5 * std::log(v2 / v1);
  if (std::abs(a) < 1e-15) {
    if (std::abs(b) > 0.0) cuts.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc > 0.0) {
      cuts.push_back((-b - std::sqrt(disc)) / (2.0 * a));
      cuts.push_back((-b + std::sqrt(disc)) / (2.0 * a));
    }
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double left = std::clamp(cuts[i], lo, hi);
    const double right = std::clamp(cuts[i + 1], lo, hi);
    if (right <= left) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, left, right, 15, 1e-13);
  }
  return total;
}

inline double RelativeError(double actual, double expected) {
  return std::abs(actual - expected) / std::max(std::abs(expected), 1e-300);
}

}  // namespace wdp_lti::testing

#endif  // WDP_LTI_TESTS_TEST_SUPPORT_HPP_
