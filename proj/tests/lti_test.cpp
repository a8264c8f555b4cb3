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

#include "wdp_lti/lti.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "wdp_lti/verify.hpp"

namespace wdp_lti::lti {
namespace {

using ::wdp_lti::testing::RandomInstances;

// Frozen from numpy.linalg.eigvalsh on the explicit 4x4 Gram of [O N] for
// A = 0.9, B = 1, C = 1, D = 0, t = 2.
constexpr double kBuildingGramLambdaMax = 4.242732204888149;
// lambda_max(N^T N) for the same stack; the 2x2 characteristic polynomial
// gives (2.81 + sqrt(3.8961)) / 2.
constexpr double kBuildingNtnLambdaMax = 2.391927048975759;

LtiSystem Scalar(double a, double b, double c, double d) {
  return LtiSystem(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b),
                   Matrix::Constant(1, 1, c), Matrix::Constant(1, 1, d));
}

LtiSystem RandomSystem(RandomInstances& rnd) {
  const int n = rnd.Int(1, 3);
  const int m = rnd.Int(1, 2);
  const int q = rnd.Int(1, 2);
  return LtiSystem(rnd.NormalMatrix(n, n, 0.5), rnd.NormalMatrix(n, m),
                   rnd.NormalMatrix(q, n), rnd.NormalMatrix(q, m, 0.5));
}

TEST(LtiSystemTest, RejectsInconsistentDimensions) {
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 3), Matrix::Zero(2, 1), Matrix::Zero(1, 2),
                         Matrix::Zero(1, 1)),
               Error);
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(3, 1), Matrix::Zero(1, 2),
                         Matrix::Zero(1, 1)),
               Error);
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 3),
                         Matrix::Zero(1, 1)),
               Error);
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2),
                         Matrix::Zero(2, 1)),
               Error);
}

TEST(BuildStackedTest, HorizonZeroIsCAndD) {
  RandomInstances rnd(1);
  const LtiSystem sys = RandomSystem(rnd);
  const StackedMaps maps = BuildStacked(sys, 0);
  EXPECT_EQ(maps.O, sys.C());
  EXPECT_EQ(maps.N, sys.D());
}

TEST(BuildStackedTest, BuildingHorizonTwo) {
  const StackedMaps maps = BuildStacked(Scalar(0.9, 1, 1, 0), 2);
  Matrix o(3, 1);
  o << 1, 0.9, 0.81;
  Matrix n(3, 3);
  n << 0, 0, 0, 1, 0, 0, 0.9, 1, 0;
  EXPECT_TRUE(maps.O.isApprox(o, 1e-15));
  EXPECT_TRUE(maps.N.isApprox(n, 1e-15));
  EXPECT_EQ(maps.gram.rows(), 4);
}

TEST(BuildStackedTest, IdentityDynamics) {
  const Matrix i2 = Matrix::Identity(2, 2);
  const StackedMaps maps = BuildStacked(LtiSystem(i2, i2, i2, Matrix::Zero(2, 2)), 1);
  Matrix o(4, 2);
  o << i2, i2;
  Matrix n = Matrix::Zero(4, 4);
  n.block(2, 0, 2, 2) = i2;
  EXPECT_EQ(maps.O, o);
  EXPECT_EQ(maps.N, n);
}

TEST(BuildStackedTest, RejectsNegativeHorizon) {
  EXPECT_THROW(BuildStacked(Scalar(0.9, 1, 1, 0), -1), Error);
}

TEST(BuildStackedTest, StructureMatchesDefinition) {
  RandomInstances rnd(2);
  for (int trial = 0; trial < 30; ++trial) {
    const LtiSystem sys = RandomSystem(rnd);
    const int t = rnd.Int(0, 5);
    const StackedMaps maps = BuildStacked(sys, t);
    const auto q = sys.output_dim();
    const auto m = sys.input_dim();
    Matrix a_pow = Matrix::Identity(sys.state_dim(), sys.state_dim());
    for (int k = 0; k <= t; ++k) {
      EXPECT_TRUE(maps.O.middleRows(k * q, q).isApprox(sys.C() * a_pow, 1e-12));
      a_pow = a_pow * sys.A();
    }
    for (int i = 0; i <= t; ++i) {
      for (int j = 0; j <= t; ++j) {
        const Matrix block = maps.N.block(i * q, j * m, q, m);
        if (j > i) {
          EXPECT_TRUE(block.isZero(0.0));
        } else if (j == i) {
          EXPECT_EQ(block, sys.D());
        } else {
          Matrix power = Matrix::Identity(sys.state_dim(), sys.state_dim());
          for (int p = 0; p < i - j - 1; ++p) power = power * sys.A();
          EXPECT_TRUE(block.isApprox(sys.C() * power * sys.B(), 1e-12));
        }
      }
    }
    const Matrix joint = maps.Joint();
    const Matrix gram = joint.transpose() * joint;
    EXPECT_LE((maps.gram - gram).norm(), 1e-10 * std::max(1.0, gram.norm()));
  }
}

TEST(BuildStackedTest, StackedOutputsMatchSimulation) {
  RandomInstances rnd(3);
  for (int trial = 0; trial < 30; ++trial) {
    const LtiSystem sys = RandomSystem(rnd);
    const int t = rnd.Int(0, 5);
    const StackedMaps maps = BuildStacked(sys, t);
    const Vector x0 = rnd.UniformVector(sys.state_dim(), -2, 2);
    const Vector u = rnd.UniformVector(maps.stacked_input_dim(), -2, 2);
    const Vector y = Simulate(sys, x0, u);
    EXPECT_TRUE(y.isApprox(maps.O * x0 + maps.N * u, 1e-12));
  }
}

TEST(BuildStackedTest, NestingAcrossHorizons) {
  RandomInstances rnd(4);
  for (int trial = 0; trial < 20; ++trial) {
    const LtiSystem sys = RandomSystem(rnd);
    const int t = rnd.Int(1, 6);
    const StackedMaps big = BuildStacked(sys, t);
    for (int s = 0; s <= t; ++s) {
      const StackedMaps small = BuildStacked(sys, s);
      const auto rows = small.O.rows();
      EXPECT_EQ(big.O.topRows(rows), small.O);
      EXPECT_EQ(big.N.topLeftCorner(rows, small.N.cols()), small.N);
    }
  }
}

TEST(SensitivityTest, Examples) {
  const Matrix z = Matrix::Zero(1, 1);
  EXPECT_EQ(Sensitivity(BuildStacked(LtiSystem(z, z, z, z), 3)), 0.0);
  EXPECT_NEAR(Sensitivity(BuildStacked(Scalar(0, 0, 1, 1), 0)), 2.0, 1e-14);
  const StackedMaps building = BuildStacked(Scalar(0.9, 1, 1, 0), 2);
  EXPECT_NEAR(Sensitivity(building), kBuildingGramLambdaMax, 1e-10 * kBuildingGramLambdaMax);
  EXPECT_NEAR(InputSensitivity(building), kBuildingNtnLambdaMax, 1e-12);
  EXPECT_NEAR(InputSensitivity(building), (2.81 + std::sqrt(3.8961)) / 2.0, 1e-12);
}

TEST(SensitivityTest, GramEigenvaluesOfBuildingStack) {
  const auto ext = matgauss::EigExtremes(BuildStacked(Scalar(0.9, 1, 1, 0), 2).gram);
  EXPECT_NEAR(ext.lambda_min, 0.0, 1e-14);
  EXPECT_NEAR(ext.lambda_max, kBuildingGramLambdaMax, 1e-12);
}

TEST(SensitivityTest, MonotoneInHorizon) {
  RandomInstances rnd(5);
  for (int trial = 0; trial < 20; ++trial) {
    const LtiSystem sys = RandomSystem(rnd);
    double previous = 0.0;
    for (int t = 0; t <= 6; ++t) {
      const double s = Sensitivity(BuildStacked(sys, t));
      EXPECT_GE(s, previous * (1.0 - 1e-12));
      previous = s;
    }
  }
}

TEST(LipschitzBoundTest, Examples) {
  EXPECT_NEAR(LipschitzBound(Matrix::Identity(4, 4)), 1.0, 1e-14);
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 3, 1;
  EXPECT_NEAR(LipschitzBound(d), 3.0, 1e-14);
  const StackedMaps building = BuildStacked(Scalar(0.9, 1, 1, 0), 2);
  EXPECT_NEAR(LipschitzBound(building.Joint()), std::sqrt(Sensitivity(building)), 1e-12);
}

TEST(LipschitzBoundTest, MatchesSvd) {
  RandomInstances rnd(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix f = rnd.NormalMatrix(rnd.Int(1, 6), rnd.Int(1, 6));
    Eigen::JacobiSVD<Matrix> svd(f);
    EXPECT_NEAR(LipschitzBound(f), svd.singularValues()(0),
                1e-10 * svd.singularValues()(0));
  }
}

TEST(PushforwardTest, ZeroSystemKeepsOnlyNoise) {
  const Matrix z = Matrix::Zero(1, 1);
  const StackedMaps maps = BuildStacked(LtiSystem(z, z, z, z), 2);
  const Gaussian out = Pushforward(maps, Gaussian::Isotropic(Vector::Constant(1, 5.0), 3.0),
                                   Gaussian::Isotropic(Vector::Ones(3), 2.0),
                                   4.0 * Matrix::Identity(3, 3));
  EXPECT_TRUE(out.mean().isZero(0.0));
  EXPECT_EQ(out.cov(), 4.0 * Matrix::Identity(3, 3));
}

TEST(PushforwardTest, ScalarSumOfIndependentTerms) {
  const StackedMaps maps = BuildStacked(Scalar(0.5, 2, 1, 1), 0);
  const Gaussian out =
      Pushforward(maps, Gaussian::Isotropic(Vector::Constant(1, 1.5), 0.25),
                  Gaussian::Isotropic(Vector::Constant(1, -0.5), 2.0),
                  Matrix::Constant(1, 1, 0.75));
  EXPECT_DOUBLE_EQ(out.mean()(0), 1.0);
  EXPECT_DOUBLE_EQ(out.cov()(0, 0), 3.0);
}

TEST(PushforwardTest, BuildingMeanTrajectory) {
  const StackedMaps maps = BuildStacked(Scalar(0.9, 1, 1, 0), 2);
  const Gaussian out =
      Pushforward(maps, Gaussian::Isotropic(Vector::Constant(1, 90.0), 10.0),
                  Gaussian::Isotropic(Vector::Constant(3, 21.0), 0.1),
                  Matrix::Zero(3, 3));
  EXPECT_NEAR(out.mean()(0), 90.0, 1e-12);
  EXPECT_NEAR(out.mean()(1), 102.0, 1e-12);
  EXPECT_NEAR(out.mean()(2), 112.8, 1e-12);
}

TEST(PushforwardTest, DimensionMismatch) {
  const StackedMaps maps = BuildStacked(Scalar(0.9, 1, 1, 0), 2);
  const Gaussian x0 = Gaussian::Isotropic(Vector::Zero(1), 1.0);
  try {
    Pushforward(maps, x0, Gaussian::Isotropic(Vector::Zero(2), 1.0), Matrix::Zero(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  EXPECT_THROW(
      Pushforward(maps, x0, Gaussian::Isotropic(Vector::Zero(3), 1.0), Matrix::Zero(2, 2)),
      Error);
}

// Lemma-2 style contraction on random affine maps with independent noise.
TEST(PushforwardTest, WassersteinContractsByOperatorNorm) {
  RandomInstances rnd(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rnd.Int(1, 5);
    const int m = rnd.Int(1, 5);
    const Matrix f = rnd.NormalMatrix(m, n);
    const Gaussian px = rnd.SpdGaussian(n);
    const Gaussian pxp = rnd.SpdGaussian(n);
    const Matrix noise = rnd.Psd(m, rnd.Int(0, m));
    const double lhs = matgauss::W2Distance(AffinePushforward(f, px, noise),
                                            AffinePushforward(f, pxp, noise));
    EXPECT_LE(lhs, LipschitzBound(f) * matgauss::W2Distance(px, pxp) + 1e-9);
  }
}

TEST(SimulateTest, EmpiricalMomentsMatchPushforward) {
  const LtiSystem sys(Matrix::Constant(1, 1, 0.9), Matrix::Constant(1, 1, 1.0),
                      Matrix::Identity(1, 1), Matrix::Zero(1, 1));
  const StackedMaps maps = BuildStacked(sys, 2);
  const Gaussian px0 = Gaussian::Isotropic(Vector::Constant(1, 90.0), 10.0);
  const Gaussian pu = Gaussian::Isotropic(Vector::Constant(3, 21.0), 0.1);
  const Gaussian analytic = Pushforward(maps, px0, pu, Matrix::Zero(3, 3));

  constexpr int kSamples = 100'000;
  const Matrix x0s = verify::Sample(px0, kSamples, 101);
  const Matrix us = verify::Sample(pu, kSamples, 202);
  Matrix ys(3, kSamples);
  for (int i = 0; i < kSamples; ++i) ys.col(i) = Simulate(sys, x0s.col(i), us.col(i));
  const Vector mean = ys.rowwise().mean();
  const Matrix centered = ys.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / (kSamples - 1.0);
  const Matrix& s = analytic.cov();
  for (int i = 0; i < 3; ++i) {
    EXPECT_LE(std::abs(mean(i) - analytic.mean()(i)), 4.0 * std::sqrt(s(i, i) / kSamples));
    for (int j = 0; j < 3; ++j) {
      const double se = std::sqrt((s(i, i) * s(j, j) + s(i, j) * s(i, j)) / kSamples);
      EXPECT_LE(std::abs(cov(i, j) - s(i, j)), 4.0 * se) << i << "," << j;
    }
  }
}

}  // namespace
}  // namespace wdp_lti::lti
