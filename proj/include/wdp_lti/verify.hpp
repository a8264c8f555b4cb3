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

// Seeded Gaussian sampling, log-densities and the Monte Carlo estimate of
// the total variation distance used to check (0, delta)-DP empirically.
//
// Every sample budget is cut into chunks of kChunkSize draws. Each chunk has
// its own counter-based stream keyed by (root seed, stream id, chunk index),
// so results do not depend on how chunks are scheduled across threads.

#ifndef WDP_LTI_VERIFY_HPP_
#define WDP_LTI_VERIFY_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

#include "wdp_lti/calibrate.hpp"
#include "wdp_lti/errors.hpp"
#include "wdp_lti/lti.hpp"
#include "wdp_lti/matgauss.hpp"

namespace wdp_lti::verify {

using matgauss::Gaussian;
using matgauss::Matrix;
using matgauss::Vector;

inline constexpr std::uint64_t kChunkSize = std::uint64_t{1} << 16;

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t DeriveKey(std::uint64_t root, std::uint64_t stream,
                                  std::uint64_t index) {
  return Mix64(Mix64(Mix64(root) ^ Mix64(stream + kGolden)) + index * kGolden);
}

// Counter-based generator: the i-th output is Mix64(key + i * golden).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t Next() { return Mix64(key_ + (++counter_) * kGolden); }

  // Uniform on (0, 1].
  double UniformOpenClosed() {
    return static_cast<double>((Next() >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller; the second variate of each pair is kept for the next call.
  double StandardNormal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(UniformOpenClosed()));
    const double angle = 2.0 * std::numbers::pi * UniformOpenClosed();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rng

// Runs body(task) for task in [0, tasks) on up to `threads` workers
// (0 = hardware concurrency). The first exception is rethrown.
template <typename Body>
void ParallelFor(std::size_t tasks, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < tasks; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (error) std::rethrow_exception(error);
}

// Draws m + L z with L = V sqrt(Lambda) from the covariance eigensystem.
class Sampler {
 public:
  explicit Sampler(const Gaussian& g) : mean_(g.mean()) {
    if (g.dim() > 0) {
      factor_ = g.eigen().vectors * g.eigen().values.cwiseSqrt().asDiagonal();
    }
  }

  Vector Draw(rng::CounterRng& gen) const {
    Vector z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = gen.StandardNormal();
    if (mean_.size() == 0) return z;
    return mean_ + factor_ * z;
  }

 private:
  Vector mean_;
  Matrix factor_;
};

// n independent draws as the columns of a dim x n matrix.
inline Matrix Sample(const Gaussian& p, std::uint64_t n, std::uint64_t seed,
                     unsigned threads = 1) {
  Matrix out(p.dim(), static_cast<Eigen::Index>(n));
  const Sampler sampler(p);
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  ParallelFor(chunks, threads, [&](std::size_t chunk) {
    rng::CounterRng gen(rng::DeriveKey(seed, 0, chunk));
    const std::uint64_t begin = chunk * kChunkSize;
    const std::uint64_t end = std::min(n, begin + kChunkSize);
    for (std::uint64_t i = begin; i < end; ++i) {
      out.col(static_cast<Eigen::Index>(i)) = sampler.Draw(gen);
    }
  });
  return out;
}

// Multivariate normal log-density with the whitening precomputed.
class LogDensity {
 public:
  explicit LogDensity(const Gaussian& p) : mean_(p.mean()) {
    if (!p.IsNonSingular() || p.dim() == 0) {
      throw Error(ErrorCode::kSingularCovariance,
                  "log-density needs a non-singular covariance");
    }
    const auto& eig = p.eigen();
    whiten_ = eig.values.cwiseSqrt().cwiseInverse().asDiagonal() *
              eig.vectors.transpose();
    constant_ = -0.5 * (static_cast<double>(p.dim()) *
                            std::log(2.0 * std::numbers::pi) +
                        eig.values.array().log().sum());
  }

  double operator()(const Vector& x) const {
    if (x.size() != mean_.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "point dimension");
    }
    return constant_ - 0.5 * (whiten_ * (x - mean_)).squaredNorm();
  }

 private:
  Vector mean_;
  Matrix whiten_;
  double constant_ = 0.0;
};

inline double LogDensityAt(const Gaussian& p, const Vector& x) {
  return LogDensity(p)(x);
}

struct TvEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  double p_hat = 0.0;  // P(A) estimate
  double q_hat = 0.0;  // Q(A) estimate
};

// TV(P, Q) = P(A) - Q(A) with A = {x : log p(x) > log q(x)}; P(A) from n
// draws of P, Q(A) from n independent draws of Q.
inline TvEstimate TvMonteCarlo(const Gaussian& p, const Gaussian& q,
                               std::uint64_t n, std::uint64_t seed,
                               unsigned threads = 1) {
  matgauss::internal::RequireSameDim(p, q);
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample count must be positive");
  }
  const LogDensity log_p(p);
  const LogDensity log_q(q);
  const Sampler draw_p(p);
  const Sampler draw_q(q);
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  // Per chunk: [hits under P, hits under Q].
  std::vector<std::uint64_t> hits(2 * chunks, 0);
  ParallelFor(2 * chunks, threads, [&](std::size_t task) {
    const std::size_t chunk = task / 2;
    const bool from_q = (task % 2) == 1;
    rng::CounterRng gen(rng::DeriveKey(seed, from_q ? 2 : 1, chunk));
    const Sampler& sampler = from_q ? draw_q : draw_p;
    const std::uint64_t begin = chunk * kChunkSize;
    const std::uint64_t end = std::min(n, begin + kChunkSize);
    std::uint64_t count = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      const Vector x = sampler.Draw(gen);
      if (log_p(x) > log_q(x)) ++count;
    }
    hits[task] = count;
  });
  std::uint64_t in_p = 0;
  std::uint64_t in_q = 0;
  for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
    in_p += hits[2 * chunk];
    in_q += hits[2 * chunk + 1];
  }
  TvEstimate est;
  est.n_samples = n;
  est.seed = seed;
  const double total = static_cast<double>(n);
  est.p_hat = static_cast<double>(in_p) / total;
  est.q_hat = static_cast<double>(in_q) / total;
  est.value = est.p_hat - est.q_hat;
  est.std_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / total +
                            est.q_hat * (1.0 - est.q_hat) / total);
  return est;
}

// Passing means the estimate stays within delta + kPassSlack standard errors.
inline constexpr double kPassSlack = 3.0;

struct VerificationReport {
  TvEstimate tv;
  double delta = 0.0;
  bool pass = false;
  double pinsker_bound = 0.0;  // 1/2 sqrt(symmetrized KL) of the outputs
};

// Pushes both input pairs through the mechanism and checks that the output
// distributions are within total variation delta of each other.
inline VerificationReport DpVerify(const lti::StackedMaps& maps,
                                   const Gaussian& px0, const Gaussian& pu,
                                   const Gaussian& px0p, const Gaussian& pup,
                                   const calibrate::NoiseSpec& noise,
                                   const calibrate::PrivacySpec& priv,
                                   std::uint64_t n, std::uint64_t seed,
                                   unsigned threads = 1) {
  priv.RequireZeroEpsilon();
  const Matrix noise_cov = noise.Materialize(maps.stacked_output_dim());
  const Gaussian out = lti::Pushforward(maps, px0, pu, noise_cov);
  const Gaussian out_p = lti::Pushforward(maps, px0p, pup, noise_cov);
  VerificationReport report;
  report.tv = TvMonteCarlo(out, out_p, n, seed, threads);
  report.delta = priv.delta();
  report.pass = report.tv.value <= priv.delta() + kPassSlack * report.tv.std_error;
  report.pinsker_bound =
      matgauss::PinskerTvBound(matgauss::SymmetrizedKl(out, out_p));
  return report;
}

}  // namespace wdp_lti::verify

#endif  // WDP_LTI_VERIFY_HPP_
