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

// Room CO2 case study. The CO2 level follows x(k+1) = a x(k) + b u(k) and
// the sensor reports y(k) = x(k) + v(k). With n occupants the emission
// input is i.i.d. N(m_bar + n m_u, n sigma_u) per step, so the occupancy
// level is encoded in the input distribution.

#ifndef WDP_LTI_BUILDING_HPP_
#define WDP_LTI_BUILDING_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "wdp_lti/calibrate.hpp"
#include "wdp_lti/errors.hpp"
#include "wdp_lti/lti.hpp"
#include "wdp_lti/matgauss.hpp"
#include "wdp_lti/verify.hpp"

namespace wdp_lti::building {

using matgauss::Gaussian;
using matgauss::Matrix;
using matgauss::Vector;

struct BuildingScenario {
  double a = 0.9;
  double b = 1.0;
  double m_bar = 20.0;   // ambient input mean
  double m_u = 1.0;      // per-occupant mean emission
  double sigma_u = 0.1;  // per-occupant emission variance
  Gaussian x0 = Gaussian(Vector::Constant(1, 90.0), Matrix::Constant(1, 1, 10.0));
  int horizon = 2;

  void Validate() const {
    if (!(a > 0.0 && a < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "a must lie in (0, 1)");
    }
    if (!(sigma_u > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "sigma_u must be > 0");
    }
    if (x0.dim() != 1) {
      throw Error(ErrorCode::kDimensionMismatch, "x0 must be one-dimensional");
    }
    if (horizon < 0) {
      throw Error(ErrorCode::kInvalidArgument, "horizon must be nonnegative");
    }
    if (!std::isfinite(b) || !std::isfinite(m_bar) || !std::isfinite(m_u)) {
      throw Error(ErrorCode::kInvalidArgument, "scenario has non-finite fields");
    }
  }

  Eigen::Index steps() const { return static_cast<Eigen::Index>(horizon) + 1; }
};

// Stacked i.i.d. input over horizon+1 steps: N((m_bar + n m_u) 1, n sigma_u I).
// Zero occupants is the Dirac measure at m_bar 1.
inline Gaussian OccupantInputDist(const BuildingScenario& sc, int occupants) {
  if (occupants < 0) {
    throw Error(ErrorCode::kInvalidArgument, "occupancy must be nonnegative");
  }
  const auto steps = sc.steps();
  const double n = static_cast<double>(occupants);
  return Gaussian::Isotropic(Vector::Constant(steps, sc.m_bar + n * sc.m_u),
                             n * sc.sigma_u);
}

inline lti::LtiSystem ToLti(const BuildingScenario& sc) {
  return lti::LtiSystem(Matrix::Constant(1, 1, sc.a), Matrix::Constant(1, 1, sc.b),
                        Matrix::Identity(1, 1), Matrix::Zero(1, 1));
}

struct TrajectoryRow {
  std::uint64_t run = 0;
  int k = 0;
  double y_v = 0.0;
  int occupants = 0;
};

struct TrajectoryTable {
  int horizon = 0;
  std::vector<TrajectoryRow> rows;  // run-major, k-minor

  std::uint64_t runs() const {
    return rows.size() / (static_cast<std::size_t>(horizon) + 1);
  }
};

// Draws x0, the stacked input and the noise for every run (in that order,
// from the run's own stream) and rolls the dynamics forward.
inline TrajectoryTable SimulateRuns(const BuildingScenario& sc, int occupants,
                                    const calibrate::NoiseSpec& noise,
                                    std::uint64_t runs, std::uint64_t seed,
                                    unsigned threads = 1) {
  sc.Validate();
  if (runs == 0) {
    throw Error(ErrorCode::kInvalidArgument, "runs must be positive");
  }
  const auto steps = sc.steps();
  const lti::LtiSystem sys = ToLti(sc);
  const verify::Sampler draw_x0(sc.x0);
  const verify::Sampler draw_u(OccupantInputDist(sc, occupants));
  const verify::Sampler draw_v(
      Gaussian(Vector::Zero(steps), noise.Materialize(steps)));

  TrajectoryTable table;
  table.horizon = sc.horizon;
  table.rows.resize(runs * static_cast<std::uint64_t>(steps));
  verify::ParallelFor(runs, threads, [&](std::size_t run) {
    verify::rng::CounterRng gen(verify::rng::DeriveKey(seed, 3, run));
    const Vector x0 = draw_x0.Draw(gen);
    const Vector u = draw_u.Draw(gen);
    const Vector v = draw_v.Draw(gen);
    const Vector y = lti::Simulate(sys, x0, u) + v;
    for (Eigen::Index k = 0; k < steps; ++k) {
      table.rows[run * static_cast<std::size_t>(steps) + static_cast<std::size_t>(k)] =
          {run, static_cast<int>(k), y(k), occupants};
    }
  });
  return table;
}

// Shortest decimal that round-trips to the same double.
inline std::string FormatDouble(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

inline void WriteCsv(const TrajectoryTable& table, std::ostream& out) {
  out << "run,k,y_v,occupants\n";
  for (const auto& row : table.rows) {
    out << row.run << ',' << row.k << ',' << FormatDouble(row.y_v) << ','
        << row.occupants << '\n';
  }
}

struct TrajectorySummary {
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation (n - 1)
};

inline TrajectorySummary Summarize(const TrajectoryTable& table) {
  const auto steps = static_cast<std::size_t>(table.horizon) + 1;
  TrajectorySummary summary;
  summary.mean.assign(steps, 0.0);
  summary.stddev.assign(steps, 0.0);
  const double runs = static_cast<double>(table.runs());
  for (const auto& row : table.rows) {
    summary.mean[static_cast<std::size_t>(row.k)] += row.y_v;
  }
  for (auto& m : summary.mean) m /= runs;
  for (const auto& row : table.rows) {
    const double d = row.y_v - summary.mean[static_cast<std::size_t>(row.k)];
    summary.stddev[static_cast<std::size_t>(row.k)] += d * d;
  }
  for (auto& s : summary.stddev) {
    s = runs > 1.0 ? std::sqrt(s / (runs - 1.0)) : 0.0;
  }
  return summary;
}

// Published sigma for the default scenario at c = 2.02. These values are not
// reproduced by the public-state rule (which yields about 22.09 at
// delta = 0.1); only their ratio of exactly 2 is consistent with it.
inline std::optional<double> ReferenceSigma(const BuildingScenario& sc, double c,
                                            double delta) {
  const BuildingScenario defaults;
  const bool same = sc.a == defaults.a && sc.b == defaults.b &&
                    sc.m_bar == defaults.m_bar && sc.m_u == defaults.m_u &&
                    sc.sigma_u == defaults.sigma_u &&
                    sc.horizon == defaults.horizon && sc.x0.dim() == 1 &&
                    sc.x0.mean()(0) == 90.0 && sc.x0.cov()(0, 0) == 10.0 &&
                    c == 2.02;
  if (!same) return std::nullopt;
  if (delta == 0.1) return 13.9193;
  if (delta == 0.2) return 6.9596;
  return std::nullopt;
}

struct ScenarioReport {
  int occupants_a = 0;
  int occupants_b = 0;
  int horizon = 0;
  double c = 0.0;
  double delta = 0.0;
  double w2 = 0.0;
  bool adjacent = false;
  std::optional<std::string> warning;
  double lambda_max_ntn = 0.0;
  double lambda_min_public_term = 0.0;
  double sigma2 = 0.0;
  double sigma = 0.0;
  verify::VerificationReport verification;
  std::optional<double> reference_sigma;
};

// Full pipeline for one occupancy pair: adjacency, public-state calibration
// and Monte Carlo verification of the calibrated mechanism.
inline ScenarioReport BuildScenarioReport(const BuildingScenario& sc, int occ_a,
                                          int occ_b,
                                          const calibrate::AdjacencySpec& spec,
                                          const calibrate::PrivacySpec& priv,
                                          std::uint64_t mc_samples,
                                          std::uint64_t seed,
                                          unsigned threads = 1) {
  sc.Validate();
  if (occ_a == occ_b) {
    throw Error(ErrorCode::kInvalidArgument, "occupancies must differ");
  }
  const lti::StackedMaps maps = lti::BuildStacked(ToLti(sc), sc.horizon);
  const Gaussian pu_a = OccupantInputDist(sc, occ_a);
  const Gaussian pu_b = OccupantInputDist(sc, occ_b);

  ScenarioReport report;
  report.occupants_a = occ_a;
  report.occupants_b = occ_b;
  report.horizon = sc.horizon;
  report.c = spec.c();
  report.delta = priv.delta();
  const auto adj = calibrate::CheckAdjacent(matgauss::Product(sc.x0, pu_a),
                                            matgauss::Product(sc.x0, pu_b), spec);
  report.w2 = adj.w2;
  report.adjacent = adj.adjacent;
  if (!adj.adjacent) {
    report.warning = "NotAdjacent: W2 = " + FormatDouble(adj.w2) +
                     " exceeds c = " + FormatDouble(spec.c()) +
                     "; calibration proceeds for the given c";
  }
  const auto cal = calibrate::Calibrate(calibrate::Rule::kTheorem2, maps, spec,
                                        priv, sc.x0.cov());
  report.lambda_max_ntn = cal.lambda_max;
  report.lambda_min_public_term = cal.lambda_min_public_term;
  report.sigma2 = cal.sigma2;
  report.sigma = cal.sigma;
  report.verification = verify::DpVerify(maps, sc.x0, pu_a, sc.x0, pu_b,
                                         cal.noise(), priv, mc_samples, seed,
                                         threads);
  report.reference_sigma = ReferenceSigma(sc, spec.c(), priv.delta());
  return report;
}

}  // namespace wdp_lti::building

#endif  // WDP_LTI_BUILDING_HPP_
