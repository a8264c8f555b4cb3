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

// Command-line front end: `distance`, `calibrate`, `verify`, `simulate`.
//
// Exit codes: 0 success/pass, 1 verification failed, 2 configuration error,
// 3 dimension error, 4 unsupported privacy regime, 5 I/O error.
//
// Run() is the whole program minus process plumbing so it can be driven
// in-process by tests.

#ifndef WDP_LTI_CLI_HPP_
#define WDP_LTI_CLI_HPP_

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wdp_lti/building.hpp"
#include "wdp_lti/calibrate.hpp"
#include "wdp_lti/errors.hpp"
#include "wdp_lti/json_io.hpp"
#include "wdp_lti/lti.hpp"
#include "wdp_lti/matgauss.hpp"
#include "wdp_lti/verify.hpp"

namespace wdp_lti::cli {

using nlohmann::json;
using matgauss::Gaussian;
using matgauss::Matrix;

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitConfig = 2,
  kExitDimension = 3,
  kExitUnsupported = 4,
  kExitIo = 5,
};

inline constexpr std::uint64_t kDefaultSamples = 1'000'000;
inline constexpr std::uint64_t kDefaultRuns = 100;

inline int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
      return kExitDimension;
    case ErrorCode::kUnsupportedEpsilon:
      return kExitUnsupported;
    case ErrorCode::kIo:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::string output;
  std::string format = "json";
  std::string rule;
  std::optional<int> occupants;
  std::optional<std::uint64_t> runs;
  unsigned threads = 0;
};

// WDP_LTI_THREADS caps internal parallelism; unset or 0 means automatic.
inline unsigned ThreadsFromEnv() {
  const char* raw = std::getenv("WDP_LTI_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const unsigned long value = std::strtoul(raw, &end, 10);
  if (end == raw || *end != '\0') {
    throw Error(ErrorCode::kInvalidConfig,
                "WDP_LTI_THREADS must be a nonnegative integer");
  }
  return static_cast<unsigned>(value);
}

namespace internal {

using json_io::ConfigError;
using json_io::Field;

inline json LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) ConfigError("cannot read config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

inline std::uint64_t ReadCount(const json& config, const char* key,
                               std::uint64_t fallback) {
  if (!config.contains(key)) return fallback;
  const json& j = config.at(key);
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 0.0 && v == static_cast<double>(static_cast<std::uint64_t>(v))) {
      return static_cast<std::uint64_t>(v);
    }
  }
  ConfigError(std::string(key) + " must be a nonnegative integer");
}

inline calibrate::AdjacencySpec AdjacencyFromConfig(const json& config) {
  const json& adj = Field(config, "adjacency");
  const double c = json_io::ReadNumber(Field(adj, "c"), "adjacency.c");
  int p = 2;
  if (adj.contains("p")) p = static_cast<int>(json_io::ReadNumber(adj.at("p"), "p"));
  try {
    return calibrate::AdjacencySpec(c, p);
  } catch (const Error& e) {
    ConfigError(e.what());
  }
}

inline calibrate::PrivacySpec PrivacyFromConfig(const json& config) {
  const json& priv = Field(config, "privacy");
  const double delta = json_io::ReadNumber(Field(priv, "delta"), "privacy.delta");
  double epsilon = 0.0;
  if (priv.contains("epsilon")) {
    epsilon = json_io::ReadNumber(priv.at("epsilon"), "privacy.epsilon");
  }
  try {
    return calibrate::PrivacySpec(delta, epsilon);
  } catch (const Error& e) {
    ConfigError(e.what());
  }
}

// Everything a pairwise command needs, resolved from either the explicit
// system form or the building scenario form of the config.
struct Setup {
  std::optional<lti::LtiSystem> system;
  int horizon = 0;
  std::optional<building::BuildingScenario> scenario;
  std::optional<Gaussian> x0;
  std::optional<Gaussian> x0_prime;
  std::vector<Gaussian> inputs;
};

inline Setup ResolveSetup(const json& config, bool need_pair) {
  Setup setup;
  if (config.contains("scenario")) {
    setup.scenario = json_io::ScenarioFromJson(config.at("scenario"));
    setup.system = building::ToLti(*setup.scenario);
    setup.horizon = setup.scenario->horizon;
    setup.x0 = setup.scenario->x0;
    if (need_pair) {
      const json& occ = Field(config, "occupancies");
      if (!occ.is_array() || occ.size() != 2 || !occ[0].is_number_integer() ||
          !occ[1].is_number_integer()) {
        ConfigError("occupancies must be a pair of integers");
      }
      for (const auto& n : occ) {
        try {
          setup.inputs.push_back(
              building::OccupantInputDist(*setup.scenario, n.get<int>()));
        } catch (const Error& e) {
          ConfigError(e.what());
        }
      }
    }
  } else {
    setup.system = json_io::SystemFromJson(Field(config, "system"));
    const json& horizon = Field(config, "horizon");
    if (!horizon.is_number_integer() || horizon.get<int>() < 0) {
      ConfigError("horizon must be a nonnegative integer");
    }
    setup.horizon = horizon.get<int>();
    if (config.contains("x0")) setup.x0 = json_io::GaussianFromJson(config.at("x0"));
    if (need_pair) {
      const json& inputs = Field(config, "inputs");
      if (!inputs.is_array() || inputs.size() != 2) {
        ConfigError("inputs must hold exactly two Gaussian encodings");
      }
      for (const auto& g : inputs) setup.inputs.push_back(json_io::GaussianFromJson(g));
      if (!setup.x0.has_value()) ConfigError("missing field 'x0'");
    }
  }
  if (config.contains("x0_prime")) {
    setup.x0_prime = json_io::GaussianFromJson(config.at("x0_prime"));
  }
  return setup;
}

// "noise": {"sigma2": s} | {"cov": [[..]]} |
//          {"rule": "corollary1"|"theorem2", "sigma_scale": f}
inline calibrate::NoiseSpec NoiseFromConfig(const json& config,
                                            const lti::StackedMaps& maps,
                                            const Setup& setup) {
  const json& noise = Field(config, "noise");
  if (noise.contains("sigma2")) {
    try {
      return calibrate::NoiseSpec::Isotropic(
          json_io::ReadNumber(noise.at("sigma2"), "noise.sigma2"));
    } catch (const Error& e) {
      ConfigError(e.what());
    }
  }
  if (noise.contains("cov")) {
    return calibrate::NoiseSpec::Full(json_io::MatrixFromJson(noise.at("cov"), "noise.cov"));
  }
  if (noise.contains("rule")) {
    if (!noise.at("rule").is_string()) ConfigError("noise.rule must be a string");
    const auto rule = calibrate::ParseRule(noise.at("rule").get<std::string>());
    std::optional<Matrix> sigma_x0;
    if (setup.x0.has_value()) sigma_x0 = setup.x0->cov();
    const auto report = calibrate::Calibrate(rule, maps, AdjacencyFromConfig(config),
                                             PrivacyFromConfig(config), sigma_x0);
    double scale = 1.0;
    if (noise.contains("sigma_scale")) {
      scale = json_io::ReadNumber(noise.at("sigma_scale"), "noise.sigma_scale");
    }
    return report.noise().ScaledStddev(scale);
  }
  ConfigError("noise needs one of sigma2, cov or rule");
}

inline bool NoiseUsesPublicState(const json& config) {
  if (!config.contains("noise")) return false;
  const json& noise = config.at("noise");
  return noise.is_object() && noise.contains("rule") &&
         noise.at("rule").is_string() && noise.at("rule").get<std::string>() == "theorem2";
}

inline void Emit(const json& report, const Options& opts, std::ostream& out) {
  if (opts.format == "csv") {
    out << "key,value\n";
    for (const auto& [key, value] : report.items()) {
      out << key << ',' << (value.is_string() ? value.get<std::string>() : value.dump())
          << '\n';
    }
    return;
  }
  out << report.dump(2) << '\n';
}

inline int CmdDistance(const Options& opts, std::ostream& out) {
  const json config = LoadConfig(opts.config);
  const json& inputs = Field(config, "inputs");
  if (!inputs.is_array() || inputs.size() != 2) {
    ConfigError("inputs must hold exactly two Gaussian encodings");
  }
  const Gaussian p = json_io::GaussianFromJson(inputs[0]);
  const Gaussian q = json_io::GaussianFromJson(inputs[1]);
  json report;
  report["w2"] = matgauss::W2Distance(p, q);
  if (p.IsNonSingular() && q.IsNonSingular()) {
    const double kl_pq = matgauss::KlDivergence(p, q);
    const double kl_qp = matgauss::KlDivergence(q, p);
    const auto bound = matgauss::Lemma1Bound(p, q);
    report["kl_pq"] = kl_pq;
    report["kl_qp"] = kl_qp;
    report["sym_kl"] = bound.sym_kl;
    report["pinsker_tv_bound"] = bound.pinsker_tv_bound;
    report["lemma1_rhs"] = bound.lemma1_rhs;
  } else {
    for (const char* key :
         {"kl_pq", "kl_qp", "sym_kl", "pinsker_tv_bound", "lemma1_rhs"}) {
      report[key] = nullptr;
    }
  }
  Emit(report, opts, out);
  return kExitOk;
}

inline int CmdCalibrate(const Options& opts, std::ostream& out) {
  const json config = LoadConfig(opts.config);
  std::string rule_name = opts.rule;
  if (rule_name.empty()) {
    rule_name = config.contains("rule") && config.at("rule").is_string()
                    ? config.at("rule").get<std::string>()
                    : "corollary1";
  }
  calibrate::Rule rule;
  try {
    rule = calibrate::ParseRule(rule_name);
  } catch (const Error& e) {
    ConfigError(e.what());
  }
  const Setup setup = ResolveSetup(config, /*need_pair=*/false);
  const auto spec = AdjacencyFromConfig(config);
  const auto priv = PrivacyFromConfig(config);
  priv.RequireZeroEpsilon();
  std::optional<Matrix> sigma_x0;
  if (setup.x0.has_value()) sigma_x0 = setup.x0->cov();
  if (rule == calibrate::Rule::kTheorem2 && !sigma_x0.has_value()) {
    ConfigError("rule theorem2 needs the public initial-state distribution 'x0'");
  }
  const auto maps = lti::BuildStacked(*setup.system, setup.horizon);
  const auto report = calibrate::Calibrate(rule, maps, spec, priv, sigma_x0);
  json j = json_io::ToJson(report);
  if (setup.scenario.has_value() && rule == calibrate::Rule::kTheorem2) {
    j["reference_sigma"] = json_io::OptionalNumber(
        building::ReferenceSigma(*setup.scenario, spec.c(), priv.delta()));
  }
  Emit(j, opts, out);
  return kExitOk;
}

inline int CmdVerify(const Options& opts, std::ostream& out) {
  const json config = LoadConfig(opts.config);
  const std::uint64_t samples =
      opts.samples.value_or(ReadCount(config, "samples", kDefaultSamples));
  const std::uint64_t seed = opts.seed.value_or(ReadCount(config, "seed", 0));
  if (samples == 0) ConfigError("samples must be positive");
  const Setup setup = ResolveSetup(config, /*need_pair=*/true);
  const auto priv = PrivacyFromConfig(config);
  priv.RequireZeroEpsilon();
  const auto maps = lti::BuildStacked(*setup.system, setup.horizon);
  const Gaussian& x0 = *setup.x0;
  const Gaussian& x0p = setup.x0_prime.has_value() ? *setup.x0_prime : x0;
  if (NoiseUsesPublicState(config)) calibrate::CheckPublicInitialState(x0, x0p);
  const auto noise = NoiseFromConfig(config, maps, setup);
  const auto report = verify::DpVerify(maps, x0, setup.inputs[0], x0p,
                                       setup.inputs[1], noise, priv, samples,
                                       seed, opts.threads);
  Emit(json_io::ToJson(report), opts, out);
  return report.pass ? kExitOk : kExitVerifyFailed;
}

inline int CmdSimulate(const Options& opts, std::ostream& out) {
  const json config = LoadConfig(opts.config);
  if (!config.contains("scenario")) ConfigError("simulate needs a 'scenario'");
  const Setup setup = ResolveSetup(config, /*need_pair=*/false);
  const auto& sc = *setup.scenario;
  int occupants = 1;
  if (opts.occupants.has_value()) {
    occupants = *opts.occupants;
  } else if (config.contains("occupants")) {
    if (!config.at("occupants").is_number_integer()) {
      ConfigError("occupants must be an integer");
    }
    occupants = config.at("occupants").get<int>();
  }
  if (occupants < 0) ConfigError("occupants must be nonnegative");
  const std::uint64_t runs = opts.runs.value_or(ReadCount(config, "runs", kDefaultRuns));
  if (runs == 0) ConfigError("runs must be positive");
  const std::uint64_t seed = opts.seed.value_or(ReadCount(config, "seed", 0));
  const auto maps = lti::BuildStacked(*setup.system, setup.horizon);
  const auto noise = NoiseFromConfig(config, maps, setup);
  const auto table = building::SimulateRuns(sc, occupants, noise, runs, seed, opts.threads);

  if (opts.output.empty()) {
    if (opts.format != "csv") {
      ConfigError("simulate needs --output unless --format csv is given");
    }
    building::WriteCsv(table, out);
    return kExitOk;
  }
  {
    std::ofstream file(opts.output, std::ios::binary | std::ios::trunc);
    if (!file) {
      throw Error(ErrorCode::kIo, "cannot open '" + opts.output + "' for writing");
    }
    building::WriteCsv(table, file);
    file.flush();
    if (!file) throw Error(ErrorCode::kIo, "failed writing '" + opts.output + "'");
  }
  const auto summary = building::Summarize(table);
  json j{{"occupants", occupants},
         {"runs", runs},
         {"seed", seed},
         {"horizon", sc.horizon},
         {"output", opts.output},
         {"mean", summary.mean},
         {"std", summary.stddev}};
  if (noise.kind() == calibrate::NoiseSpec::Kind::kIsotropic) {
    j["sigma2"] = noise.sigma2();
  }
  Emit(j, opts, out);
  return kExitOk;
}

}  // namespace internal

// threads: explicit override; otherwise WDP_LTI_THREADS is consulted.
inline int Run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err, std::optional<unsigned> threads = std::nullopt) {
  CLI::App app{"Gaussian output-noise calibration and verification for LTI systems"};
  app.require_subcommand(1);
  Options opts;
  app.add_option("--config", opts.config, "JSON configuration file")->required();
  app.add_option("--seed", opts.seed, "root seed (overrides config)");
  app.add_option("--samples", opts.samples, "Monte Carlo sample count");
  app.add_option("--output", opts.output, "output path");
  app.add_option("--format", opts.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* distance = app.add_subcommand("distance", "W2 / KL / Pinsker between two Gaussians");
  auto* calibrate_cmd = app.add_subcommand("calibrate", "design output noise");
  calibrate_cmd->add_option("--rule", opts.rule, "corollary1 or theorem2")
      ->check(CLI::IsMember({"corollary1", "theorem2"}));
  auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo (0, delta)-DP check");
  auto* simulate = app.add_subcommand("simulate", "simulate building trajectories");
  simulate->add_option("--occupants", opts.occupants, "occupancy level");
  simulate->add_option("--runs", opts.runs, "number of runs");
  for (auto* sub : {distance, calibrate_cmd, verify_cmd, simulate}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }

  try {
    opts.threads = threads.has_value() ? *threads : ThreadsFromEnv();
    if (distance->parsed()) return internal::CmdDistance(opts, out);
    if (calibrate_cmd->parsed()) return internal::CmdCalibrate(opts, out);
    if (verify_cmd->parsed()) return internal::CmdVerify(opts, out);
    return internal::CmdSimulate(opts, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const json::exception& e) {
    err << "InvalidConfig: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace wdp_lti::cli

#endif  // WDP_LTI_CLI_HPP_
