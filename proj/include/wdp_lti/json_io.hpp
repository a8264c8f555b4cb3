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

// JSON encodings of Gaussians, systems, scenarios and reports.
//
//   Gaussian:  {"mean": [..], "cov": [[..], ..]}   (row-major covariance)
//   System:    {"A": [[..]], "B": [[..]], "C": [[..]], "D": [[..]]}
//   Scenario:  {"a", "b", "m_bar", "m_u", "sigma_u", "x0", "horizon"}
//
// A bare number is accepted wherever a 1x1 matrix or length-1 vector is.

#ifndef WDP_LTI_JSON_IO_HPP_
#define WDP_LTI_JSON_IO_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "wdp_lti/building.hpp"
#include "wdp_lti/calibrate.hpp"
#include "wdp_lti/errors.hpp"
#include "wdp_lti/lti.hpp"
#include "wdp_lti/matgauss.hpp"
#include "wdp_lti/verify.hpp"

namespace wdp_lti::json_io {

using nlohmann::json;
using matgauss::Gaussian;
using matgauss::Matrix;
using matgauss::Vector;

[[noreturn]] inline void ConfigError(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

inline double ReadNumber(const json& j, const std::string& what) {
  if (!j.is_number()) ConfigError(what + " must be a number");
  return j.get<double>();
}

inline const json& Field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    ConfigError(std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

inline Vector VectorFromJson(const json& j, const std::string& what) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) ConfigError(what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = ReadNumber(j[i], what);
  }
  return v;
}

inline Matrix MatrixFromJson(const json& j, const std::string& what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array()) ConfigError(what + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) ConfigError(what + " must be an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      ConfigError(what + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = ReadNumber(row[static_cast<std::size_t>(c)], what);
    }
  }
  return m;
}

inline json ToJson(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json ToJson(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

inline Gaussian GaussianFromJson(const json& j) {
  Vector mean = VectorFromJson(Field(j, "mean"), "mean");
  Matrix cov = MatrixFromJson(Field(j, "cov"), "cov");
  try {
    return Gaussian(std::move(mean), cov);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDimensionMismatch) ConfigError(e.what());
    throw;
  }
}

inline json ToJson(const Gaussian& g) {
  return json{{"mean", ToJson(g.mean())}, {"cov", ToJson(g.cov())}};
}

inline lti::LtiSystem SystemFromJson(const json& j) {
  return lti::LtiSystem(MatrixFromJson(Field(j, "A"), "A"),
                        MatrixFromJson(Field(j, "B"), "B"),
                        MatrixFromJson(Field(j, "C"), "C"),
                        MatrixFromJson(Field(j, "D"), "D"));
}

inline json ToJson(const lti::LtiSystem& sys) {
  return json{{"A", ToJson(sys.A())},
              {"B", ToJson(sys.B())},
              {"C", ToJson(sys.C())},
              {"D", ToJson(sys.D())}};
}

// Missing scenario fields keep the defaults of BuildingScenario.
inline building::BuildingScenario ScenarioFromJson(const json& j) {
  if (!j.is_object()) ConfigError("scenario must be an object");
  building::BuildingScenario sc;
  auto number = [&](const char* key, double& field) {
    if (j.contains(key)) field = ReadNumber(j.at(key), key);
  };
  number("a", sc.a);
  number("b", sc.b);
  number("m_bar", sc.m_bar);
  number("m_u", sc.m_u);
  number("sigma_u", sc.sigma_u);
  if (j.contains("x0")) sc.x0 = GaussianFromJson(j.at("x0"));
  if (j.contains("horizon")) {
    if (!j.at("horizon").is_number_integer()) ConfigError("horizon must be an integer");
    sc.horizon = j.at("horizon").get<int>();
  }
  try {
    sc.Validate();
  } catch (const Error& e) {
    ConfigError(e.what());
  }
  return sc;
}

inline json ToJson(const building::BuildingScenario& sc) {
  return json{{"a", sc.a},           {"b", sc.b},
              {"m_bar", sc.m_bar},   {"m_u", sc.m_u},
              {"sigma_u", sc.sigma_u}, {"x0", ToJson(sc.x0)},
              {"horizon", sc.horizon}};
}

inline json ToJson(const calibrate::CalibrationReport& r) {
  return json{{"rule", std::string(calibrate::RuleName(r.rule))},
              {"c", r.c},
              {"delta", r.delta},
              {"lambda_max", r.lambda_max},
              {"lambda_min_public_term", r.lambda_min_public_term},
              {"sigma2", r.sigma2},
              {"sigma", r.sigma}};
}

inline json ToJson(const verify::VerificationReport& r) {
  return json{{"tv", r.tv.value},       {"std_error", r.tv.std_error},
              {"n", r.tv.n_samples},    {"seed", r.tv.seed},
              {"delta", r.delta},       {"pass", r.pass},
              {"pinsker_bound", r.pinsker_bound}};
}

inline json OptionalNumber(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

inline json ToJson(const building::ScenarioReport& r) {
  json out{{"occupants", {r.occupants_a, r.occupants_b}},
           {"horizon", r.horizon},
           {"c", r.c},
           {"delta", r.delta},
           {"w2", r.w2},
           {"adjacent", r.adjacent},
           {"warning", r.warning.has_value() ? json(*r.warning) : json(nullptr)},
           {"lambda_max_ntn", r.lambda_max_ntn},
           {"lambda_min_public_term", r.lambda_min_public_term},
           {"sigma2", r.sigma2},
           {"sigma", r.sigma},
           {"verification", ToJson(r.verification)},
           {"reference_sigma", OptionalNumber(r.reference_sigma)}};
  if (r.reference_sigma.has_value()) {
    out["reference_note"] =
        "published value for this configuration; the public-state rule "
        "evaluated on the stated parameters gives the sigma above, and only "
        "the delta 0.1 / 0.2 ratio of 2 is shared";
  }
  return out;
}

}  // namespace wdp_lti::json_io

#endif  // WDP_LTI_JSON_IO_HPP_
