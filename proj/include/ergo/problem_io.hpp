#pragma once

#include "json.hpp"

#include "ergo/problem.hpp"

namespace ergo {

// Coefficient layout: {"const": c, "poly": [[k, c], ...], "bumps": [[A, m, s], ...]}.
// Matrices are row-major nested arrays.
nlohmann::json to_json(const CoefficientModel1D& c);
CoefficientModel1D coefficient_from_json(const nlohmann::json& j, const std::string& field);

nlohmann::json to_json(const ProblemSpec& spec);
/// Throws ConfigError with the offending key in the message.
ProblemSpec problem_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AssumptionReport& rep);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);

}  // namespace ergo
