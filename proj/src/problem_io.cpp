#include "ergo/problem_io.hpp"

#include "ergo/errors.hpp"

namespace ergo {

using nlohmann::json;

json to_json(const CoefficientModel1D& c) {
  json poly = json::array();
  for (const auto& t : c.poly) poly.push_back({t.degree, t.coeff});
  json bumps = json::array();
  for (const auto& b : c.bumps) bumps.push_back({b.amplitude, b.center, b.width});
  return json{{"const", c.constant}, {"poly", poly}, {"bumps", bumps}};
}

CoefficientModel1D coefficient_from_json(const json& j, const std::string& field) {
  CoefficientModel1D c;
  try {
    if (j.is_number()) {
      c.constant = j.get<double>();
      return c;
    }
    if (!j.is_object()) throw Error(ErrorKind::ConfigError, field + ": expected an object or a number");
    c.constant = j.value("const", 0.0);
    if (j.contains("poly")) {
      for (const auto& t : j.at("poly")) {
        if (!t.is_array() || t.size() != 2) throw Error(ErrorKind::ConfigError, field + ".poly: expected [k, c] pairs");
        const double k = t[0].get<double>();
        if (k != static_cast<int>(k)) throw Error(ErrorKind::ConfigError, field + ".poly: degree must be an integer");
        c.poly.push_back({static_cast<int>(k), t[1].get<double>()});
      }
    }
    if (j.contains("bumps")) {
      for (const auto& b : j.at("bumps")) {
        if (!b.is_array() || b.size() != 3) {
          throw Error(ErrorKind::ConfigError, field + ".bumps: expected [A, m, s] triples");
        }
        c.bumps.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>()});
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, field + ": " + e.what());
  }
  return c;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

namespace {

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::ConfigError, field + ": expected a non-empty row array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw Error(ErrorKind::ConfigError, field + ": ragged rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::ConfigError, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

json to_json(const ProblemSpec& spec) {
  json j;
  j["name"] = spec.name;
  if (spec.is_pde()) {
    const auto& p = spec.pde();
    j["kind"] = "Pde1D";
    j["a"] = to_json(p.a);
    j["ahat"] = to_json(p.ahat);
    j["b"] = to_json(p.b);
    j["v0"] = to_json(p.v0);
    j["vbar"] = to_json(p.vbar);
    j["w0"] = to_json(p.w0);
    j["domain_radius"] = p.domain_radius;
  } else {
    const auto& q = spec.leqg();
    j["kind"] = "LeqgNd";
    j["D"] = matrix_to_json(q.D);
    j["M"] = matrix_to_json(q.M);
    j["a"] = matrix_to_json(q.a);
    j["ahat"] = matrix_to_json(q.ahat);
    j["v"] = vector_to_json(q.v);
  }
  return j;
}

ProblemSpec problem_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "problem: expected an object");
  ProblemSpec spec;
  try {
    spec.name = j.value("name", std::string("custom"));
    const std::string kind = require(j, "kind").get<std::string>();
    if (kind == "Pde1D") {
      Pde1D p;
      p.a = coefficient_from_json(require(j, "a"), "a");
      p.ahat = coefficient_from_json(require(j, "ahat"), "ahat");
      p.b = coefficient_from_json(require(j, "b"), "b");
      p.v0 = coefficient_from_json(require(j, "v0"), "v0");
      if (j.contains("vbar")) p.vbar = coefficient_from_json(j.at("vbar"), "vbar");
      p.w0 = j.contains("w0") ? coefficient_from_json(j.at("w0"), "w0") : default_supersolution(p.b, p.v0);
      p.domain_radius = j.value("domain_radius", 8.0);
      spec.data = p;
    } else if (kind == "LeqgNd") {
      LeqgNd q;
      q.D = matrix_from_json(require(j, "D"), "D");
      q.M = matrix_from_json(require(j, "M"), "M");
      q.a = matrix_from_json(require(j, "a"), "a");
      q.ahat = matrix_from_json(require(j, "ahat"), "ahat");
      const json& v = require(j, "v");
      if (!v.is_array()) throw Error(ErrorKind::ConfigError, "v: expected an array");
      q.v.resize(static_cast<Eigen::Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) q.v(static_cast<Eigen::Index>(i)) = v[i].get<double>();
      spec.data = q;
    } else {
      throw Error(ErrorKind::ConfigError, "kind: expected \"Pde1D\" or \"LeqgNd\", got \"" + kind + "\"");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("problem: ") + e.what());
  }
  check_structure(spec);
  return spec;
}

json to_json(const AssumptionReport& rep) {
  return json{{"nu1", rep.nu1},
              {"nu2", rep.nu2},
              {"mu1", rep.mu1},
              {"mu2", rep.mu2},
              {"c_low", rep.c_low},
              {"c_high", rep.c_high},
              {"window_radius", rep.window_radius},
              {"annulus_outer_radii", rep.annulus_outer_radii},
              {"u0_annulus_min", rep.u0_annulus_min},
              {"passed", {{"A1", rep.a1_passed}, {"A2", rep.a2_passed}, {"A3'", rep.a3_passed}}},
              {"a3_note", rep.a3_note}};
}

}  // namespace ergo
