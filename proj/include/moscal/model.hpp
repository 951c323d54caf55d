#pragma once

// Multi-objective (mixed-)integer linear problems: representation, instance
// JSON I/O and point evaluation. All objectives are minimized.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "random.hpp"

namespace moscal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIntegralityTol = 1e-6;

enum class VarType { Continuous, Integer, Binary };
enum class Sense { LessEqual, GreaterEqual, Equal };

using ObjectiveVector = std::vector<double>;

struct LinearConstraint {
  std::vector<std::size_t> index;
  std::vector<double> value;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  /// Set on rows added by the epsilon-constraint method: the objective they bound.
  std::optional<std::size_t> epsilon_of;

  double activity(std::span<const double> point) const {
    double sum = 0.0;
    for (std::size_t t = 0; t < index.size(); ++t) sum += value[t] * point[index[t]];
    return sum;
  }
};

struct Problem {
  std::string name;
  std::size_t num_vars = 0;
  std::vector<VarType> var_types;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LinearConstraint> constraints;
  std::vector<std::vector<double>> objectives;

  std::size_t objective_count() const { return objectives.size(); }

  bool is_integer(std::size_t j) const { return var_types[j] != VarType::Continuous; }

  /// Throws ValidationError on the first broken invariant.
  void validate() const {
    if (objectives.size() < 2)
      throw ValidationError("problem needs at least 2 objectives, got " +
                            std::to_string(objectives.size()));
    if (var_types.size() != num_vars || lower.size() != num_vars || upper.size() != num_vars)
      throw ValidationError("per-variable arrays must have num_vars entries");
    for (std::size_t k = 0; k < objectives.size(); ++k)
      if (objectives[k].size() != num_vars)
        throw ValidationError("objective " + std::to_string(k + 1) + " has " +
                              std::to_string(objectives[k].size()) + " coefficients, expected " +
                              std::to_string(num_vars));
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
        throw ValidationError("variable " + std::to_string(j) + " has lb > ub");
      if (lower[j] == kInf || upper[j] == -kInf)
        throw ValidationError("variable " + std::to_string(j) + " has an empty domain");
      if (var_types[j] == VarType::Binary && (lower[j] < 0.0 || upper[j] > 1.0))
        throw ValidationError("binary variable " + std::to_string(j) + " has bounds outside [0,1]");
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      const auto& row = constraints[i];
      if (row.index.size() != row.value.size())
        throw ValidationError("constraint " + std::to_string(i) + ": idx/val length mismatch");
      std::vector<bool> seen(num_vars, false);
      for (std::size_t j : row.index) {
        if (j >= num_vars)
          throw ValidationError("constraint " + std::to_string(i) + ": index " +
                                std::to_string(j) + " out of range");
        if (seen[j])
          throw ValidationError("constraint " + std::to_string(i) + ": duplicate index " +
                                std::to_string(j));
        seen[j] = true;
      }
      if (!std::isfinite(row.rhs))
        throw ValidationError("constraint " + std::to_string(i) + ": rhs must be finite");
    }
  }
};

struct Solution {
  std::vector<double> point;
  ObjectiveVector objectives;
  bool integral = false;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += a[j] * b[j];
  return sum;
}

inline ObjectiveVector evaluate_objectives(const Problem& problem, std::span<const double> point) {
  if (point.size() != problem.num_vars)
    throw DimensionError("point has " + std::to_string(point.size()) + " entries, expected " +
                         std::to_string(problem.num_vars));
  ObjectiveVector values(problem.objective_count());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = dot(problem.objectives[k], point);
  return values;
}

inline bool is_integral(const Problem& problem, std::span<const double> point,
                        double tol = kIntegralityTol) {
  for (std::size_t j = 0; j < problem.num_vars; ++j)
    if (problem.is_integer(j) && std::abs(point[j] - std::round(point[j])) > tol) return false;
  return true;
}

/// Bounds and constraints only; integrality is not checked.
inline bool satisfies_constraints(const Problem& problem, std::span<const double> point,
                                  double tol = kFeasibilityTol) {
  if (point.size() != problem.num_vars)
    throw DimensionError("point has " + std::to_string(point.size()) + " entries, expected " +
                         std::to_string(problem.num_vars));
  for (std::size_t j = 0; j < problem.num_vars; ++j)
    if (point[j] < problem.lower[j] - tol || point[j] > problem.upper[j] + tol) return false;
  for (const auto& row : problem.constraints) {
    const double act = row.activity(point);
    switch (row.sense) {
      case Sense::LessEqual:
        if (act > row.rhs + tol) return false;
        break;
      case Sense::GreaterEqual:
        if (act < row.rhs - tol) return false;
        break;
      case Sense::Equal:
        if (std::abs(act - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

inline bool check_feasible(const Problem& problem, std::span<const double> point,
                           double tol = kFeasibilityTol) {
  return satisfies_constraints(problem, point, tol) && is_integral(problem, point, tol);
}

inline Solution make_solution(const Problem& problem, std::vector<double> point) {
  Solution s;
  s.objectives = evaluate_objectives(problem, point);
  s.integral = is_integral(problem, point);
  s.point = std::move(point);
  return s;
}

/// True when every objective takes integer values on every integer-feasible point.
inline bool has_integer_objectives(const Problem& problem) {
  for (const auto& row : problem.objectives)
    for (std::size_t j = 0; j < problem.num_vars; ++j) {
      if (row[j] == 0.0) continue;
      if (!problem.is_integer(j) || row[j] != std::round(row[j])) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Instance files

namespace detail {

inline const char* type_code(VarType t) {
  switch (t) {
    case VarType::Continuous: return "C";
    case VarType::Integer: return "I";
    case VarType::Binary: return "B";
  }
  return "C";
}

inline const char* sense_code(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::GreaterEqual: return ">=";
    case Sense::Equal: return "=";
  }
  return "=";
}

inline nlohmann::json number_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  if (v == std::round(v) && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

inline nlohmann::json number_array(std::span<const double> values) {
  auto arr = nlohmann::json::array();
  for (double v : values) arr.push_back(number_json(v));
  return arr;
}

inline double read_number(const nlohmann::json& j, std::string_view what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ParseError(std::string(what) + ": expected a number or \"inf\"/\"-inf\"");
}

inline const nlohmann::json& field(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace detail

inline Problem parse_instance(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance must be a JSON object");

  Problem p;
  try {
    p.name = detail::field(doc, "name").get<std::string>();
    const auto& nv = detail::field(doc, "num_vars");
    if (!nv.is_number_unsigned() && !(nv.is_number_integer() && nv.get<std::int64_t>() >= 0))
      throw ParseError("num_vars must be a non-negative integer");
    p.num_vars = nv.get<std::size_t>();

    for (const auto& t : detail::field(doc, "var_types")) {
      const auto code = t.get<std::string>();
      if (code == "C") p.var_types.push_back(VarType::Continuous);
      else if (code == "I") p.var_types.push_back(VarType::Integer);
      else if (code == "B") p.var_types.push_back(VarType::Binary);
      else throw ParseError("unknown var type '" + code + "'");
    }
    for (const auto& v : detail::field(doc, "lb")) p.lower.push_back(detail::read_number(v, "lb"));
    for (const auto& v : detail::field(doc, "ub")) p.upper.push_back(detail::read_number(v, "ub"));
    for (const auto& row : detail::field(doc, "objectives")) {
      if (!row.is_array()) throw ParseError("objectives must be an array of arrays");
      std::vector<double> coeffs;
      for (const auto& v : row) {
        if (!v.is_number()) throw ParseError("objective coefficients must be numbers");
        coeffs.push_back(v.get<double>());
      }
      p.objectives.push_back(std::move(coeffs));
    }
    for (const auto& c : detail::field(doc, "constraints")) {
      LinearConstraint row;
      for (const auto& i : detail::field(c, "idx")) {
        if (!i.is_number_integer() || i.get<std::int64_t>() < 0)
          throw ParseError("constraint idx entries must be non-negative integers");
        row.index.push_back(i.get<std::size_t>());
      }
      for (const auto& v : detail::field(c, "val")) {
        if (!v.is_number()) throw ParseError("constraint val entries must be numbers");
        row.value.push_back(v.get<double>());
      }
      const auto sense = detail::field(c, "sense").get<std::string>();
      if (sense == "<=") row.sense = Sense::LessEqual;
      else if (sense == ">=") row.sense = Sense::GreaterEqual;
      else if (sense == "=") row.sense = Sense::Equal;
      else throw ParseError("unknown constraint sense '" + sense + "'");
      const auto& rhs = detail::field(c, "rhs");
      if (!rhs.is_number()) throw ParseError("constraint rhs must be a number");
      row.rhs = rhs.get<double>();
      p.constraints.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed instance: ") + e.what());
  }
  p.validate();
  return p;
}

inline Problem load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open instance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

/// Canonical text form: fixed key order, one top-level field per line, one
/// objective row and one constraint per line, integral values without a
/// fractional part.
inline std::string to_instance_json(const Problem& p) {
  std::ostringstream out;
  auto types = nlohmann::json::array();
  for (auto t : p.var_types) types.push_back(detail::type_code(t));

  out << "{\n";
  out << "  \"name\": " << nlohmann::json(p.name).dump() << ",\n";
  out << "  \"num_vars\": " << p.num_vars << ",\n";
  out << "  \"var_types\": " << types.dump() << ",\n";
  out << "  \"lb\": " << detail::number_array(p.lower).dump() << ",\n";
  out << "  \"ub\": " << detail::number_array(p.upper).dump() << ",\n";
  out << "  \"objectives\": [";
  for (std::size_t k = 0; k < p.objectives.size(); ++k)
    out << (k ? ",\n    " : "\n    ") << detail::number_array(p.objectives[k]).dump();
  out << (p.objectives.empty() ? "],\n" : "\n  ],\n");
  out << "  \"constraints\": [";
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& row = p.constraints[i];
    nlohmann::ordered_json c;
    c["idx"] = row.index;
    c["val"] = detail::number_array(row.value);
    c["sense"] = detail::sense_code(row.sense);
    c["rhs"] = detail::number_json(row.rhs);
    out << (i ? ",\n    " : "\n    ") << c.dump();
  }
  out << (p.constraints.empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

inline void save_instance(const Problem& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write instance file '" + path + "'");
  out << to_instance_json(p);
}

inline std::uint64_t problem_digest(const Problem& p) {
  return Fnv1a().add(to_instance_json(p)).digest();
}

}  // namespace moscal
