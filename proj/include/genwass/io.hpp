#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "genwass/duality.hpp"
#include "genwass/error.hpp"
#include "genwass/measures.hpp"
#include "genwass/numeric.hpp"
#include "genwass/solver_w1.hpp"
#include "genwass/spaces.hpp"
#include "genwass/transport.hpp"

// JSON problem files and reports.
//
// Problem layout:
//   {"space": {"points": [...], "d": [[...]]}, "group": [[perm], ...],
//    "mu": {"x": 1, "y": "3/2"}, "nu": {...}, "eta": {...},
//    "params": {"a": 1, "b": 1, "p": 1}, "mode": "exact" | "float", "seed": 7}
// Numbers may be JSON numbers or strings such as "3/2" or "0.25".
namespace genwass::io {

using json = nlohmann::json;

enum class Mode { Exact, Float };

inline std::string_view to_string(Mode m) { return m == Mode::Exact ? "exact" : "float"; }

inline Mode parse_mode(std::string_view text) {
  if (text == "exact") return Mode::Exact;
  if (text == "float") return Mode::Float;
  throw Error(ErrorCode::ParseError, "field 'mode': expected \"exact\" or \"float\", got \"" + std::string(text) + "\"");
}

namespace detail {

inline std::string field_error(std::string_view field, std::string_view message) {
  return "field '" + std::string(field) + "': " + std::string(message);
}

inline std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

// Keys whose numbers are exponents, indices or seeds rather than data.
inline bool is_structural_key(std::string_view key) {
  return key == "p" || key == "seed" || key == "group" || key == "target_group" || key == "map" ||
         key == "elements";
}

inline bool has_float_number(const json& node) {
  if (node.is_number_float()) {
    const double x = node.get<double>();
    return !is_integer(x);
  }
  if (node.is_array()) {
    for (const auto& child : node)
      if (has_float_number(child)) return true;
  }
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it)
      if (!is_structural_key(it.key()) && has_float_number(it.value())) return true;
  }
  return false;
}

}  // namespace detail

/// Parses JSON text; syntax errors become ParseError carrying "origin:line:col".
inline json parse_json_text(std::string_view text, std::string_view origin = "<input>") {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorCode::ParseError,
                std::string(origin) + ":" + detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + what);
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

/// Explicit "mode" wins; otherwise exact unless some datum is a non-integer JSON number.
inline Mode detect_mode(const json& doc) {
  if (doc.is_object() && doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw Error(ErrorCode::ParseError, detail::field_error("mode", "expected a string"));
    return parse_mode(doc["mode"].get<std::string>());
  }
  return detail::has_float_number(doc) ? Mode::Float : Mode::Exact;
}

template <Scalar T>
T scalar_from_json(const json& v, std::string_view field) {
  try {
    if (v.is_number_integer()) {
      if (v.is_number_unsigned()) return T(static_cast<long long>(v.get<std::uint64_t>()));
      return T(v.get<long long>());
    }
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if constexpr (is_exact_v<T>) {
        return rational_from_shortest_decimal(x);
      } else {
        return x;
      }
    }
    if (v.is_string()) return parse_scalar<T>(v.get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, detail::field_error(field, e.what()));
  }
  throw Error(ErrorCode::ParseError, detail::field_error(field, "expected a number or a \"p/q\" string"));
}

inline json scalar_to_json(double x) { return x; }

/// Integers as JSON integers when they fit, everything else as "p/q".
inline json scalar_to_json(const Rational& x) {
  if (is_integer(x)) {
    const BigInt num = numerator(x);
    if (num >= BigInt(INT64_MIN) && num <= BigInt(INT64_MAX)) return num.convert_to<std::int64_t>();
  }
  return format_scalar(x);
}

template <Scalar T>
json vector_to_json(const std::vector<T>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(scalar_to_json(x));
  return out;
}

template <Scalar T>
json matrix_to_json(const DenseMatrix<T>& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

inline const json& require(const json& obj, std::string_view key, std::string_view field) {
  if (!obj.is_object() || !obj.contains(key))
    throw Error(ErrorCode::ParseError, detail::field_error(field, "missing key '" + std::string(key) + "'"));
  return obj[std::string(key)];
}

template <Scalar T>
FiniteMetricSpace<T> parse_space(const json& node, std::string_view field = "space") {
  const json& points = require(node, "points", field);
  const json& d = require(node, "d", field);
  const std::string f(field);
  if (!points.is_array()) throw Error(ErrorCode::ParseError, detail::field_error(f + ".points", "expected an array"));
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.is_string()) labels.push_back(p.get<std::string>());
    else if (p.is_number_integer()) labels.push_back(std::to_string(p.get<long long>()));
    else throw Error(ErrorCode::ParseError, detail::field_error(f + ".points[" + std::to_string(i) + "]", "expected a label"));
  }
  if (!d.is_array()) throw Error(ErrorCode::ParseError, detail::field_error(f + ".d", "expected an array of rows"));
  std::vector<std::vector<T>> matrix;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::string row_field = f + ".d[" + std::to_string(i) + "]";
    if (!d[i].is_array()) throw Error(ErrorCode::ParseError, detail::field_error(row_field, "expected an array"));
    std::vector<T> row;
    for (std::size_t j = 0; j < d[i].size(); ++j)
      row.push_back(scalar_from_json<T>(d[i][j], row_field + "[" + std::to_string(j) + "]"));
    matrix.push_back(std::move(row));
  }
  return validate_metric<T>(std::move(labels), matrix);
}

/// Accepts [[perm], ...] (labels g0, g1, ...) or [{"label": "r", "perm": [...]}, ...].
template <Scalar T>
FiniteGroupAction<T> parse_group(const FiniteMetricSpace<T>& space, const json& node, std::string_view field = "group") {
  const std::string f(field);
  if (!node.is_array()) throw Error(ErrorCode::ParseError, detail::field_error(f, "expected an array of permutations"));
  std::vector<GroupElement> elements;
  for (std::size_t k = 0; k < node.size(); ++k) {
    const std::string ef = f + "[" + std::to_string(k) + "]";
    const json* perm = &node[k];
    std::string label = "g" + std::to_string(k);
    if (node[k].is_object()) {
      perm = &require(node[k], "perm", ef);
      if (node[k].contains("label")) label = node[k]["label"].get<std::string>();
    }
    if (!perm->is_array()) throw Error(ErrorCode::ParseError, detail::field_error(ef, "expected an index array"));
    Permutation p;
    for (const auto& x : *perm) {
      if (!x.is_number_integer() || x.get<long long>() < 0)
        throw Error(ErrorCode::ParseError, detail::field_error(ef, "entries must be nonnegative integers"));
      p.push_back(static_cast<std::size_t>(x.get<long long>()));
    }
    elements.push_back({std::move(label), std::move(p)});
  }
  return validate_action(space, std::move(elements));
}

/// {"label": weight, ...} with omitted points at zero, or a plain weight array.
template <Scalar T>
DiscreteMeasure<T> parse_measure(const FiniteMetricSpace<T>& space, const json& node, std::string_view field) {
  const std::string f(field);
  std::vector<T> w(space.size(), T(0));
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      auto idx = space.index_of(it.key());
      if (!idx) throw Error(ErrorCode::ParseError, detail::field_error(f + "." + it.key(), "unknown point"));
      w[*idx] = scalar_from_json<T>(it.value(), f + "." + it.key());
    }
  } else if (node.is_array()) {
    if (node.size() != space.size())
      throw Error(ErrorCode::ParseError, detail::field_error(f, "expected " + std::to_string(space.size()) + " weights"));
    for (std::size_t i = 0; i < node.size(); ++i) w[i] = scalar_from_json<T>(node[i], f + "[" + std::to_string(i) + "]");
  } else {
    throw Error(ErrorCode::ParseError, detail::field_error(f, "expected an object of point weights"));
  }
  return DiscreteMeasure<T>(space, std::move(w));
}

/// Command-line overrides, kept as text so exact mode can read "1/2".
struct ParamOverrides {
  std::optional<std::string> a;
  std::optional<std::string> b;
  std::optional<std::string> p;
};

template <Scalar T>
EntropyParams<T> parse_params(const json& doc, const ParamOverrides& overrides = {}) {
  EntropyParams<T> params;
  if (doc.is_object() && doc.contains("params")) {
    const json& node = doc["params"];
    if (!node.is_object()) throw Error(ErrorCode::ParseError, detail::field_error("params", "expected an object"));
    if (node.contains("a")) params.a = scalar_from_json<T>(node["a"], "params.a");
    if (node.contains("b")) params.b = scalar_from_json<T>(node["b"], "params.b");
    if (node.contains("p")) params.p = to_double(scalar_from_json<Rational>(node["p"], "params.p"));
  }
  if (overrides.a) params.a = parse_scalar<T>(*overrides.a);
  if (overrides.b) params.b = parse_scalar<T>(*overrides.b);
  if (overrides.p) params.p = to_double(parse_scalar<Rational>(*overrides.p));
  params.validate();
  return params;
}

template <Scalar T>
struct Problem {
  FiniteMetricSpace<T> space;
  DiscreteMeasure<T> mu;
  DiscreteMeasure<T> nu;
  EntropyParams<T> params;
  std::optional<FiniteGroupAction<T>> group;
  std::optional<DiscreteMeasure<T>> eta;
  std::optional<std::uint64_t> seed;
};

template <Scalar T>
Problem<T> parse_problem(const json& doc, const ParamOverrides& overrides = {}) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "problem file must hold a JSON object");
  auto space = parse_space<T>(require(doc, "space", "<root>"));
  auto mu = doc.contains("mu") ? parse_measure(space, doc["mu"], "mu") : DiscreteMeasure<T>::zero(space);
  auto nu = doc.contains("nu") ? parse_measure(space, doc["nu"], "nu") : DiscreteMeasure<T>::zero(space);
  Problem<T> out{space, std::move(mu), std::move(nu), parse_params<T>(doc, overrides), std::nullopt, std::nullopt,
                 std::nullopt};
  if (doc.contains("group")) out.group = parse_group(space, doc["group"]);
  if (doc.contains("eta")) out.eta = parse_measure(space, doc["eta"], "eta");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw Error(ErrorCode::ParseError, detail::field_error("seed", "expected a nonnegative integer"));
    out.seed = doc["seed"].get<std::uint64_t>();
  }
  return out;
}

template <Scalar T>
std::vector<T> parse_vector(const json& node, std::size_t n, std::string_view field) {
  const std::string f(field);
  if (!node.is_array() || node.size() != n)
    throw Error(ErrorCode::ParseError, detail::field_error(f, "expected an array of " + std::to_string(n) + " numbers"));
  std::vector<T> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(scalar_from_json<T>(node[i], f + "[" + std::to_string(i) + "]"));
  return out;
}

template <Scalar T>
DenseMatrix<T> parse_matrix(const json& node, std::size_t n, std::string_view field) {
  const std::string f(field);
  if (!node.is_array() || node.size() != n)
    throw Error(ErrorCode::ParseError, detail::field_error(f, "expected " + std::to_string(n) + " rows"));
  DenseMatrix<T> out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = parse_vector<T>(node[i], n, f + "[" + std::to_string(i) + "]");
    for (std::size_t j = 0; j < n; ++j) out(i, j) = row[j];
  }
  return out;
}

template <Scalar T>
json curve_to_json(const ParametricCurve<T>& curve) {
  json out = json::array();
  for (const auto& pt : curve.points) out.push_back(json::array({scalar_to_json(pt.mass), scalar_to_json(pt.cost)}));
  return out;
}

inline json certificate_to_json(const OptimalityCertificate& cert) {
  static const char* names[4] = {"i", "ii", "iii", "iv"};
  json conditions = json::object();
  for (int k = 0; k < 4; ++k) conditions[names[k]] = cert.conditions[static_cast<std::size_t>(k)];
  json violations = json::array();
  for (const auto& v : cert.violations) {
    json item = {{"condition", names[v.condition - 1]}, {"detail", v.detail}};
    if (v.side) item["side"] = v.side;
    if (v.condition == 2) item["pair"] = json::array({v.i, v.j});
    else if (v.condition != 1) item["point"] = v.i;
    violations.push_back(std::move(item));
  }
  json a1 = cert.A1, a2 = cert.A2;
  return {{"conditions", conditions}, {"violations", violations}, {"A1", a1}, {"A2", a2}, {"passed", cert.passed()}};
}

/// value, m, destroyed/created masses and optionally plan, curve, potentials and gap.
template <Scalar T>
json report_to_json(const SolveReport<T>& r, bool with_plan, bool with_dual) {
  json out = {{"value", scalar_to_json(r.value)},
              {"m", scalar_to_json(r.transported_mass)},
              {"destroyed", scalar_to_json(r.destroyed_mass)},
              {"created", scalar_to_json(r.created_mass)}};
  if (with_plan) {
    out["plan"] = matrix_to_json(r.plan.gamma);
    if (r.curve) out["curve"] = curve_to_json(*r.curve);
  }
  if (with_dual) {
    if (r.potentials) {
      out["phi1"] = vector_to_json(r.potentials->phi1);
      out["phi2"] = vector_to_json(r.potentials->phi2);
    } else {
      out["phi1"] = nullptr;
      out["phi2"] = nullptr;
    }
    out["gap"] = r.duality_gap ? scalar_to_json(*r.duality_gap) : json(nullptr);
    out["certificate"] = r.certificate ? certificate_to_json(*r.certificate) : json("not-applicable");
  }
  return out;
}

}  // namespace genwass::io
