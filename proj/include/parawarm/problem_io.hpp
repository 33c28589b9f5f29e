// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parawarm/problem.hpp"

namespace parawarm {

/// Lambda values requested by a problem file or on the command line: either
/// an explicit list or an inclusive from:to:count range.
struct LambdaSpec {
  std::vector<double> values;

  static LambdaSpec range(double from, double to, long count) {
    if (count < 0) throw ParseError("lambda: count must be >= 0");
    LambdaSpec s;
    s.values.reserve(static_cast<size_t>(count));
    for (long i = 0; i < count; ++i) {
      const double t =
          count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      s.values.push_back(from + t * (to - from));
    }
    return s;
  }
};

namespace detail {

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j,
                                        const std::string& key) {
  if (!j.is_array()) throw ParseError(key + ": expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ParseError(key + ": entry " + std::to_string(i) + " is not a number");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j,
                                        const std::string& key) {
  if (!j.is_array() || j.empty())
    throw ParseError(key + ": expected a non-empty array of rows");
  const size_t rows = j.size();
  size_t cols = 0;
  Eigen::MatrixXd m;
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array())
      throw ParseError(key + ": row " + std::to_string(i) + " is not an array");
    if (i == 0) {
      cols = j[i].size();
      m.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    } else if (j[i].size() != cols) {
      throw ParseError(key + ": row " + std::to_string(i) + " has " +
                       std::to_string(j[i].size()) + " entries, expected " +
                       std::to_string(cols));
    }
    for (size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number())
        throw ParseError(key + ": entry (" + std::to_string(i) + "," +
                         std::to_string(k) + ") is not a number");
      m(static_cast<Index>(i), static_cast<Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

inline LambdaSpec lambda_from_json(const nlohmann::json& j) {
  if (j.contains("values")) {
    LambdaSpec s;
    const auto& v = j.at("values");
    if (!v.is_array()) throw ParseError("lambda.values: expected an array");
    for (const auto& x : v) {
      if (!x.is_number()) throw ParseError("lambda.values: entry is not a number");
      s.values.push_back(x.get<double>());
    }
    return s;
  }
  if (j.contains("from") || j.contains("to") || j.contains("count")) {
    for (const char* k : {"from", "to", "count"})
      if (!j.contains(k))
        throw ParseError(std::string("lambda: missing key \"") + k + "\"");
    return LambdaSpec::range(j.at("from").get<double>(), j.at("to").get<double>(),
                             j.at("count").get<long>());
  }
  throw ParseError("lambda: expected {\"values\": [...]} or {\"from\",\"to\",\"count\"}");
}

}  // namespace detail

/// A parsed problem document: the LP plus the optional lambda request.
struct ParsedProblem {
  ParametricLP lp;
  std::optional<LambdaSpec> lambda;
};

inline ParsedProblem parse_document(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("document: expected a JSON object");
  for (const char* k : {"c", "A", "D", "b", "senses"})
    if (!j.contains(k))
      throw ParseError(std::string("document: missing key \"") + k + "\"");

  ParsedProblem doc;
  doc.lp.c = detail::vector_from_json(j.at("c"), "c");
  doc.lp.A = detail::matrix_from_json(j.at("A"), "A");
  doc.lp.D = detail::matrix_from_json(j.at("D"), "D");
  doc.lp.b = detail::vector_from_json(j.at("b"), "b");
  const auto& senses = j.at("senses");
  if (!senses.is_array()) throw ParseError("senses: expected an array");
  for (size_t i = 0; i < senses.size(); ++i) {
    if (!senses[i].is_string())
      throw ParseError("senses: row " + std::to_string(i) + " is not a string");
    const std::string s = senses[i].get<std::string>();
    if (s == "eq")
      doc.lp.senses.push_back(Sense::Eq);
    else if (s == "le")
      doc.lp.senses.push_back(Sense::Le);
    else
      throw ParseError("senses: row " + std::to_string(i) +
                       ": unknown sense \"" + s + "\" (expected \"eq\" or \"le\")");
  }
  bool all_eq = true;
  for (Sense s : doc.lp.senses) all_eq &= (s == Sense::Eq);
  doc.lp.standard_form = all_eq;
  validate(doc.lp);
  if (j.contains("lambda")) doc.lambda = detail::lambda_from_json(j.at("lambda"));
  return doc;
}

/// Parses a problem document, transcribing values exactly.
inline ParametricLP parse_problem(const std::string& text) {
  return parse_document(text).lp;
}

/// Serializes a problem to the JSON interchange schema. Round-trips exactly:
/// parse_problem(serialize_problem(lp)) reproduces lp bitwise.
inline std::string serialize_problem(const ParametricLP& lp) {
  nlohmann::json j;
  j["c"] = std::vector<double>(lp.c.data(), lp.c.data() + lp.c.size());
  auto rows = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> out(m.rows());
    for (Index i = 0; i < m.rows(); ++i) {
      out[i].resize(m.cols());
      for (Index k = 0; k < m.cols(); ++k) out[i][k] = m(i, k);
    }
    return out;
  };
  j["A"] = rows(lp.A);
  j["D"] = rows(lp.D);
  j["b"] = std::vector<double>(lp.b.data(), lp.b.data() + lp.b.size());
  std::vector<std::string> senses;
  for (Sense s : lp.senses) senses.push_back(to_string(s));
  j["senses"] = senses;
  return j.dump();
}

}  // namespace parawarm
