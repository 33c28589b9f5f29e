// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

#include "parawarm/errors.hpp"

namespace parawarm {

using Eigen::Index;

enum class Sense { Eq, Le };

inline std::string to_string(Sense s) { return s == Sense::Eq ? "eq" : "le"; }

/// The parametric problem P(lambda): min c'x s.t. (A + lambda*D)x (= or <=) b,
/// x >= 0. Immutable after construction.
struct ParametricLP {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::MatrixXd D;
  Eigen::VectorXd b;
  std::vector<Sense> senses;
  bool standard_form = false;

  Index m() const { return A.rows(); }
  Index n() const { return A.cols(); }
};

/// Checks the ParametricLP invariants, throwing ParseError with the offending
/// field on violation.
inline void validate(const ParametricLP& lp) {
  const Index m = lp.A.rows(), n = lp.A.cols();
  if (m < 1) throw ParseError("A: must have at least one row");
  if (lp.D.rows() != m || lp.D.cols() != n)
    throw ParseError("D: dimensions " + std::to_string(lp.D.rows()) + "x" +
                     std::to_string(lp.D.cols()) + " do not match A (" +
                     std::to_string(m) + "x" + std::to_string(n) + ")");
  if (lp.c.size() != n)
    throw ParseError("c: length " + std::to_string(lp.c.size()) +
                     ", expected " + std::to_string(n));
  if (lp.b.size() != m)
    throw ParseError("b: length " + std::to_string(lp.b.size()) +
                     ", expected " + std::to_string(m));
  if (static_cast<Index>(lp.senses.size()) != m)
    throw ParseError("senses: length " + std::to_string(lp.senses.size()) +
                     ", expected " + std::to_string(m));
  if (lp.standard_form) {
    for (Index i = 0; i < m; ++i)
      if (lp.senses[i] != Sense::Eq)
        throw ParseError("senses: row " + std::to_string(i) +
                         " is not eq in a standard-form problem");
    if (n < m)
      throw ParseError("standard-form problem has n=" + std::to_string(n) +
                       " < m=" + std::to_string(m) +
                       "; no basis is selectable");
  }
}

/// Appends one slack column (A-coefficient 1, D-coefficient 0, cost 0) per
/// "le" row and marks the result standard form. Idempotent.
inline ParametricLP to_standard_form(const ParametricLP& lp) {
  std::vector<Index> le_rows;
  for (Index i = 0; i < lp.m(); ++i)
    if (lp.senses[i] == Sense::Le) le_rows.push_back(i);
  if (le_rows.empty() && lp.standard_form) return lp;

  const Index m = lp.m(), n = lp.n();
  const Index k = static_cast<Index>(le_rows.size());
  ParametricLP out;
  out.A = Eigen::MatrixXd::Zero(m, n + k);
  out.D = Eigen::MatrixXd::Zero(m, n + k);
  out.A.leftCols(n) = lp.A;
  out.D.leftCols(n) = lp.D;
  for (Index j = 0; j < k; ++j) out.A(le_rows[j], n + j) = 1.0;
  out.c = Eigen::VectorXd::Zero(n + k);
  out.c.head(n) = lp.c;
  out.b = lp.b;
  out.senses.assign(m, Sense::Eq);
  out.standard_form = true;
  validate(out);
  return out;
}

/// Ordered basic column indices. Order is significant: it fixes the row
/// order of x_B.
struct Basis {
  std::vector<Index> indices;

  bool operator==(const Basis& other) const = default;

  /// True when both bases select the same column set, ignoring order.
  bool same_columns(const Basis& other) const {
    if (indices.size() != other.indices.size()) return false;
    auto a = indices, b = other.indices;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }
};

/// Basic/nonbasic blocks of (c, A, D) under a basis, in basis order; the
/// nonbasic blocks follow ascending column order.
struct BasisPartition {
  Eigen::MatrixXd A_B, D_B;  // m x m
  Eigen::MatrixXd A_N, D_N;  // m x (n-m)
  Eigen::VectorXd c_B, c_N;
  Basis basis;
  std::vector<Index> nonbasic;
};

inline BasisPartition partition(const ParametricLP& lp, const Basis& basis) {
  if (!lp.standard_form)
    throw PreconditionError("partition: problem is not in standard form");
  const Index m = lp.m(), n = lp.n();
  if (static_cast<Index>(basis.indices.size()) != m)
    throw Error("basis: has " + std::to_string(basis.indices.size()) +
                " indices, expected " + std::to_string(m));
  std::unordered_set<Index> seen;
  for (Index j : basis.indices) {
    if (j < 0 || j >= n)
      throw Error("basis: index " + std::to_string(j) + " out of range [0, " +
                  std::to_string(n) + ")");
    if (!seen.insert(j).second)
      throw Error("basis: duplicate index " + std::to_string(j));
  }

  BasisPartition p;
  p.basis = basis;
  p.A_B.resize(m, m);
  p.D_B.resize(m, m);
  p.c_B.resize(m);
  for (Index k = 0; k < m; ++k) {
    const Index j = basis.indices[k];
    p.A_B.col(k) = lp.A.col(j);
    p.D_B.col(k) = lp.D.col(j);
    p.c_B(k) = lp.c(j);
  }
  p.nonbasic.reserve(n - m);
  for (Index j = 0; j < n; ++j)
    if (!seen.count(j)) p.nonbasic.push_back(j);
  p.A_N.resize(m, n - m);
  p.D_N.resize(m, n - m);
  p.c_N.resize(n - m);
  for (Index k = 0; k < n - m; ++k) {
    const Index j = p.nonbasic[k];
    p.A_N.col(k) = lp.A.col(j);
    p.D_N.col(k) = lp.D.col(j);
    p.c_N(k) = lp.c(j);
  }
  return p;
}

}  // namespace parawarm
