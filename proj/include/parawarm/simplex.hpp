// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

#include "parawarm/errors.hpp"
#include "parawarm/problem.hpp"
#include "parawarm/tolerances.hpp"

namespace parawarm {

enum class SolveStatus { Optimal, Infeasible, Unbounded };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct SolveResult {
  SolveStatus status;
  std::optional<Eigen::VectorXd> x;
  std::optional<double> objective;
  std::optional<Basis> basis;
  int iterations = 0;
};

/// Returns the optimal basis of a solve. Throws on non-optimal results.
inline Basis optimal_basis(const SolveResult& result) {
  if (result.status != SolveStatus::Optimal)
    throw PreconditionError("optimal_basis: result status is " +
                            to_string(result.status));
  return *result.basis;
}

namespace detail {

// One revised-simplex phase over the working matrix W (original columns
// first, then artificials). Factorizes the basis from scratch every
// iteration; Bland's rule kicks in after a degeneracy streak.
struct SimplexPhase {
  const Eigen::MatrixXd& W;
  const Eigen::VectorXd& rhs;
  const Eigen::VectorXd& cost;
  Index n_enterable;  // columns allowed to enter (excludes artificials)
  const Tolerances& tol;

  std::vector<Index>& basis;
  Eigen::VectorXd x_B;
  int iterations = 0;

  // Returns false on unboundedness.
  bool run() {
    const Index m = W.rows();
    const double piv_tol = 1e-9;
    const Index max_iter = 1000 + 200 * m;
    std::vector<char> in_basis(static_cast<size_t>(W.cols()), 0);
    for (Index j : basis) in_basis[static_cast<size_t>(j)] = 1;

    int degenerate_streak = 0;
    bool bland = false;
    Eigen::MatrixXd W_B(m, m);
    Eigen::VectorXd c_B(m);
    for (;;) {
      if (++iterations > max_iter)
        throw NumericalError("simplex: iteration limit exceeded");
      for (Index k = 0; k < m; ++k) {
        W_B.col(k) = W.col(basis[static_cast<size_t>(k)]);
        c_B(k) = cost(basis[static_cast<size_t>(k)]);
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(W_B);
      if (lu.rcond() < 1e-14)
        throw NumericalError("simplex: singular basis refactorization");
      x_B = lu.solve(rhs);
      const Eigen::VectorXd y = lu.transpose().solve(c_B);

      // Pricing. Dantzig by default, Bland while a degeneracy streak lasts.
      Index entering = -1;
      double best = -tol.opt;
      for (Index j = 0; j < n_enterable; ++j) {
        if (in_basis[static_cast<size_t>(j)]) continue;
        const double r = cost(j) - y.dot(W.col(j));
        if (r < -tol.opt) {
          if (bland) {
            entering = j;
            break;
          }
          if (r < best) {
            best = r;
            entering = j;
          }
        }
      }
      if (entering < 0) return true;  // phase optimal

      const Eigen::VectorXd d = lu.solve(W.col(entering));
      Index leaving = -1;
      double min_ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m; ++i) {
        if (d(i) > piv_tol) {
          const double ratio = x_B(i) / d(i);
          // Ties broken by lowest basic column index.
          if (ratio < min_ratio - 1e-12 ||
              (ratio < min_ratio + 1e-12 && leaving >= 0 &&
               basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leaving)])) {
            min_ratio = ratio;
            leaving = i;
          }
        }
      }
      if (leaving < 0) return false;  // unbounded direction

      if (min_ratio < 1e-12) {
        if (++degenerate_streak > 20) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }
      in_basis[static_cast<size_t>(basis[static_cast<size_t>(leaving)])] = 0;
      in_basis[static_cast<size_t>(entering)] = 1;
      basis[static_cast<size_t>(leaving)] = entering;
    }
  }
};

}  // namespace detail

/// Two-phase dense revised simplex on min c'x s.t. (A + lambda*D)x = b,
/// x >= 0. An optional starting basis is tried as a phase-2 warm start and
/// silently discarded if it is singular or infeasible at this lambda.
inline SolveResult solve_lp(const ParametricLP& lp, double lambda,
                            const Tolerances& tol = {},
                            const std::optional<Basis>& start = {}) {
  if (!lp.standard_form)
    throw PreconditionError("solve_lp: problem is not in standard form");
  const Index m = lp.m(), n = lp.n();

  // Working system with b >= 0 and one artificial column per row.
  Eigen::MatrixXd W(m, n + m);
  W.leftCols(n) = lp.A + lambda * lp.D;
  W.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd rhs = lp.b;
  for (Index i = 0; i < m; ++i)
    if (rhs(i) < 0) {
      rhs(i) = -rhs(i);
      W.row(i).head(n) = -W.row(i).head(n);
    }

  const double b_scale = 1.0 + lp.b.lpNorm<Eigen::Infinity>();
  std::vector<Index> basis;
  int iterations = 0;
  bool warm = false;

  if (start) {
    // Accept the starting basis if it is nonsingular and feasible here.
    try {
      Eigen::MatrixXd W_B(m, m);
      for (Index k = 0; k < m; ++k) {
        const Index j = start->indices[static_cast<size_t>(k)];
        if (j < 0 || j >= n) throw Error("start basis index out of range");
        W_B.col(k) = W.col(j);
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(W_B);
      if (lu.rcond() >= 1e-14 &&
          (lu.solve(rhs).array() >= -tol.feas * b_scale).all()) {
        basis = start->indices;
        warm = true;
      }
    } catch (const Error&) {
    }
  }

  if (!warm) {
    // Phase 1: minimize the sum of artificials.
    basis.resize(static_cast<size_t>(m));
    for (Index i = 0; i < m; ++i) basis[static_cast<size_t>(i)] = n + i;
    Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n + m);
    cost1.tail(m).setOnes();
    detail::SimplexPhase phase1{W, rhs, cost1, n, tol, basis};
    phase1.run();  // bounded below by zero
    iterations += phase1.iterations;
    double infeas = 0.0;
    for (Index k = 0; k < m; ++k)
      if (basis[static_cast<size_t>(k)] >= n) infeas += phase1.x_B(k);
    if (infeas > 1e-7 * b_scale) return {SolveStatus::Infeasible, {}, {}, {}, iterations};

    // Drive leftover artificials out of the basis with degenerate pivots.
    for (Index k = 0; k < m; ++k) {
      if (basis[static_cast<size_t>(k)] < n) continue;
      Eigen::MatrixXd W_B(m, m);
      for (Index t = 0; t < m; ++t) W_B.col(t) = W.col(basis[static_cast<size_t>(t)]);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(W_B);
      bool replaced = false;
      for (Index j = 0; j < n && !replaced; ++j) {
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
        const Eigen::VectorXd d = lu.solve(W.col(j));
        if (std::abs(d(k)) > 1e-7) {
          basis[static_cast<size_t>(k)] = j;
          replaced = true;
        }
      }
      if (!replaced)
        throw NumericalError("simplex: linearly dependent rows (artificial stuck in basis)");
    }
  }

  // Phase 2 on the original costs.
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(n + m);
  cost2.head(n) = lp.c;
  detail::SimplexPhase phase2{W, rhs, cost2, n, tol, basis};
  const bool bounded = phase2.run();
  iterations += phase2.iterations;
  if (!bounded) return {SolveStatus::Unbounded, {}, {}, {}, iterations};

  SolveResult res;
  res.status = SolveStatus::Optimal;
  res.iterations = iterations;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Index k = 0; k < m; ++k) {
    const Index j = basis[static_cast<size_t>(k)];
    if (j >= n) throw NumericalError("simplex: artificial variable left basic");
    x(j) = phase2.x_B(k);
  }
  res.x = x;
  res.objective = lp.c.dot(x);
  res.basis = Basis{basis};

  const double resid =
      ((lp.A + lambda * lp.D) * x - lp.b).lpNorm<Eigen::Infinity>();
  if (resid > tol.res * b_scale * 100)
    throw NumericalError("simplex: solution residual " + std::to_string(resid));
  return res;
}

}  // namespace parawarm
