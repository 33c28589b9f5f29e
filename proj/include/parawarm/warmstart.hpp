// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "parawarm/decomposition.hpp"
#include "parawarm/errors.hpp"
#include "parawarm/problem.hpp"
#include "parawarm/tolerances.hpp"

namespace parawarm {

enum class Strategy { Eigen, Schur, Tweaked, Auto };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Eigen: return "eigen";
    case Strategy::Schur: return "schur";
    case Strategy::Tweaked: return "tweaked";
    case Strategy::Auto: return "auto";
  }
  return "?";
}

inline std::optional<Strategy> strategy_from_string(const std::string& s) {
  if (s == "eigen") return Strategy::Eigen;
  if (s == "schur") return Strategy::Schur;
  if (s == "tweaked") return Strategy::Tweaked;
  if (s == "auto") return Strategy::Auto;
  return std::nullopt;
}

/// Everything precomputed once per basis so that each lambda costs O(m^2)
/// (O(m) for the eigen-strategy objective). Immutable after preprocess;
/// safe to share read-only across parallel workers.
struct WarmstartCache {
  Strategy strategy = Strategy::Schur;  // resolved, never Auto
  BasisPartition partition;
  MatrixXd E;      // E_B = A_B^-1 D_B
  VectorXcd nu;    // eigenvalues of E_B, drive the existence test
  VectorXd x0;     // x_B(0) = A_B^-1 b
  std::variant<EigenCache, SchurCache, TweakCache> decomp;
  VectorXcd g;     // Q^-1 x0 (eigen/tweaked) or Q^H x0 (schur); m or m+1
  VectorXcd h;     // h^T = c_B^T Q (border-extended for tweaked)
  MatrixXcd Y;     // transformed A_B^-1 A_N
  MatrixXcd Z;     // transformed A_B^-1 D_N
  double norm_E = 0.0;   // ||E_B||_inf
  double norm_cB = 0.0;  // sum_i |c_B,i| (induced inf-norm of the row c_B^T)
  Tolerances tol;

  Index m() const { return E.rows(); }
};

enum class EvalStatus { Singular, InfeasibleBasis, FeasibleSuboptimal, Optimal };

inline std::string to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::Singular: return "singular";
    case EvalStatus::InfeasibleBasis: return "infeasible_basis";
    case EvalStatus::FeasibleSuboptimal: return "feasible_suboptimal";
    case EvalStatus::Optimal: return "optimal";
  }
  return "?";
}

/// Outcome of the per-lambda pipeline. x has length n with nonbasic
/// components exactly zero; x and objective are absent only when singular.
struct EvaluationResult {
  double lambda = 0.0;
  EvalStatus status = EvalStatus::Singular;
  std::optional<Eigen::VectorXd> x;
  std::optional<double> objective;
  struct Diagnostics {
    double max_imag_residual = std::numeric_limits<double>::quiet_NaN();
    double min_x_component = std::numeric_limits<double>::quiet_NaN();
    double min_reduced_cost = std::numeric_limits<double>::quiet_NaN();
  } diagnostics;
};

/// True iff A_B + lambda*D_B is invertible: lambda != -1/nu_i for every
/// eigenvalue nu_i of E_B, tested as min_i |1 + lambda*nu_i| > tol. O(m).
inline bool check_existence(const WarmstartCache& cache, double lambda) {
  const double tol_s = cache.tol.sing * (1.0 + std::abs(lambda) * cache.norm_E);
  for (Index i = 0; i < cache.nu.size(); ++i)
    if (std::abs(1.0 + lambda * cache.nu(i)) <= tol_s) return false;
  return true;
}

namespace detail {

// Solves (I + lambda*U) z = g in place by back-substitution on the stored
// triangular factor, without forming I + lambda*U.
inline VectorXcd upper_solve(const MatrixXcd& U, double lambda, VectorXcd z) {
  const Index m = U.rows();
  for (Index j = m - 1; j >= 0; --j) {
    z(j) /= 1.0 + lambda * U(j, j);
    if (j > 0) z.head(j) -= (lambda * z(j)) * U.col(j).head(j);
  }
  return z;
}

// Row solve w^T (I + lambda*U) = h^T, i.e. the lower-triangular system
// (I + lambda*U)^T w = h, by forward substitution.
inline VectorXcd upper_solve_transposed(const MatrixXcd& U, double lambda,
                                        const VectorXcd& h) {
  const Index m = U.rows();
  VectorXcd w(m);
  for (Index j = 0; j < m; ++j) {
    Complex s = h(j);
    if (j > 0) s -= lambda * (U.col(j).head(j).transpose() * w.head(j))(0);
    w(j) = s / (1.0 + lambda * U(j, j));
  }
  return w;
}

// Sherman-Morrison pieces of the tweaked strategy at a given lambda.
struct TweakedContext {
  VectorXcd r_inv;  // diagonal of R^-1(lambda)
  Complex denom;    // 1 + lambda^2 v^T R^-1 u
  bool usable = false;
};

inline TweakedContext tweaked_context(const TweakCache& tw, double lambda,
                                      const Tolerances& tol, double norm_E) {
  TweakedContext ctx;
  const Index k = tw.sigma.size();
  ctx.r_inv.resize(k);
  const double tol_s = tol.sing * (1.0 + std::abs(lambda) * norm_E);
  for (Index i = 0; i < k; ++i) {
    const Complex d = 1.0 + lambda * tw.sigma(i);
    if (std::abs(d) <= tol_s) return ctx;  // R(lambda) singular
    ctx.r_inv(i) = 1.0 / d;
  }
  ctx.denom = 1.0 + lambda * lambda *
                        (tw.v.array() * ctx.r_inv.array() * tw.u.array()).sum();
  if (std::abs(ctx.denom) <= tol_s) return ctx;
  ctx.usable = true;
  return ctx;
}

// Applies the Sherman-Morrison inverse (R + lambda^2 u v^T)^-1 to z.
inline VectorXcd tweaked_apply(const TweakCache& tw, const TweakedContext& ctx,
                               double lambda, const VectorXcd& z) {
  const VectorXcd rz = ctx.r_inv.array() * z.array();
  const Complex vt_rz = (tw.v.array() * rz.array()).sum();
  const VectorXcd ru = ctx.r_inv.array() * tw.u.array();
  return rz - (lambda * lambda * vt_rz / ctx.denom) * ru;
}

inline double rel_imag(const VectorXcd& z) {
  const double re = z.real().cwiseAbs().maxCoeff();
  const double im = z.imag().cwiseAbs().maxCoeff();
  return im / (1.0 + re);
}

}  // namespace detail

/// True when the tweaked evaluation route is nonsingular at lambda (its
/// bordered spectrum and Sherman-Morrison denominator introduce spurious
/// singular points absent from E_B's own spectrum). Always true for the
/// eigen and Schur strategies.
inline bool strategy_route_ok(const WarmstartCache& cache, double lambda) {
  if (cache.strategy != Strategy::Tweaked) return true;
  const auto& tw = std::get<TweakCache>(cache.decomp);
  return detail::tweaked_context(tw, lambda, cache.tol, cache.norm_E).usable;
}

/// x_B(lambda) via the strategy formula, O(m^2) per lambda. The returned
/// vector is the real part; the relative imaginary residual is written to
/// *imag_out when given.
inline VectorXd eval_solution(const WarmstartCache& cache, double lambda,
                              double* imag_out = nullptr) {
  if (!check_existence(cache, lambda))
    throw PreconditionError("eval_solution: A_B + lambda*D_B is singular at lambda=" +
                            std::to_string(lambda));
  VectorXcd full;
  const Index m = cache.m();
  if (cache.strategy == Strategy::Eigen) {
    const auto& eig = std::get<EigenCache>(cache.decomp);
    VectorXcd z = cache.g;
    for (Index i = 0; i < m; ++i) z(i) /= 1.0 + lambda * eig.sigma(i);
    full = eig.Q * z;
  } else if (cache.strategy == Strategy::Schur) {
    const auto& sch = std::get<SchurCache>(cache.decomp);
    full = sch.Q * detail::upper_solve(sch.U, lambda, cache.g);
  } else {
    const auto& tw = std::get<TweakCache>(cache.decomp);
    const auto ctx = detail::tweaked_context(tw, lambda, cache.tol, cache.norm_E);
    if (!ctx.usable)
      throw PreconditionError(
          "eval_solution: tweaked route singular at lambda=" + std::to_string(lambda));
    full = (tw.Q * detail::tweaked_apply(tw, ctx, lambda, cache.g)).head(m);
  }
  if (imag_out) *imag_out = detail::rel_imag(full);
  return full.real();
}

/// Applies the resolvent (I + lambda*E_B)^-1 to an arbitrary real vector in
/// O(m^2), through the cached decomposition.
inline VectorXd apply_resolvent(const WarmstartCache& cache, double lambda,
                                const VectorXd& w, double* imag_out = nullptr) {
  if (!check_existence(cache, lambda))
    throw PreconditionError("apply_resolvent: singular at lambda=" +
                            std::to_string(lambda));
  const Index m = cache.m();
  VectorXcd full;
  if (cache.strategy == Strategy::Eigen) {
    const auto& eig = std::get<EigenCache>(cache.decomp);
    VectorXcd z = eig.luQ.solve(w.cast<Complex>().eval());
    for (Index i = 0; i < m; ++i) z(i) /= 1.0 + lambda * eig.sigma(i);
    full = eig.Q * z;
  } else if (cache.strategy == Strategy::Schur) {
    const auto& sch = std::get<SchurCache>(cache.decomp);
    const VectorXcd z = sch.Q.adjoint() * w.cast<Complex>();
    full = sch.Q * detail::upper_solve(sch.U, lambda, z);
  } else {
    const auto& tw = std::get<TweakCache>(cache.decomp);
    const auto ctx = detail::tweaked_context(tw, lambda, cache.tol, cache.norm_E);
    if (!ctx.usable)
      throw PreconditionError("apply_resolvent: tweaked route singular at lambda=" +
                              std::to_string(lambda));
    VectorXcd w_ext = VectorXcd::Zero(m + 1);
    w_ext.head(m) = w.cast<Complex>();
    const VectorXcd z = tw.luQ.solve(w_ext);
    full = (tw.Q * detail::tweaked_apply(tw, ctx, lambda, z)).head(m);
  }
  if (imag_out) *imag_out = detail::rel_imag(full);
  return full.real();
}

/// o_B(lambda) = c_B^T x_B(lambda). O(m) for the eigen strategy (the
/// precomputed h, g contract against the diagonal resolvent), O(m^2)
/// otherwise.
inline double eval_objective(const WarmstartCache& cache, double lambda,
                             double* imag_out = nullptr) {
  if (cache.strategy == Strategy::Eigen) {
    if (!check_existence(cache, lambda))
      throw PreconditionError("eval_objective: singular at lambda=" +
                              std::to_string(lambda));
    const auto& eig = std::get<EigenCache>(cache.decomp);
    Complex o = 0.0;
    for (Index i = 0; i < cache.m(); ++i)
      o += cache.h(i) * cache.g(i) / (1.0 + lambda * eig.sigma(i));
    if (imag_out) *imag_out = std::abs(o.imag()) / (1.0 + std::abs(o.real()));
    return o.real();
  }
  return cache.partition.c_B.dot(eval_solution(cache, lambda, imag_out));
}

/// Reduced costs r(lambda) = c_N^T - h^T (I + lambda*U)^-1 (Y + lambda*Z),
/// evaluated left to right: one triangular/diagonal row solve, then a row
/// vector times the m x (n-m) transformed blocks. O(m^2 + m(n-m)).
inline VectorXd reduced_costs(const WarmstartCache& cache, double lambda,
                              double* imag_out = nullptr) {
  if (!check_existence(cache, lambda))
    throw PreconditionError("reduced_costs: singular at lambda=" +
                            std::to_string(lambda));
  const Index m = cache.m();
  VectorXcd w;
  if (cache.strategy == Strategy::Eigen) {
    const auto& eig = std::get<EigenCache>(cache.decomp);
    w = cache.h;
    for (Index i = 0; i < m; ++i) w(i) /= 1.0 + lambda * eig.sigma(i);
  } else if (cache.strategy == Strategy::Schur) {
    const auto& sch = std::get<SchurCache>(cache.decomp);
    w = detail::upper_solve_transposed(sch.U, lambda, cache.h);
  } else {
    const auto& tw = std::get<TweakCache>(cache.decomp);
    const auto ctx = detail::tweaked_context(tw, lambda, cache.tol, cache.norm_E);
    if (!ctx.usable)
      throw PreconditionError("reduced_costs: tweaked route singular at lambda=" +
                              std::to_string(lambda));
    // w^T = h^T (R + lambda^2 u v^T)^-1, the transposed Sherman-Morrison.
    const VectorXcd
        rh = ctx.r_inv.array() * cache.h.array();
    const Complex ht_ru = (rh.array() * tw.u.array()).sum();
    const VectorXcd rv = ctx.r_inv.array() * tw.v.array();
    w = rh - (lambda * lambda * ht_ru / ctx.denom) * rv;
  }
  const VectorXcd rc = cache.partition.c_N.cast<Complex>() -
                       (cache.Y.transpose() * w + lambda * (cache.Z.transpose() * w));
  if (imag_out) *imag_out = rc.size() == 0 ? 0.0 : detail::rel_imag(rc);
  return rc.real();
}

/// Preprocesses a basis: one LU of A_B, one decomposition of E_B, and the
/// transformed Y/Z products. O(m^3 + m^2 n). With Strategy::Auto the eigen
/// route is tried first and `fallback` is used on DefectiveError.
inline WarmstartCache preprocess(const ParametricLP& lp, const Basis& basis,
                                 Strategy strategy = Strategy::Auto,
                                 const Tolerances& tol = {},
                                 std::uint64_t seed = 0,
                                 Strategy fallback = Strategy::Schur) {
  if (!lp.standard_form)
    throw PreconditionError("preprocess: problem is not in standard form");
  if (strategy == Strategy::Auto) {
    try {
      return preprocess(lp, basis, Strategy::Eigen, tol, seed, fallback);
    } catch (const DefectiveError&) {
      if (fallback == Strategy::Eigen || fallback == Strategy::Auto)
        throw Error("preprocess: fallback must be schur or tweaked");
      return preprocess(lp, basis, fallback, tol, seed, fallback);
    }
  }

  WarmstartCache cache;
  cache.strategy = strategy;
  cache.tol = tol;
  cache.partition = partition(lp, basis);
  const auto& part = cache.partition;
  const Index m = lp.m();

  Eigen::PartialPivLU<MatrixXd> luA(part.A_B);
  if (luA.rcond() < 1e-14)
    throw NumericalError("preprocess: A_B is singular for this basis");
  cache.E = luA.solve(part.D_B);
  cache.x0 = luA.solve(lp.b);
  const MatrixXd P = luA.solve(part.A_N);
  const MatrixXd R = luA.solve(part.D_N);

  const double e_resid =
      detail::inf_norm(MatrixXd(part.A_B * cache.E - part.D_B));
  if (e_resid > tol.res * static_cast<double>(m) * 100 *
                    (1.0 + detail::inf_norm(part.D_B)))
    throw NumericalError("preprocess: E_B residual " + std::to_string(e_resid));
  const double x0_resid =
      (part.A_B * cache.x0 - lp.b).lpNorm<Eigen::Infinity>();
  if (x0_resid > tol.res * static_cast<double>(m) * 100 *
                     (1.0 + lp.b.lpNorm<Eigen::Infinity>()))
    throw NumericalError("preprocess: x_B(0) residual " + std::to_string(x0_resid));

  cache.norm_E = detail::inf_norm(cache.E);
  cache.norm_cB = part.c_B.lpNorm<1>();

  if (strategy == Strategy::Eigen) {
    EigenCache eig = eigen_decompose(cache.E, tol);
    cache.nu = eig.sigma;
    cache.g = eig.luQ.solve(cache.x0.cast<Complex>().eval());
    cache.h = eig.Q.transpose() * part.c_B.cast<Complex>();
    cache.Y = eig.luQ.solve(P.cast<Complex>().eval());
    cache.Z = eig.luQ.solve(R.cast<Complex>().eval());
    cache.decomp = std::move(eig);
  } else if (strategy == Strategy::Schur) {
    SchurCache sch = schur_decompose(cache.E, tol);
    cache.nu = sch.U.diagonal();
    cache.g = sch.Q.adjoint() * cache.x0.cast<Complex>();
    cache.h = sch.Q.transpose() * part.c_B.cast<Complex>();
    cache.Y = sch.Q.adjoint() * P.cast<Complex>();
    cache.Z = sch.Q.adjoint() * R.cast<Complex>();
    cache.decomp = std::move(sch);
  } else {
    TweakCache tw = tweaked_assemble(cache.E, seed, tol);
    // The existence test runs on E_B's own spectrum, not on F's.
    cache.nu = cache.E.eigenvalues();
    VectorXcd x0_ext = VectorXcd::Zero(m + 1);
    x0_ext.head(m) = cache.x0.cast<Complex>();
    cache.g = tw.luQ.solve(x0_ext);
    VectorXcd cb_ext = VectorXcd::Zero(m + 1);
    cb_ext.head(m) = part.c_B.cast<Complex>();
    cache.h = tw.Q.transpose() * cb_ext;
    MatrixXcd P_ext = MatrixXcd::Zero(m + 1, P.cols());
    P_ext.topRows(m) = P.cast<Complex>();
    MatrixXcd R_ext = MatrixXcd::Zero(m + 1, R.cols());
    R_ext.topRows(m) = R.cast<Complex>();
    cache.Y = tw.luQ.solve(P_ext);
    cache.Z = tw.luQ.solve(R_ext);
    cache.decomp = std::move(tw);
  }
  return cache;
}

struct EvaluateOptions {
  /// When false the optimality check is skipped (callers wanting only upper
  /// bounds); feasible results are then reported as feasible_suboptimal.
  bool check_optimality = true;
};

/// The per-lambda pipeline: existence, feasibility, optimality (if
/// requested), objective, solution, short-circuiting to singular or
/// infeasible_basis as soon as a check fails. Feasible results always carry
/// x and objective — a valid upper bound on o*(lambda) even when suboptimal.
inline EvaluationResult evaluate(const WarmstartCache& cache, double lambda,
                                 const EvaluateOptions& opts = {}) {
  EvaluationResult res;
  res.lambda = lambda;
  if (!check_existence(cache, lambda) || !strategy_route_ok(cache, lambda)) {
    res.status = EvalStatus::Singular;
    return res;
  }
  double imag_x = 0.0;
  const VectorXd x_B = eval_solution(cache, lambda, &imag_x);
  res.diagnostics.max_imag_residual = imag_x;
  res.diagnostics.min_x_component = x_B.minCoeff();

  const Index n = cache.partition.basis.indices.size() + cache.partition.nonbasic.size();
  Eigen::VectorXd x_full = Eigen::VectorXd::Zero(static_cast<Index>(n));
  for (size_t k = 0; k < cache.partition.basis.indices.size(); ++k)
    x_full(cache.partition.basis.indices[k]) = x_B(static_cast<Index>(k));
  res.x = x_full;
  double imag_o = 0.0;
  res.objective = eval_objective(cache, lambda, &imag_o);
  res.diagnostics.max_imag_residual = std::max(imag_x, imag_o);

  if (res.diagnostics.min_x_component < -cache.tol.feas) {
    res.status = EvalStatus::InfeasibleBasis;
    return res;
  }
  if (!opts.check_optimality) {
    res.status = EvalStatus::FeasibleSuboptimal;
    return res;
  }
  double imag_r = 0.0;
  const VectorXd rc = reduced_costs(cache, lambda, &imag_r);
  res.diagnostics.max_imag_residual =
      std::max(res.diagnostics.max_imag_residual, imag_r);
  res.diagnostics.min_reduced_cost = rc.size() == 0 ? 0.0 : rc.minCoeff();
  res.status = res.diagnostics.min_reduced_cost >= -cache.tol.opt
                   ? EvalStatus::Optimal
                   : EvalStatus::FeasibleSuboptimal;
  return res;
}

/// Eigenvalue caches for the Zuidwijk product formula: alphas from
/// A_B^-1 D_B and betas from A_B^-1 (D_B + b c_B^T).
struct ZuidwijkCache {
  VectorXcd alphas;
  VectorXcd betas;
};

inline ZuidwijkCache zuidwijk_preprocess(const BasisPartition& part,
                                         const Eigen::VectorXd& b,
                                         const Tolerances& tol = {}) {
  Eigen::PartialPivLU<MatrixXd> luA(part.A_B);
  if (luA.rcond() < 1e-14)
    throw NumericalError("zuidwijk_preprocess: A_B is singular");
  ZuidwijkCache zc;
  zc.alphas = MatrixXd(luA.solve(part.D_B)).eigenvalues();
  zc.betas = MatrixXd(luA.solve(part.D_B + b * part.c_B.transpose())).eigenvalues();

  // Trace identity: sum(beta - alpha) = c_B^T x_B(0), real.
  const Complex s = zc.betas.sum() - zc.alphas.sum();
  const double o0 = part.c_B.dot(luA.solve(b));
  if (std::abs(s.imag()) > tol.imag * (1.0 + std::abs(s.real())) ||
      std::abs(s.real() - o0) > 1e-6 * (1.0 + std::abs(o0)))
    throw NumericalError("zuidwijk_preprocess: trace identity violated");
  return zc;
}

/// o_B(lambda) by the product formula (prod (1+lambda*beta)/(1+lambda*alpha)
/// - 1)/lambda; for |lambda| < tol.lambda0 the limit form sum(beta - alpha)
/// is returned.
inline double zuidwijk_objective(const ZuidwijkCache& zc, double lambda,
                                 const Tolerances& tol = {}) {
  if (std::abs(lambda) < tol.lambda0)
    return (zc.betas.sum() - zc.alphas.sum()).real();
  Complex prod = 1.0;
  for (Index j = 0; j < zc.alphas.size(); ++j) {
    const Complex d = 1.0 + lambda * zc.alphas(j);
    if (std::abs(d) <= tol.sing * (1.0 + std::abs(lambda)))
      throw PreconditionError("zuidwijk_objective: pole at lambda=" +
                              std::to_string(lambda));
    prod *= (1.0 + lambda * zc.betas(j)) / d;
  }
  return ((prod - 1.0) / lambda).real();
}

}  // namespace parawarm
