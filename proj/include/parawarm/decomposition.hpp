// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>

#include "parawarm/errors.hpp"
#include "parawarm/tolerances.hpp"

namespace parawarm {

using Complex = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Eigendecomposition Q * diag(sigma) * Q^-1 = E of a real square matrix.
struct EigenCache {
  MatrixXcd Q;
  VectorXcd sigma;
  double q_cond = 0.0;
  Eigen::PartialPivLU<MatrixXcd> luQ;
};

/// Complex Schur decomposition Q * U * Q^H = E with Q unitary and U upper
/// triangular.
struct SchurCache {
  MatrixXcd Q;
  MatrixXcd U;
};

/// Bordered ("tweaked") eigendecomposition: F = [[E, alpha], [beta, 0]] is
/// eigendecomposed, and the border is later removed per lambda through a
/// Sherman-Morrison correction with the rank-one factors u, v.
struct TweakCache {
  VectorXd alpha;  // m
  VectorXd beta;   // m
  MatrixXcd Q;     // (m+1) x (m+1)
  VectorXcd sigma;  // m+1, eigenvalues of F
  VectorXcd u, v;   // rank-one factors: u v^T = Q^-1 blockdiag(alpha*beta, 0) Q
  std::uint64_t seed = 0;
  Eigen::PartialPivLU<MatrixXcd> luQ;
};

namespace detail {

inline double inf_norm(const MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double inf_norm(const MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

// ||Q S Q^-1 - E||_inf computed through the LU of Q.
inline double reconstruction_residual(const MatrixXcd& Q,
                                      const Eigen::PartialPivLU<MatrixXcd>& luQ,
                                      const VectorXcd& sigma, const MatrixXcd& E) {
  const MatrixXcd T = Q * sigma.asDiagonal();
  // T * Q^-1 = (Q^-T * T^T)^T
  const MatrixXcd R = luQ.transpose().solve(T.transpose()).transpose();
  return inf_norm(MatrixXcd(R - E));
}

}  // namespace detail

/// Eigendecomposes E. Raises DefectiveError when the eigenvector matrix is
/// numerically singular (condition estimate above tol.cond_threshold), which
/// signals the caller to fall back to the Schur or tweaked strategy.
inline EigenCache eigen_decompose(const MatrixXd& E, const Tolerances& tol = {}) {
  const Index m = E.rows();
  Eigen::EigenSolver<MatrixXd> es(E, true);
  if (es.info() != Eigen::Success)
    throw DefectiveError("eigen_decompose: QR iteration did not converge");
  EigenCache cache;
  cache.Q = es.eigenvectors();
  cache.sigma = es.eigenvalues();
  cache.luQ.compute(cache.Q);
  const double rc = cache.luQ.rcond();
  cache.q_cond = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(cache.q_cond <= tol.cond_threshold))
    throw DefectiveError("eigen_decompose: eigenvector matrix condition " +
                         std::to_string(cache.q_cond) + " exceeds threshold");
  const double resid = detail::reconstruction_residual(
      cache.Q, cache.luQ, cache.sigma, E.cast<Complex>());
  if (resid > tol.recon * static_cast<double>(m) * (1.0 + detail::inf_norm(E)))
    throw NumericalError("eigen_decompose: reconstruction residual " +
                         std::to_string(resid));
  return cache;
}

/// Complex Schur decomposition of E. Exists for every square matrix; QR
/// non-convergence after 30*m sweeps is reported, never returned silently.
inline SchurCache schur_decompose(const MatrixXd& E, const Tolerances& tol = {}) {
  const Index m = E.rows();
  Eigen::ComplexSchur<MatrixXcd> cs;
  cs.setMaxIterations(30 * m);
  cs.compute(E.cast<Complex>(), true);
  if (cs.info() != Eigen::Success)
    throw NumericalError("schur_decompose: QR iteration did not converge after " +
                         std::to_string(30 * m) + " sweeps");
  SchurCache cache;
  cache.Q = cs.matrixU();
  cache.U = cs.matrixT();
  cache.U.triangularView<Eigen::StrictlyLower>().setZero();

  const double scale = tol.recon * static_cast<double>(m);
  const double unit =
      detail::inf_norm(MatrixXcd(cache.Q * cache.Q.adjoint() -
                                 MatrixXcd::Identity(m, m)));
  if (unit > scale)
    throw NumericalError("schur_decompose: Q lost unitarity, residual " +
                         std::to_string(unit));
  const double resid = detail::inf_norm(
      MatrixXcd(cache.Q * cache.U * cache.Q.adjoint() - E.cast<Complex>()));
  if (resid > scale * (1.0 + detail::inf_norm(E)))
    throw NumericalError("schur_decompose: reconstruction residual " +
                         std::to_string(resid));
  return cache;
}

/// Borders E with random unit-norm alpha, beta drawn from the seed, making F
/// almost surely diagonalizable, and prepares the Sherman-Morrison factors.
/// Deterministic for a given (E, seed). Redraws up to tol.max_retries times
/// if F comes out defective.
inline TweakCache tweaked_assemble(const MatrixXd& E, std::uint64_t seed,
                                   const Tolerances& tol = {}) {
  const Index m = E.rows();
  for (int attempt = 0; attempt <= tol.max_retries; ++attempt) {
    const std::uint64_t derived =
        seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(attempt);
    std::mt19937_64 rng(derived);
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd alpha(m), beta(m);
    for (Index i = 0; i < m; ++i) alpha(i) = normal(rng);
    for (Index i = 0; i < m; ++i) beta(i) = normal(rng);
    if (alpha.norm() == 0 || beta.norm() == 0) continue;
    alpha /= alpha.norm();
    beta /= beta.norm();

    MatrixXd F = MatrixXd::Zero(m + 1, m + 1);
    F.topLeftCorner(m, m) = E;
    F.topRightCorner(m, 1) = alpha;
    F.bottomLeftCorner(1, m) = beta.transpose();

    Eigen::EigenSolver<MatrixXd> es(F, true);
    if (es.info() != Eigen::Success) continue;
    TweakCache cache;
    cache.alpha = alpha;
    cache.beta = beta;
    cache.Q = es.eigenvectors();
    cache.sigma = es.eigenvalues();
    cache.seed = seed;
    cache.luQ.compute(cache.Q);
    const double rc = cache.luQ.rcond();
    if (!(rc > 0) || 1.0 / rc > tol.cond_threshold) continue;

    const double scale = tol.recon * static_cast<double>(m + 1);
    const double resid = detail::reconstruction_residual(
        cache.Q, cache.luQ, cache.sigma, F.cast<Complex>());
    if (resid > scale * (1.0 + detail::inf_norm(F))) continue;

    VectorXcd a_ext = VectorXcd::Zero(m + 1);
    a_ext.head(m) = alpha.cast<Complex>();
    VectorXcd b_ext = VectorXcd::Zero(m + 1);
    b_ext.head(m) = beta.cast<Complex>();
    cache.u = cache.luQ.solve(a_ext);
    cache.v = cache.Q.transpose() * b_ext;  // v^T = (beta, 0) Q

    // u v^T must reproduce Q^-1 blockdiag(alpha beta, 0) Q.
    const MatrixXcd block = a_ext * b_ext.transpose();
    const MatrixXcd ref = cache.luQ.solve(block * cache.Q);
    const double uv_resid =
        detail::inf_norm(MatrixXcd(cache.u * cache.v.transpose() - ref));
    if (uv_resid > scale * (1.0 + detail::inf_norm(block))) continue;
    return cache;
  }
  throw DefectiveError("tweaked_assemble: bordered matrix stayed defective after " +
                       std::to_string(tol.max_retries + 1) + " draws");
}

}  // namespace parawarm
