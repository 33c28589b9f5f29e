// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, kept independent of the implementation paths they
// check: a hand-rolled characteristic polynomial + root finder for
// eigenvalue cross-checks, exhaustive basis enumeration for LP optima, and
// dense per-lambda solves for the warmstart formulas.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "parawarm/problem.hpp"

namespace oracles {

using Complex = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Characteristic polynomial of E by the Faddeev-LeVerrier recurrence:
// returns monic coefficients c so that det(sI - E) = s^m + c[1] s^(m-1) + ...
inline std::vector<double> characteristic_polynomial(const MatrixXd& E) {
  const Index m = E.rows();
  std::vector<double> c(static_cast<size_t>(m) + 1, 0.0);
  c[0] = 1.0;
  MatrixXd M = MatrixXd::Zero(m, m);
  for (Index k = 1; k <= m; ++k) {
    M = E * M + c[static_cast<size_t>(k - 1)] * MatrixXd::Identity(m, m);
    c[static_cast<size_t>(k)] = -(E * M).trace() / static_cast<double>(k);
  }
  return c;
}

// Durand-Kerner simultaneous root iteration on a monic polynomial.
inline std::vector<Complex> polynomial_roots(const std::vector<double>& coeffs) {
  const size_t deg = coeffs.size() - 1;
  if (deg == 0) return {};
  auto eval = [&](Complex z) {
    Complex v = 0.0;
    for (double c : coeffs) v = v * z + c;
    return v;
  };
  std::vector<Complex> r(deg);
  const Complex seedpt(0.4, 0.9);
  Complex acc = 1.0;
  for (size_t i = 0; i < deg; ++i) {
    acc *= seedpt;
    r[i] = acc;
  }
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (size_t i = 0; i < deg; ++i) {
      Complex denom = 1.0;
      for (size_t j = 0; j < deg; ++j)
        if (j != i) denom *= r[i] - r[j];
      const Complex step = eval(r[i]) / denom;
      r[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-14) break;
  }
  return r;
}

// Max over a min-cost pairing of two complex multisets (exact for small m).
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Dense oracle for x_B(lambda): a fresh LU of (A_B + lambda D_B) per call.
inline std::optional<VectorXd> dense_basis_solution(
    const parawarm::BasisPartition& part, const VectorXd& b, double lambda) {
  const MatrixXd M = part.A_B + lambda * part.D_B;
  Eigen::PartialPivLU<MatrixXd> lu(M);
  if (lu.rcond() < 1e-12) return std::nullopt;
  return lu.solve(b);
}

// Dense oracle for the reduced costs at lambda.
inline std::optional<VectorXd> dense_reduced_costs(
    const parawarm::BasisPartition& part, double lambda) {
  const MatrixXd M = part.A_B + lambda * part.D_B;
  Eigen::PartialPivLU<MatrixXd> lu(M);
  if (lu.rcond() < 1e-12) return std::nullopt;
  const VectorXd y = lu.transpose().solve(part.c_B);
  return VectorXd(part.c_N -
                  (part.A_N + lambda * part.D_N).transpose() * y);
}

struct EnumeratedOptimum {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<Index> basis;
};

// Exhaustive basis enumeration: the minimum objective over all feasible
// basic solutions. Valid as an optimum oracle whenever the LP has an optimal
// vertex (bounded feasible problems); n <= ~10.
inline EnumeratedOptimum enumerate_optimum(const parawarm::ParametricLP& lp,
                                           double lambda, double feas_tol = 1e-9) {
  const Index m = lp.m(), n = lp.n();
  EnumeratedOptimum out;
  std::vector<Index> comb(static_cast<size_t>(m));
  std::iota(comb.begin(), comb.end(), 0);
  const MatrixXd M = lp.A + lambda * lp.D;
  for (;;) {
    MatrixXd MB(m, m);
    for (Index k = 0; k < m; ++k) MB.col(k) = M.col(comb[static_cast<size_t>(k)]);
    Eigen::PartialPivLU<MatrixXd> lu(MB);
    if (lu.rcond() > 1e-10) {
      const VectorXd xb = lu.solve(lp.b);
      if ((xb.array() >= -feas_tol).all()) {
        double obj = 0.0;
        for (Index k = 0; k < m; ++k)
          obj += lp.c(comb[static_cast<size_t>(k)]) * xb(k);
        if (obj < out.objective) {
          out.feasible = true;
          out.objective = obj;
          out.basis = comb;
        }
      }
    }
    // next combination
    Index i = m - 1;
    while (i >= 0 && comb[static_cast<size_t>(i)] == n - m + i) --i;
    if (i < 0) break;
    ++comb[static_cast<size_t>(i)];
    for (Index j = i + 1; j < m; ++j)
      comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
  }
  return out;
}

// Random standard-form instance with a planted feasible basis: entries
// uniform(-1,1), b = A_B0 * u with u > 0 so the first-m-column basis is
// feasible at lambda = 0.
struct RandomInstance {
  parawarm::ParametricLP lp;
  parawarm::Basis planted;  // feasible (not necessarily optimal) at lambda=0
};

inline RandomInstance random_instance(Index m, Index n, std::mt19937_64& rng,
                                      double d_scale = 1.0) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 1.5);
  RandomInstance inst;
  for (;;) {
    inst.lp.A = MatrixXd::NullaryExpr(m, n, [&] { return uni(rng); });
    inst.lp.D = MatrixXd::NullaryExpr(m, n, [&] { return d_scale * uni(rng); });
    inst.lp.c = VectorXd::NullaryExpr(n, [&] { return uni(rng); });
    Eigen::PartialPivLU<MatrixXd> lu(inst.lp.A.leftCols(m));
    if (lu.rcond() < 1e-6) continue;  // keep the planted basis well conditioned
    VectorXd u = VectorXd::NullaryExpr(m, [&] { return pos(rng); });
    inst.lp.b = inst.lp.A.leftCols(m) * u;
    inst.lp.senses.assign(static_cast<size_t>(m), parawarm::Sense::Eq);
    inst.lp.standard_form = true;
    inst.planted.indices.resize(static_cast<size_t>(m));
    std::iota(inst.planted.indices.begin(), inst.planted.indices.end(), 0);
    return inst;
  }
}

}  // namespace oracles
