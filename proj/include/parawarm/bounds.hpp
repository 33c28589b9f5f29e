// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "parawarm/warmstart.hpp"

namespace parawarm {

/// Norm data entering the deviation/feasibility bounds. The norm is fixed to
/// the induced inf-norm, under which ||e_i^T|| = 1 for every i and
/// ||c_B^T|| = sum_i |c_B,i|.
struct BoundInputs {
  double norm_E = 0.0;   // ||E_B||_inf
  double norm_cB = 0.0;  // ||c_B^T||
  Eigen::VectorXd x_lambda;  // x_B(lambda)
  double norm_Ex = 0.0;  // ||E_B x_B(lambda)||_inf
  double lambda = 0.0;
};

/// Builds the bound inputs at lambda from a cache (one O(m^2) resolvent
/// application plus a matrix-vector product).
inline BoundInputs bound_inputs(const WarmstartCache& cache, double lambda) {
  BoundInputs in;
  in.norm_E = cache.norm_E;
  in.norm_cB = cache.norm_cB;
  in.x_lambda = eval_solution(cache, lambda);
  in.norm_Ex = (cache.E * in.x_lambda).lpNorm<Eigen::Infinity>();
  in.lambda = lambda;
  return in;
}

/// Exact solution shift x_B(lambda+delta) - x_B(lambda) =
/// -delta (I + (lambda+delta) E_B)^-1 E_B x_B(lambda), via the cached
/// decomposition in O(m^2).
inline Eigen::VectorXd solution_shift(const WarmstartCache& cache, double lambda,
                                      double delta) {
  if (!check_existence(cache, lambda) || !check_existence(cache, lambda + delta))
    throw PreconditionError("solution_shift: singular at lambda or lambda+delta");
  const Eigen::VectorXd w = cache.E * eval_solution(cache, lambda);
  return -delta * apply_resolvent(cache, lambda + delta, w);
}

/// Neumann-series deviation bound on |o_B(lambda+delta) - o_B(lambda)|.
/// Inapplicable (nullopt) when |lambda+delta|*||E_B|| >= 1.
inline std::optional<double> deviation_bound(const BoundInputs& in, double delta) {
  const double q = std::abs(in.lambda + delta) * in.norm_E;
  if (q >= 1.0) return std::nullopt;
  return std::abs(delta) * in.norm_cB * in.norm_Ex / (1.0 - q);
}

/// Sufficient conditions for the basis to stay feasible at lambda+delta:
/// the (merged) norm condition, existence, and the per-component Neumann
/// bound |delta|*||E_B x_B(lambda)||/(1-|lambda+delta|*||E_B||) <= x_i.
inline bool feasibility_conditions(const WarmstartCache& cache,
                                   const BoundInputs& in, double lambda,
                                   double delta) {
  const double q = std::abs(lambda + delta) * in.norm_E;
  if (q >= 1.0) return false;
  if (!check_existence(cache, lambda + delta)) return false;
  const double shift_bound = std::abs(delta) * in.norm_Ex / (1.0 - q);
  return (in.x_lambda.array() >= shift_bound).all();
}

enum class BindingTerm { Norm, Epsilon, Component };

inline std::string to_string(BindingTerm t) {
  switch (t) {
    case BindingTerm::Norm: return "norm";
    case BindingTerm::Epsilon: return "epsilon";
    case BindingTerm::Component: return "component";
  }
  return "?";
}

/// Certified step radius: for every delta in [0, delta_max] (direction -1:
/// [-delta_max, 0]) outside the excluded singular offsets, the basis stays
/// feasible and |o_B(lambda+delta) - o_B(lambda)| <= epsilon.
struct DeltaCertificate {
  double delta_max = 0.0;
  double epsilon = 0.0;
  BindingTerm binding_term = BindingTerm::Norm;
  std::vector<double> excluded;  // signed offsets delta with lambda+delta singular
  int direction = +1;
};

/// Largest certified step from lambda in the given direction. The paper's
/// two norm terms coincide under the inf-norm choice; |lambda| replaces
/// lambda so the closed forms stay conservative for anchors left of zero,
/// and direction -1 reuses them through the reflection lambda -> -lambda,
/// E_B -> -E_B, which preserves every norm quantity.
inline DeltaCertificate max_delta(const WarmstartCache& cache,
                                  const BoundInputs& in, double lambda,
                                  double epsilon, int direction = +1) {
  if (!(epsilon > 0)) throw PreconditionError("max_delta: epsilon must be > 0");
  if (direction != 1 && direction != -1)
    throw PreconditionError("max_delta: direction must be +1 or -1");
  DeltaCertificate cert;
  cert.epsilon = epsilon;
  cert.direction = direction;

  const double inf = std::numeric_limits<double>::infinity();
  const double la = std::abs(lambda);
  const double head = 1.0 - la * in.norm_E;

  double t_norm = in.norm_E > 0 ? 1.0 / in.norm_E - la : inf;
  double t_eps = inf, t_comp = inf;
  if (head <= 0) {
    t_norm = 0.0;
  } else {
    const double eps_den = in.norm_cB * in.norm_Ex + epsilon * in.norm_E;
    if (eps_den > 0) t_eps = epsilon * head / eps_den;
    for (Eigen::Index i = 0; i < in.x_lambda.size(); ++i) {
      const double xi = std::max(in.x_lambda(i), 0.0);
      const double den = in.norm_Ex + xi * in.norm_E;
      t_comp = std::min(t_comp, den > 0 ? xi * head / den : inf);
    }
  }

  cert.delta_max = t_norm;
  cert.binding_term = BindingTerm::Norm;
  if (t_eps < cert.delta_max) {
    cert.delta_max = t_eps;
    cert.binding_term = BindingTerm::Epsilon;
  }
  if (t_comp < cert.delta_max) {
    cert.delta_max = t_comp;
    cert.binding_term = BindingTerm::Component;
  }
  cert.delta_max = std::max(cert.delta_max, 0.0);

  // Real eigenvalues of E_B whose singular point falls inside the step.
  for (Eigen::Index i = 0; i < cache.nu.size(); ++i) {
    const Complex nu = cache.nu(i);
    if (std::abs(nu.imag()) > 1e-9 * (1.0 + std::abs(nu))) continue;
    if (std::abs(nu.real()) < 1e-300) continue;
    const double offset = -1.0 / nu.real() - lambda;
    if (direction > 0 ? (offset > 0 && offset <= cert.delta_max)
                      : (offset < 0 && -offset <= cert.delta_max))
      cert.excluded.push_back(offset);
  }
  std::sort(cert.excluded.begin(), cert.excluded.end());
  return cert;
}

}  // namespace parawarm
