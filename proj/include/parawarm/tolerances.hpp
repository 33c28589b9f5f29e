// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace parawarm {

/// Numerical tolerances shared across the engine. Entries documented as
/// "factor" are relative and get scaled at the point of use.
struct Tolerances {
  double res = 1e-9;    ///< linear-system residual checks
  double feas = 1e-9;   ///< feasibility: x >= -feas
  double opt = 1e-9;    ///< optimality: reduced costs >= -opt
  double sing = 1e-12;  ///< existence factor: |1 + lambda*nu| > sing*(1+|lambda|*||E||)
  double imag = 1e-7;   ///< imaginary-residual factor: tol = imag*(1+||.||_inf)
  double recon = 1e-8;  ///< decomposition residual factor, scaled by m
  double cond_threshold = 1e12;    ///< eigenvector-matrix condition limit
  double lambda0 = 1e-8;           ///< |lambda| below this uses the Zuidwijk limit form
  double exclusion_radius = 1e-6;  ///< singular-point exclusion factor: 1e-6*(1+|lambda|)
  int max_retries = 5;             ///< tweaked alpha/beta redraws
};

}  // namespace parawarm
