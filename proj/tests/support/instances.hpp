// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Tiny hand-checked instances reused across the suite.
//   P1: min x s.t. (2 + lambda) x = 4          -> x_B(lambda) = 4/(2+lambda)
//   P2: min x1+x2 s.t. x + lambda*[[0,1],[0,0]] x = (1,1)  (E_B is a Jordan block)
//   P4: min x1+3x2 s.t. (1,1)x + lambda (0,1)x = 2  (reduced cost crosses at 2)

#pragma once

#include "parawarm/problem.hpp"

namespace instances {

inline parawarm::ParametricLP p1() {
  parawarm::ParametricLP lp;
  lp.c = Eigen::VectorXd::Constant(1, 1.0);
  lp.A = Eigen::MatrixXd::Constant(1, 1, 2.0);
  lp.D = Eigen::MatrixXd::Constant(1, 1, 1.0);
  lp.b = Eigen::VectorXd::Constant(1, 4.0);
  lp.senses = {parawarm::Sense::Eq};
  lp.standard_form = true;
  return lp;
}

inline parawarm::ParametricLP p2() {
  parawarm::ParametricLP lp;
  lp.c = Eigen::VectorXd::Ones(2);
  lp.A = Eigen::MatrixXd::Identity(2, 2);
  lp.D = Eigen::MatrixXd::Zero(2, 2);
  lp.D(0, 1) = 1.0;
  lp.b = Eigen::VectorXd::Ones(2);
  lp.senses = {parawarm::Sense::Eq, parawarm::Sense::Eq};
  lp.standard_form = true;
  return lp;
}

inline parawarm::ParametricLP p4() {
  parawarm::ParametricLP lp;
  lp.c = Eigen::VectorXd(2);
  lp.c << 1.0, 3.0;
  lp.A = Eigen::MatrixXd(1, 2);
  lp.A << 1.0, 1.0;
  lp.D = Eigen::MatrixXd(1, 2);
  lp.D << 0.0, 1.0;
  lp.b = Eigen::VectorXd::Constant(1, 2.0);
  lp.senses = {parawarm::Sense::Eq};
  lp.standard_form = true;
  return lp;
}

inline parawarm::Basis basis(std::initializer_list<Eigen::Index> idx) {
  return parawarm::Basis{std::vector<Eigen::Index>(idx)};
}

}  // namespace instances
