// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "parawarm/simplex.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace parawarm;

TEST_CASE("P1 solves to x=2 with basis {0}", "[simplex]") {
  const auto res = solve_lp(instances::p1(), 0.0);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK_THAT((*res.x)(0), Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK_THAT(*res.objective, Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK(optimal_basis(res).indices == std::vector<Eigen::Index>{0});
}

TEST_CASE("P4 optimum moves from basis {0} to {1} as lambda grows", "[simplex]") {
  const auto at0 = solve_lp(instances::p4(), 0.0);
  REQUIRE(at0.status == SolveStatus::Optimal);
  CHECK_THAT(*at0.objective, Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK(optimal_basis(at0).indices == std::vector<Eigen::Index>{0});
  CHECK_THAT((*at0.x)(0), Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK_THAT((*at0.x)(1), Catch::Matchers::WithinAbs(0.0, 1e-12));

  // At lambda=3 column 1 costs 6/(1+3) = 1.5 < 2.
  const auto at3 = solve_lp(instances::p4(), 3.0);
  REQUIRE(at3.status == SolveStatus::Optimal);
  CHECK_THAT(*at3.objective, Catch::Matchers::WithinAbs(1.5, 1e-12));
  CHECK(optimal_basis(at3).indices == std::vector<Eigen::Index>{1});
}

TEST_CASE("x >= 0 makes x = -1 infeasible", "[simplex]") {
  ParametricLP lp;
  lp.c = Eigen::VectorXd::Constant(1, 1.0);
  lp.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  lp.D = Eigen::MatrixXd::Zero(1, 1);
  lp.b = Eigen::VectorXd::Constant(1, -1.0);
  lp.senses = {Sense::Eq};
  lp.standard_form = true;
  CHECK(solve_lp(lp, 0.0).status == SolveStatus::Infeasible);
}

TEST_CASE("recession directions are reported unbounded", "[simplex]") {
  // min -x1 s.t. x1 - x2 = 1: x = (1+t, t) drives the objective to -inf.
  ParametricLP lp;
  lp.c = Eigen::VectorXd(2);
  lp.c << -1.0, 0.0;
  lp.A = Eigen::MatrixXd(1, 2);
  lp.A << 1.0, -1.0;
  lp.D = Eigen::MatrixXd::Zero(1, 2);
  lp.b = Eigen::VectorXd::Constant(1, 1.0);
  lp.senses = {Sense::Eq};
  lp.standard_form = true;
  CHECK(solve_lp(lp, 0.0).status == SolveStatus::Unbounded);
}

TEST_CASE("optimal_basis rejects non-optimal results", "[simplex]") {
  ParametricLP lp;
  lp.c = Eigen::VectorXd::Constant(1, 1.0);
  lp.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  lp.D = Eigen::MatrixXd::Zero(1, 1);
  lp.b = Eigen::VectorXd::Constant(1, -1.0);
  lp.senses = {Sense::Eq};
  lp.standard_form = true;
  const auto res = solve_lp(lp, 0.0);
  CHECK_THROWS_AS(optimal_basis(res), PreconditionError);
}

TEST_CASE("simplex matches exhaustive enumeration on random instances", "[simplex]") {
  std::mt19937_64 rng(17);
  int optimal_seen = 0;
  for (int rep = 0; rep < 25; ++rep) {
    const auto inst = oracles::random_instance(3, 8, rng);
    const double lambda = (rep % 5) * 0.1;
    SolveResult res;
    try {
      res = solve_lp(inst.lp, lambda);
    } catch (const NumericalError&) {
      continue;
    }
    const auto brute = oracles::enumerate_optimum(inst.lp, lambda);
    if (res.status == SolveStatus::Optimal) {
      ++optimal_seen;
      REQUIRE(brute.feasible);
      CHECK_THAT(*res.objective,
                 Catch::Matchers::WithinAbs(brute.objective,
                                            1e-8 * (1 + std::abs(brute.objective))));
      // Feasibility and residual invariants.
      CHECK(res.x->minCoeff() >= -1e-9);
      const Eigen::VectorXd resid =
          (inst.lp.A + lambda * inst.lp.D) * (*res.x) - inst.lp.b;
      CHECK(resid.lpNorm<Eigen::Infinity>() <= 1e-8);
    } else if (res.status == SolveStatus::Infeasible) {
      CHECK_FALSE(brute.feasible);
    }
  }
  REQUIRE(optimal_seen >= 10);
}

TEST_CASE("reduced costs certify optimality at the returned basis", "[simplex]") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const auto inst = oracles::random_instance(4, 8, rng);
    SolveResult res;
    try {
      res = solve_lp(inst.lp, 0.0);
    } catch (const NumericalError&) {
      continue;
    }
    if (res.status != SolveStatus::Optimal) continue;
    const auto part = partition(inst.lp, *res.basis);
    const auto rc = oracles::dense_reduced_costs(part, 0.0);
    REQUIRE(rc.has_value());
    CHECK(rc->minCoeff() >= -1e-9);
  }
}

TEST_CASE("a warm-start basis skips phase 1 when it is still feasible", "[simplex]") {
  const auto lp = instances::p4();
  const auto cold = solve_lp(lp, 1.0);
  REQUIRE(cold.status == SolveStatus::Optimal);
  const auto warm = solve_lp(lp, 1.0, {}, cold.basis);
  REQUIRE(warm.status == SolveStatus::Optimal);
  CHECK(*warm.objective == *cold.objective);
  CHECK(warm.iterations <= cold.iterations);
}
