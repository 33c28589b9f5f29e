// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "parawarm/problem.hpp"
#include "parawarm/problem_io.hpp"
#include "parawarm/simplex.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace parawarm;

TEST_CASE("parse transcribes a minimal document exactly", "[problem]") {
  const auto lp = parse_problem(
      R"({"c":[1],"A":[[2]],"D":[[1]],"b":[4],"senses":["eq"]})");
  REQUIRE(lp.m() == 1);
  REQUIRE(lp.n() == 1);
  CHECK(lp.c(0) == 1.0);
  CHECK(lp.A(0, 0) == 2.0);
  CHECK(lp.D(0, 0) == 1.0);
  CHECK(lp.b(0) == 4.0);
  CHECK(lp.senses[0] == Sense::Eq);
  CHECK(lp.standard_form);
}

TEST_CASE("parse reports dimension mismatches with their field", "[problem]") {
  const std::string doc =
      R"({"c":[1,2],"A":[[1,0],[0,1]],"D":[[0,0],[0,0]],"b":[1,1,1],"senses":["eq","eq"]})";
  CHECK_THROWS_WITH(parse_problem(doc), Catch::Matchers::ContainsSubstring("b:"));
}

TEST_CASE("parse reports unknown sense tokens with their row", "[problem]") {
  const std::string doc =
      R"({"c":[1],"A":[[2]],"D":[[1]],"b":[4],"senses":["ge"]})";
  CHECK_THROWS_WITH(parse_problem(doc),
                    Catch::Matchers::ContainsSubstring("row 0") &&
                        Catch::Matchers::ContainsSubstring("ge"));
}

TEST_CASE("parse rejects malformed JSON and ragged matrices", "[problem]") {
  CHECK_THROWS_AS(parse_problem("{"), ParseError);
  CHECK_THROWS_AS(
      parse_problem(
          R"({"c":[1,2],"A":[[1,2],[3]],"D":[[0,0],[0,0]],"b":[1,1],"senses":["eq","eq"]})"),
      ParseError);
}

TEST_CASE("parse/serialize round-trips random instances bitwise", "[problem]") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const auto inst = oracles::random_instance(5, 10, rng);
    const auto back = parse_problem(serialize_problem(inst.lp));
    CHECK(back.A == inst.lp.A);
    CHECK(back.D == inst.lp.D);
    CHECK(back.c == inst.lp.c);
    CHECK(back.b == inst.lp.b);
    CHECK(back.senses == inst.lp.senses);
    CHECK(back.standard_form == inst.lp.standard_form);
  }
}

TEST_CASE("lambda specifications parse from the file", "[problem]") {
  const auto doc = parse_document(
      R"({"c":[1],"A":[[2]],"D":[[1]],"b":[4],"senses":["eq"],
          "lambda":{"from":0,"to":3,"count":4}})");
  REQUIRE(doc.lambda.has_value());
  CHECK(doc.lambda->values == std::vector<double>{0, 1, 2, 3});

  const auto doc2 = parse_document(
      R"({"c":[1],"A":[[2]],"D":[[1]],"b":[4],"senses":["eq"],
          "lambda":{"values":[0.5,-1]}})");
  REQUIRE(doc2.lambda.has_value());
  CHECK(doc2.lambda->values == std::vector<double>{0.5, -1});
  CHECK(LambdaSpec::range(2.0, 5.0, 1).values == std::vector<double>{2.0});
}

TEST_CASE("to_standard_form adds one slack per le row", "[problem]") {
  // min x s.t. (1+lambda) x <= 4
  ParametricLP lp;
  lp.c = Eigen::VectorXd::Constant(1, 1.0);
  lp.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  lp.D = Eigen::MatrixXd::Constant(1, 1, 1.0);
  lp.b = Eigen::VectorXd::Constant(1, 4.0);
  lp.senses = {Sense::Le};

  const auto std_lp = to_standard_form(lp);
  REQUIRE(std_lp.n() == 2);
  CHECK(std_lp.A(0, 1) == 1.0);
  CHECK(std_lp.D(0, 1) == 0.0);
  CHECK(std_lp.c(1) == 0.0);
  CHECK(std_lp.standard_form);
  CHECK(std_lp.senses[0] == Sense::Eq);
}

TEST_CASE("to_standard_form is the identity on standard problems", "[problem]") {
  const auto lp = instances::p1();
  const auto out = to_standard_form(lp);
  CHECK(out.A == lp.A);
  CHECK(out.D == lp.D);
  CHECK(out.c == lp.c);
  const auto twice = to_standard_form(out);
  CHECK(twice.A == out.A);
  CHECK(twice.n() == out.n());
}

TEST_CASE("standardized mixed-sense instances keep their optimum", "[problem]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  int solved = 0;
  for (int rep = 0; rep < 20 && solved < 5; ++rep) {
    // 4x6 mixed-sense instance with a feasible positive point.
    ParametricLP lp;
    const Eigen::Index m = 4, n = 6;
    lp.A = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return uni(rng); });
    lp.D = Eigen::MatrixXd::Zero(m, n);
    lp.c = Eigen::VectorXd::NullaryExpr(n, [&] { return uni(rng); });
    Eigen::VectorXd x0 =
        Eigen::VectorXd::NullaryExpr(n, [&] { return 0.5 + 0.5 * std::abs(uni(rng)); });
    lp.b = lp.A * x0;
    lp.senses = {Sense::Eq, Sense::Le, Sense::Eq, Sense::Le};
    for (Eigen::Index i = 0; i < m; ++i)
      if (lp.senses[static_cast<size_t>(i)] == Sense::Le)
        lp.b(i) += 0.25;  // slack room keeps x0 strictly feasible

    const auto std_lp = to_standard_form(lp);
    const auto res = solve_lp(std_lp, 0.0);
    if (res.status != SolveStatus::Optimal) continue;  // unbounded draws skipped
    ++solved;
    // The simplex optimum must match exhaustive enumeration over bases of
    // the standardized problem.
    const auto brute = oracles::enumerate_optimum(std_lp, 0.0);
    REQUIRE(brute.feasible);
    CHECK_THAT(*res.objective,
               Catch::Matchers::WithinAbs(brute.objective, 1e-8));
    // And the solution satisfies the original senses on original variables.
    const Eigen::VectorXd orig = res.x->head(n);
    const Eigen::VectorXd lhs = lp.A * orig;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (lp.senses[static_cast<size_t>(i)] == Sense::Eq)
        CHECK_THAT(lhs(i), Catch::Matchers::WithinAbs(lp.b(i), 1e-8));
      else
        CHECK(lhs(i) <= lp.b(i) + 1e-8);
    }
  }
  REQUIRE(solved >= 3);
}

TEST_CASE("partition extracts blocks in basis order", "[problem]") {
  SECTION("P1 with basis {0} has empty nonbasic blocks") {
    const auto part = partition(instances::p1(), instances::basis({0}));
    CHECK(part.A_B(0, 0) == 2.0);
    CHECK(part.D_B(0, 0) == 1.0);
    CHECK(part.c_B(0) == 1.0);
    CHECK(part.A_N.cols() == 0);
  }
  SECTION("P4 with basis {0}") {
    const auto part = partition(instances::p4(), instances::basis({0}));
    CHECK(part.A_B(0, 0) == 1.0);
    CHECK(part.D_B(0, 0) == 0.0);
    CHECK(part.A_N(0, 0) == 1.0);
    CHECK(part.D_N(0, 0) == 1.0);
    CHECK(part.c_N(0) == 3.0);
  }
}

TEST_CASE("partition rejects bad bases", "[problem]") {
  const auto lp = instances::p2();
  CHECK_THROWS_WITH(partition(lp, instances::basis({0, 0})),
                    Catch::Matchers::ContainsSubstring("duplicate"));
  CHECK_THROWS_WITH(partition(lp, instances::basis({0, 5})),
                    Catch::Matchers::ContainsSubstring("out of range"));
}

TEST_CASE("reassembling the partition reproduces A, D, c bitwise", "[problem]") {
  std::mt19937_64 rng(3);
  const auto inst = oracles::random_instance(4, 9, rng);
  Basis basis{{7, 2, 5, 0}};  // deliberately unsorted: order is significant
  const auto part = partition(inst.lp, basis);
  Eigen::MatrixXd A2(4, 9), D2(4, 9);
  Eigen::VectorXd c2(9);
  for (size_t k = 0; k < basis.indices.size(); ++k) {
    A2.col(basis.indices[k]) = part.A_B.col(static_cast<Eigen::Index>(k));
    D2.col(basis.indices[k]) = part.D_B.col(static_cast<Eigen::Index>(k));
    c2(basis.indices[k]) = part.c_B(static_cast<Eigen::Index>(k));
  }
  for (size_t k = 0; k < part.nonbasic.size(); ++k) {
    A2.col(part.nonbasic[k]) = part.A_N.col(static_cast<Eigen::Index>(k));
    D2.col(part.nonbasic[k]) = part.D_N.col(static_cast<Eigen::Index>(k));
    c2(part.nonbasic[k]) = part.c_N(static_cast<Eigen::Index>(k));
  }
  CHECK(A2 == inst.lp.A);
  CHECK(D2 == inst.lp.D);
  CHECK(c2 == inst.lp.c);
}
