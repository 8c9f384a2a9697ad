#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/lp.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace sparselab;

TEST_CASE("simple bounded problems solve to hand-checked optima") {
  SUBCASE("min x s.t. x >= 1") {
    lp::Problem p;
    p.c = {1.0};
    p.eq_a = Matrix(0, 1);
    p.lower = {1.0};
    p.upper = {lp::kInf};
    auto s = lp::solve(p);
    REQUIRE(s.status == lp::SolveStatus::optimal);
    CHECK(s.x[0] == doctest::Approx(1.0));
  }
  SUBCASE("box-constrained with equality") {
    // min x0 + x1 s.t. x0 + x1 = 1, 0 <= x <= 1: objective fixed at 1
    lp::Problem p;
    p.c = {1.0, 1.0};
    p.eq_a = Matrix(1, 2);
    p.eq_a(0, 0) = p.eq_a(0, 1) = 1.0;
    p.eq_b = {1.0};
    p.lower = {0.0, 0.0};
    p.upper = {1.0, 1.0};
    auto s = lp::solve(p);
    REQUIRE(s.status == lp::SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(1.0));
  }
  SUBCASE("negative cost pushes to upper bound") {
    lp::Problem p;
    p.c = {-2.0};
    p.eq_a = Matrix(0, 1);
    p.lower = {-1.0};
    p.upper = {3.0};
    auto s = lp::solve(p);
    REQUIRE(s.status == lp::SolveStatus::optimal);
    CHECK(s.x[0] == doctest::Approx(3.0));
    CHECK(s.objective == doctest::Approx(-6.0));
  }
}

TEST_CASE("infeasible and unbounded problems are classified") {
  SUBCASE("contradictory equalities") {
    lp::Problem p;
    p.c = {0.0};
    p.eq_a = Matrix(2, 1);
    p.eq_a(0, 0) = 1.0;
    p.eq_a(1, 0) = 1.0;
    p.eq_b = {0.0, 1.0};
    p.lower = {-lp::kInf};
    p.upper = {lp::kInf};
    CHECK(lp::solve(p).status == lp::SolveStatus::infeasible);
  }
  SUBCASE("bound-violating equality") {
    lp::Problem p;
    p.c = {0.0};
    p.eq_a = Matrix(1, 1);
    p.eq_a(0, 0) = 1.0;
    p.eq_b = {5.0};
    p.lower = {0.0};
    p.upper = {1.0};
    CHECK(lp::solve(p).status == lp::SolveStatus::infeasible);
  }
  SUBCASE("unbounded free descent") {
    lp::Problem p;
    p.c = {-1.0};
    p.eq_a = Matrix(0, 1);
    p.lower = {0.0};
    p.upper = {lp::kInf};
    CHECK(lp::solve(p).status == lp::SolveStatus::unbounded);
  }
}

TEST_CASE("solve_or_throw maps verdicts to errors") {
  lp::Problem p;
  p.c = {-1.0};
  p.eq_a = Matrix(0, 1);
  p.lower = {0.0};
  p.upper = {lp::kInf};
  CHECK_THROWS_AS(lp::solve_or_throw(p), Error);
}

TEST_CASE("l1 minimizer matches support-enumeration oracle on random instances") {
  Rng pick(2024);
  int solved = 0;
  for (int inst = 0; inst < 120; ++inst) {
    std::size_t m = 2 + pick.next_below(4);           // 2..5
    std::size_t n = m + 1 + pick.next_below(8 - m);   // m+1..8
    Matrix a = sample_gaussian_matrix(m, n, pick.next_u64());
    // consistent right-hand side from a sparse vector
    Vector x0(n, 0.0);
    std::size_t k = 1 + pick.next_below(m);
    for (std::size_t j = 0; j < k; ++j)
      x0[pick.next_below(n)] = pick.next_gaussian();
    Vector y = matvec(a, x0);

    Vector xhat = lp::l1_minimize(a, y);
    double obj = l1_norm(xhat);
    double ref = oracles::l1_oracle(a, y);
    CHECK(obj == doctest::Approx(ref).epsilon(1e-8));
    // feasibility
    Vector r = matvec(a, xhat);
    for (std::size_t i = 0; i < m; ++i)
      CHECK(std::fabs(r[i] - y[i]) < 1e-7 * (1.0 + std::fabs(y[i])));
    ++solved;
  }
  CHECK(solved == 120);
}

TEST_CASE("weighted l1 matches the oracle and responds to the weights") {
  Rng pick(77);
  for (int inst = 0; inst < 60; ++inst) {
    std::size_t m = 2 + pick.next_below(3);
    std::size_t n = m + 2 + pick.next_below(3);
    Matrix a = sample_gaussian_matrix(m, n, pick.next_u64());
    Vector x0(n, 0.0);
    x0[pick.next_below(n)] = 1.0 + pick.next_double();
    Vector y = matvec(a, x0);
    Vector w(n);
    for (double& v : w) v = 0.25 + 2.0 * pick.next_double();

    Vector xhat = lp::weighted_l1_minimize(a, y, w);
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += w[j] * std::fabs(xhat[j]);
    double ref = oracles::weighted_l1_oracle(a, y, w);
    CHECK(obj == doctest::Approx(ref).epsilon(1e-8));
  }

  // a large weight on one coordinate forces mass onto the alternative
  Matrix a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  Vector x = lp::weighted_l1_minimize(a, {2.0}, {1.0, 3.0});
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(0.0));
}

TEST_CASE("degenerate right-hand sides are handled") {
  Matrix a = sample_gaussian_matrix(3, 6, 5);
  Vector x = lp::l1_minimize(a, Vector(3, 0.0));
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("problem validation rejects malformed input") {
  lp::Problem p;
  p.c = {1.0, 1.0};
  p.eq_a = Matrix(1, 3);  // column mismatch
  p.eq_b = {0.0};
  p.lower = {0.0, 0.0};
  p.upper = {1.0, 1.0};
  CHECK_THROWS_AS(lp::solve(p), Error);

  lp::Problem q;
  q.c = {1.0};
  q.eq_a = Matrix(0, 1);
  q.lower = {2.0};
  q.upper = {1.0};  // crossed bounds
  CHECK_THROWS_AS(lp::solve(q), Error);
}
