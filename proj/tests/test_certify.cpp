#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/certify.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace sparselab;
using namespace sparselab::certify;

namespace {

Matrix row_matrix(std::initializer_list<double> row) {
  Matrix a(1, row.size());
  std::size_t j = 0;
  for (double v : row) a(0, j++) = v;
  return a;
}

}  // namespace

TEST_CASE("kappa on hand-solvable 1x2 matrices") {
  // null space of [1, 1] is spanned by (1, -1): ratio |w_0|/|w_1| = 1
  CHECK(compute_kappa(row_matrix({1.0, 1.0}), {0}) == doctest::Approx(1.0).epsilon(1e-9));
  // null space of [1, 2] is spanned by (2, -1): ratio = 2
  CHECK(compute_kappa(row_matrix({1.0, 2.0}), {0}) == doctest::Approx(2.0).epsilon(1e-9));
  // complementary set flips the ratio
  CHECK(compute_kappa(row_matrix({1.0, 2.0}), {1}) == doctest::Approx(0.5).epsilon(1e-9));
  // empty K: numerator vanishes
  CHECK(compute_kappa(row_matrix({1.0, 2.0}), {}) == 0.0);
  // K = everything: denominator vanishes
  CHECK(std::isinf(compute_kappa(row_matrix({1.0, 2.0}), {0, 1})));
}

TEST_CASE("kappa is infinite when the K columns are dependent in the null space") {
  // A = [1, 0, 0]: null vectors are (0, s, t); K = {1} gives unbounded ratio
  Matrix a(1, 3);
  a(0, 0) = 1.0;
  CHECK(std::isinf(compute_kappa(a, {1})));
  // but K = {0} pins w_0 = 0
  CHECK(compute_kappa(a, {0}) == doctest::Approx(0.0));
}

TEST_CASE("kappa matches the null-sphere grid oracle on random instances") {
  Rng pick(314);
  int done = 0;
  while (done < 40) {
    std::size_t n = 4 + pick.next_below(7);               // 4..10
    std::size_t d = 1 + pick.next_below(3);               // null dim 1..3
    std::size_t m = n - d;
    Matrix a = sample_gaussian_matrix(m, n, pick.next_u64());
    std::size_t ksz = 1 + pick.next_below(std::min<std::size_t>(3, n - d));
    IndexSet k;
    for (std::size_t i = 0; i < ksz; ++i) k.push_back(i);  // generic anyway
    double exact = compute_kappa(a, k);
    if (!std::isfinite(exact)) continue;
    double grid = oracles::kappa_oracle(a, k);
    REQUIRE(std::isfinite(grid));
    CHECK(std::fabs(exact - grid) <= 0.02 * std::max(exact, 1e-9));
    ++done;
  }
}

TEST_CASE("kappa set-size guard") {
  Matrix a = sample_gaussian_matrix(4, 24, 1);
  IndexSet big;
  for (std::size_t i = 0; i < kMaxExactSetSize + 1; ++i) big.push_back(i);
  CHECK_THROWS_AS(compute_kappa(a, big), Error);
}

TEST_CASE("weak robustness on a hand case") {
  // A = [1, 1], K = {0}, x_K = 5. Null vectors w = t(1,-1):
  // |5 + t| + |t|/C - 5 is minimized at t = -5: 5/C - 5 < 0 for C > 1.
  Matrix a = row_matrix({1.0, 1.0});
  auto rc = check_weak_robustness(a, {0}, {5.0}, 2.0);
  CHECK_FALSE(rc.holds);
  CHECK(rc.margin == doctest::Approx(-2.5).epsilon(1e-6));
  // C close to 1 makes the condition easy
  auto rc2 = check_weak_robustness(a, {0}, {5.0}, 1.0 + 1e-9);
  CHECK(rc2.holds);
}

TEST_CASE("robustness margin matches the ray-search oracle") {
  Rng pick(2718);
  int done = 0;
  while (done < 15) {
    std::size_t n = 5 + pick.next_below(4);  // 5..8
    std::size_t d = 1 + pick.next_below(2);  // null dim 1..2
    Matrix a = sample_gaussian_matrix(n - d, n, pick.next_u64());
    IndexSet k{0, 1};
    Vector xk{1.0 + pick.next_double(), -(1.0 + pick.next_double())};
    double c = 1.5 + pick.next_double();
    auto rc = check_weak_robustness(a, k, xk, c);
    double ref = oracles::robustness_margin_oracle(a, k, xk, c);
    CHECK(rc.margin == doctest::Approx(ref).epsilon(1e-3));
    CHECK(rc.holds == (rc.margin >= -kMarginTol));
    ++done;
  }
}

TEST_CASE("margin is non-increasing in C and best_c is a crossing point") {
  Rng pick(99);
  for (int inst = 0; inst < 8; ++inst) {
    Matrix a = sample_gaussian_matrix(6, 8, pick.next_u64());
    IndexSet k{0, 2};
    Vector xk{2.0, -1.5};
    double m_low = check_weak_robustness(a, k, xk, 1.2).margin;
    double m_high = check_weak_robustness(a, k, xk, 5.0).margin;
    CHECK(m_low >= m_high - 1e-9);

    double best = estimate_best_c(a, k, xk);
    if (best > 1.0 + kBestCResolution && std::isfinite(best)) {
      CHECK(check_weak_robustness(a, k, xk, best - kBestCResolution).holds);
      CHECK_FALSE(check_weak_robustness(a, k, xk, best + 2 * kBestCResolution).holds);
    }
  }
}

TEST_CASE("best_c sentinels") {
  // K covering everything with nonzero x fails immediately: w can cancel x_K
  Matrix a = row_matrix({1.0, 1.0});
  CHECK(estimate_best_c(a, {0}, {5.0}) == doctest::Approx(1.0));
  // no null space at all: the condition holds vacuously for any C
  Matrix sq(2, 2);
  sq(0, 0) = 1.0;
  sq(1, 1) = 1.0;
  CHECK(std::isinf(estimate_best_c(sq, {0}, {1.0})));
}

TEST_CASE("closed-form bounds evaluate to their formulas") {
  CHECK(recovery_error_bound(2.0, 0.5, 0.3) ==
        doctest::Approx(2.0 * 2.0 * 1.5 / 1.0 * 0.3));
  auto sb = support_error_bound(3.0, 1.0, 2.0, 0.5);
  CHECK(sb.value == doctest::Approx(4.0 * 3.0 * 2.0 * 0.5 / (2.0 * 2.0)));
  CHECK(sb.c == 3.0);
  CHECK_THROWS_AS(recovery_error_bound(1.0, 0.5, 0.3), Error);  // C must be > 1
  CHECK_THROWS_AS(support_error_bound(2.0, 0.5, 0.0, 0.1), Error);  // a1 > 0
}

TEST_CASE("probability bounds clamp into [0,1] and report it") {
  // generous parameters: raw P1 bound above 0, no clamping
  auto p1 = p1_lower_bound(3.0, 0.5, 1.0, 0.01, 0.4, 0.555, 1000);
  CHECK(p1.value >= 0.0);
  CHECK(p1.value <= 1.0);
  CHECK(p1.value == doctest::Approx(p1.raw).epsilon(1e-12));
  CHECK_FALSE(p1.clamped);

  // enormous tail mass drives the raw bound negative, so it clamps at 0
  auto p1c = p1_lower_bound(3.0, 0.5, 1.0, 1e9, 0.4, 0.555, 1000);
  CHECK(p1c.value == 0.0);
  CHECK(p1c.clamped);
  CHECK(p1c.raw < 0.0);

  auto p2 = p2_upper_bound(50, 0.01, 0.4, 0.555, 1000, 3.0, 0.5, 1.0, 0.01);
  CHECK(p2.value >= 0.0);
  CHECK(p2.value <= 1.0);
}
