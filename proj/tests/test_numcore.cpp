#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/numcore.hpp"
#include "core/rng.hpp"

using namespace sparselab;

TEST_CASE("gaussian matrix is deterministic in the seed") {
  Matrix a = sample_gaussian_matrix(4, 7, 123);
  Matrix b = sample_gaussian_matrix(4, 7, 123);
  Matrix c = sample_gaussian_matrix(4, 7, 124);
  CHECK(a.a == b.a);
  CHECK(a.a != c.a);
  CHECK(a.rows == 4);
  CHECK(a.cols == 7);
}

TEST_CASE("gaussian matrix entries have plausible first moments") {
  Matrix a = sample_gaussian_matrix(150, 280, 9);
  double mean = 0.0, var = 0.0;
  for (double v : a.a) mean += v;
  mean /= static_cast<double>(a.a.size());
  for (double v : a.a) var += (v - mean) * (v - mean);
  var /= static_cast<double>(a.a.size());
  CHECK(std::fabs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("null space basis annihilates A and is orthonormal") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Matrix a = sample_gaussian_matrix(5, 9, seed);
    Matrix n = null_space_basis(a);
    REQUIRE(n.rows == 9);
    REQUIRE(n.cols == 4);
    // ||A N||_max
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t j = 0; j < n.cols; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 9; ++k) s += a(i, k) * n(k, j);
        CHECK(std::fabs(s) < 1e-12);
      }
    // N^T N = I
    for (std::size_t p = 0; p < n.cols; ++p)
      for (std::size_t q = 0; q < n.cols; ++q) {
        double s = 0.0;
        for (std::size_t k = 0; k < 9; ++k) s += n(k, p) * n(k, q);
        CHECK(std::fabs(s - (p == q ? 1.0 : 0.0)) < 1e-12);
      }
  }
}

TEST_CASE("null space basis rejects rank-deficient input") {
  Matrix a(2, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    a(0, j) = static_cast<double>(j + 1);
    a(1, j) = 2.0 * static_cast<double>(j + 1);  // duplicate row
  }
  CHECK_THROWS_AS(null_space_basis(a), Error);
  CHECK(numerical_rank(a) == 1);
}

TEST_CASE("numerical rank on constructed examples") {
  Matrix id(3, 3);
  id(0, 0) = id(1, 1) = id(2, 2) = 1.0;
  CHECK(numerical_rank(id) == 3);

  Matrix z(3, 5);
  CHECK(numerical_rank(z) == 0);

  Matrix g = sample_gaussian_matrix(4, 6, 11);
  CHECK(numerical_rank(g) == 4);
}

TEST_CASE("vector helpers on hand values") {
  Vector v{3.0, -4.0, 0.0, 1.5};
  CHECK(l1_norm(v) == doctest::Approx(8.5));
  CHECK(linf_norm(v) == doctest::Approx(4.0));
  CHECK(l2_norm(v) == doctest::Approx(std::sqrt(9.0 + 16.0 + 2.25)));
  CHECK(restricted_l1(v, {0, 3}) == doctest::Approx(4.5));
  CHECK_THROWS_AS(restricted_l1(v, {7}), Error);

  IndexSet s{1, 3};
  IndexSet comp = complement(s, 5);
  CHECK(comp == IndexSet{0, 2, 4});
  CHECK(support(v) == IndexSet{0, 1, 3});
  CHECK(support(v, 2.0) == IndexSet{0, 1});
}

TEST_CASE("matvec against direct expansion") {
  Matrix a(2, 3);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(0, 2) = 3;
  a(1, 0) = -1;
  a(1, 1) = 0;
  a(1, 2) = 4;
  Vector y = matvec(a, {1.0, -1.0, 2.0});
  CHECK(y[0] == doctest::Approx(5.0));
  CHECK(y[1] == doctest::Approx(7.0));
}

TEST_CASE("rng streams are schedule independent") {
  Rng a(Rng::derive(42, 7));
  Rng b(Rng::derive(42, 7));
  Rng c(Rng::derive(42, 8));
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  Rng u(5);
  for (int i = 0; i < 1000; ++i) {
    double d = u.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
  }
}
