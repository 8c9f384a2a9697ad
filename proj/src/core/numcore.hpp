#ifndef SPARSELAB_NUMCORE_HPP
#define SPARSELAB_NUMCORE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace sparselab {

using Vector = std::vector<double>;
using IndexSet = std::vector<std::size_t>;  // 0-based, kept sorted

// Dense row-major real matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // rows * cols entries

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// m x n matrix of i.i.d. standard normals; deterministic given seed.
Matrix sample_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

// Orthonormal basis N (n x (n-m)) of the null space of A; requires numerical
// full row rank, otherwise throws Errc::rank_deficient. The rank decision
// uses pivoted Householder QR of A^T with threshold 1e-10 * (largest column
// norm of A^T).
Matrix null_space_basis(const Matrix& a);

// Numerical rank by the same pivoted factorization.
std::size_t numerical_rank(const Matrix& a);

Vector matvec(const Matrix& a, const Vector& x);

double l1_norm(const Vector& v);
// Sum of |v_i| over S; throws Errc::invalid_argument on an out-of-range index.
double restricted_l1(const Vector& v, const IndexSet& s);

double linf_norm(const Vector& v);
double l2_norm(const Vector& v);
double max_abs(const Matrix& a);
IndexSet complement(const IndexSet& s, std::size_t n);
IndexSet support(const Vector& v, double tol = 0.0);

}  // namespace sparselab

#endif
