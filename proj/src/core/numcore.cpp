#include "numcore.hpp"

#include <algorithm>
#include <cmath>

namespace sparselab {

Matrix sample_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  require(m >= 1 && m < n, Errc::invalid_argument,
          "sample_gaussian_matrix: need 1 <= m < n");
  Rng rng(Rng::derive(seed, 0x6d6174726978ULL));
  Matrix a(m, n);
  for (double& v : a.a) v = rng.next_gaussian();
  return a;
}

namespace {

// Householder QR with column pivoting, in place on b (nr x nc, nr >= nc is
// not required). Returns the numerical rank; reflectors are stored in the
// lower part of b plus vhead. Threshold: 1e-10 * largest initial column norm.
struct PivotedQr {
  Matrix b;                       // reflector storage
  std::vector<double> vhead;      // leading entry of each reflector
  std::size_t rank = 0;
};

PivotedQr qr_col_pivot(Matrix b) {
  const std::size_t nr = b.rows, nc = b.cols;
  PivotedQr out;
  std::vector<double> colnorm(nc, 0.0);
  double maxnorm = 0.0;
  for (std::size_t j = 0; j < nc; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < nr; ++i) s += b(i, j) * b(i, j);
    colnorm[j] = std::sqrt(s);
    maxnorm = std::max(maxnorm, colnorm[j]);
  }
  const double tol = 1e-10 * maxnorm;
  const std::size_t kmax = std::min(nr, nc);
  out.vhead.assign(kmax, 0.0);

  for (std::size_t k = 0; k < kmax; ++k) {
    // recompute trailing column norms (cheap at desk scale, no drift)
    std::size_t best = k;
    double bestnorm = -1.0;
    for (std::size_t j = k; j < nc; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < nr; ++i) s += b(i, j) * b(i, j);
      double nrm = std::sqrt(s);
      if (nrm > bestnorm) {
        bestnorm = nrm;
        best = j;
      }
    }
    if (bestnorm <= tol) break;
    if (best != k)
      for (std::size_t i = 0; i < nr; ++i) std::swap(b(i, k), b(i, best));

    // Householder reflector annihilating b(k+1.., k)
    double alpha = (b(k, k) >= 0.0) ? -bestnorm : bestnorm;
    double v0 = b(k, k) - alpha;
    double vnorm2 = v0 * v0;
    for (std::size_t i = k + 1; i < nr; ++i) vnorm2 += b(i, k) * b(i, k);
    if (vnorm2 > 0.0) {
      for (std::size_t j = k + 1; j < nc; ++j) {
        double dot = v0 * b(k, j);
        for (std::size_t i = k + 1; i < nr; ++i) dot += b(i, k) * b(i, j);
        double f = 2.0 * dot / vnorm2;
        b(k, j) -= f * v0;
        for (std::size_t i = k + 1; i < nr; ++i) b(i, j) -= f * b(i, k);
      }
    }
    b(k, k) = alpha;  // diagonal of R; reflector tail stays below
    out.vhead[k] = v0;
    out.rank = k + 1;
  }
  out.b = std::move(b);
  return out;
}

// y <- H_k y for the k-th stored reflector.
void apply_reflector(const PivotedQr& f, std::size_t k, Vector& y) {
  const std::size_t nr = f.b.rows;
  double v0 = f.vhead[k];
  double vnorm2 = v0 * v0;
  for (std::size_t i = k + 1; i < nr; ++i) vnorm2 += f.b(i, k) * f.b(i, k);
  if (vnorm2 == 0.0) return;
  double dot = v0 * y[k];
  for (std::size_t i = k + 1; i < nr; ++i) dot += f.b(i, k) * y[i];
  double s = 2.0 * dot / vnorm2;
  y[k] -= s * v0;
  for (std::size_t i = k + 1; i < nr; ++i) y[i] -= s * f.b(i, k);
}

}  // namespace

std::size_t numerical_rank(const Matrix& a) {
  // factor the taller orientation
  if (a.rows >= a.cols) return qr_col_pivot(a).rank;
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return qr_col_pivot(std::move(t)).rank;
}

Matrix null_space_basis(const Matrix& a) {
  const std::size_t m = a.rows, n = a.cols;
  require(m >= 1 && n >= 1, Errc::invalid_argument, "null_space_basis: empty matrix");
  require(m <= n, Errc::invalid_argument, "null_space_basis: more rows than columns");
  Matrix t(n, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) t(j, i) = a(i, j);
  PivotedQr f = qr_col_pivot(std::move(t));
  require(f.rank == m, Errc::rank_deficient,
          "null_space_basis: numerical rank " + std::to_string(f.rank) +
              " < " + std::to_string(m));
  // Columns m..n-1 of Q span the orthogonal complement of col(A^T).
  Matrix nb(n, n - m);
  Vector y(n);
  for (std::size_t j = 0; j < n - m; ++j) {
    std::fill(y.begin(), y.end(), 0.0);
    y[m + j] = 1.0;
    for (std::size_t k = m; k-- > 0;) apply_reflector(f, k, y);
    for (std::size_t i = 0; i < n; ++i) nb(i, j) = y[i];
  }
  return nb;
}

Vector matvec(const Matrix& a, const Vector& x) {
  require(x.size() == a.cols, Errc::invalid_argument, "matvec: size mismatch");
  Vector y(a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    const double* row = a.a.data() + i * a.cols;
    for (std::size_t j = 0; j < a.cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

double l1_norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

double restricted_l1(const Vector& v, const IndexSet& s) {
  double r = 0.0;
  for (std::size_t i : s) {
    require(i < v.size(), Errc::invalid_argument, "restricted_l1: index out of range");
    r += std::fabs(v[i]);
  }
  return r;
}

double linf_norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::fabs(x));
  return s;
}

double l2_norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double s = 0.0;
  for (double x : a.a) s = std::max(s, std::fabs(x));
  return s;
}

IndexSet complement(const IndexSet& s, std::size_t n) {
  std::vector<bool> in(n, false);
  for (std::size_t i : s)
    if (i < n) in[i] = true;
  IndexSet out;
  out.reserve(n - s.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

IndexSet support(const Vector& v, double tol) {
  IndexSet out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::fabs(v[i]) > tol) out.push_back(i);
  return out;
}

}  // namespace sparselab
