#include "lp.hpp"

#include <algorithm>
#include <cmath>

namespace sparselab {
namespace lp {

void Problem::validate() const {
  const std::size_t n = c.size(), m = eq_b.size();
  require(lower.size() == n && upper.size() == n, Errc::invalid_argument,
          "LpProblem: bound vectors must match objective length");
  if (m > 0) {
    require(eq_a.rows == m && eq_a.cols == n, Errc::invalid_argument,
            "LpProblem: equality block shape mismatch");
  }
  for (std::size_t j = 0; j < n; ++j)
    require(lower[j] <= upper[j], Errc::invalid_argument,
            "LpProblem: lower bound exceeds upper bound");
  for (double v : c)
    require(std::isfinite(v), Errc::invalid_argument, "LpProblem: non-finite cost");
  for (double v : eq_b)
    require(std::isfinite(v), Errc::invalid_argument, "LpProblem: non-finite rhs");
}

namespace {

enum class VStat : unsigned char { AtLower, AtUpper, FreeZero, Basic };

constexpr double kPivotTol = 1e-10;
constexpr double kDegenTol = 1e-10;

class Simplex {
 public:
  explicit Simplex(const Problem& p)
      : p_(p), m_(p.eq_b.size()), ns_(p.c.size()), ntot_(ns_ + m_) {
    bscale_ = 1.0 + linf_norm(p.eq_b);
  }

  Solution run() {
    Solution sol;
    init();
    max_iter_ = 50 * (m_ + ns_);
    degen_switch_ = 5 * (m_ + ns_);

    // phase 1: minimize the artificial mass
    Vector cost1(ntot_, 0.0);
    for (std::size_t j = ns_; j < ntot_; ++j) cost1[j] = 1.0;
    Verdict v = iterate(cost1);
    sol.iterations = iters_;
    if (v == Verdict::IterLimit) return sol;  // status defaults to iteration_limit
    double art_mass = 0.0;
    for (std::size_t j = ns_; j < ntot_; ++j) art_mass += x_[j];
    if (art_mass > kFeasTol * bscale_) {
      sol.status = SolveStatus::infeasible;
      return sol;
    }
    drive_out_artificials();
    for (std::size_t j = ns_; j < ntot_; ++j) {
      lb_[j] = ub_[j] = 0.0;
      if (vs_[j] != VStat::Basic) {
        vs_[j] = VStat::AtLower;
        x_[j] = 0.0;
      }
    }

    // phase 2: the real objective
    Vector cost2(ntot_, 0.0);
    for (std::size_t j = 0; j < ns_; ++j) cost2[j] = p_.c[j];
    v = iterate(cost2);
    sol.iterations = iters_;
    if (v == Verdict::IterLimit) return sol;
    if (v == Verdict::Unbounded) {
      sol.status = SolveStatus::unbounded;
      return sol;
    }
    refactorize();  // tighten basic values before reporting
    sol.status = SolveStatus::optimal;
    sol.x.assign(x_.begin(), x_.begin() + ns_);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < ns_; ++j) sol.objective += p_.c[j] * sol.x[j];
    return sol;
  }

 private:
  enum class Verdict { Optimal, Unbounded, IterLimit };

  const Problem& p_;
  std::size_t m_, ns_, ntot_;
  double bscale_;
  std::vector<double> binv_;       // m x m
  std::vector<std::size_t> basis_; // var index per row
  std::vector<VStat> vs_;
  Vector x_, lb_, ub_;
  Vector art_sign_;
  std::size_t iters_ = 0, degen_ = 0, max_iter_ = 0, degen_switch_ = 0;
  std::size_t pivots_since_refactor_ = 0;
  const Vector* cost_ = nullptr;

  void column(std::size_t j, Vector& out) const {
    out.assign(m_, 0.0);
    if (j < ns_) {
      for (std::size_t i = 0; i < m_; ++i) out[i] = p_.eq_a(i, j);
    } else {
      out[j - ns_] = art_sign_[j - ns_];
    }
  }

  void init() {
    lb_ = p_.lower;
    ub_ = p_.upper;
    lb_.resize(ntot_, 0.0);
    ub_.resize(ntot_, kInf);
    x_.assign(ntot_, 0.0);
    vs_.assign(ntot_, VStat::AtLower);
    for (std::size_t j = 0; j < ns_; ++j) {
      if (std::isfinite(lb_[j])) {
        vs_[j] = VStat::AtLower;
        x_[j] = lb_[j];
      } else if (std::isfinite(ub_[j])) {
        vs_[j] = VStat::AtUpper;
        x_[j] = ub_[j];
      } else {
        vs_[j] = VStat::FreeZero;
        x_[j] = 0.0;
      }
    }
    // artificial basis holding the residual
    art_sign_.assign(m_, 1.0);
    basis_.resize(m_);
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double r = p_.eq_b[i];
      for (std::size_t j = 0; j < ns_; ++j) r -= p_.eq_a(i, j) * x_[j];
      art_sign_[i] = (r >= 0.0) ? 1.0 : -1.0;
      basis_[i] = ns_ + i;
      vs_[ns_ + i] = VStat::Basic;
      x_[ns_ + i] = std::fabs(r);
      binv_[i * m_ + i] = art_sign_[i];
    }
  }

  // y' = c_B' Binv
  void dual_prices(Vector& y) const {
    y.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double cb = (*cost_)[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = binv_.data() + i * m_;
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * row[k];
    }
  }

  double reduced_cost(const Vector& y, std::size_t j) const {
    double d = (*cost_)[j];
    if (j < ns_) {
      for (std::size_t i = 0; i < m_; ++i) d -= y[i] * p_.eq_a(i, j);
    } else {
      d -= y[j - ns_] * art_sign_[j - ns_];
    }
    return d;
  }

  Verdict iterate(const Vector& cost) {
    cost_ = &cost;
    Vector y, dir;
    for (;;) {
      if (iters_ >= max_iter_) return Verdict::IterLimit;
      bool bland = degen_ >= degen_switch_;
      dual_prices(y);

      // pricing
      std::size_t q = ntot_;
      double qviol = kReducedCostTol;
      int qdir = 0;
      for (std::size_t j = 0; j < ntot_; ++j) {
        if (vs_[j] == VStat::Basic) continue;
        if (lb_[j] == ub_[j]) continue;  // fixed
        double d = reduced_cost(y, j);
        double viol = 0.0;
        int sgn = 0;
        if (vs_[j] == VStat::AtLower && d < -kReducedCostTol) {
          viol = -d;
          sgn = +1;
        } else if (vs_[j] == VStat::AtUpper && d > kReducedCostTol) {
          viol = d;
          sgn = -1;
        } else if (vs_[j] == VStat::FreeZero && std::fabs(d) > kReducedCostTol) {
          viol = std::fabs(d);
          sgn = (d < 0.0) ? +1 : -1;
        }
        if (sgn == 0) continue;
        if (bland) {
          q = j;
          qdir = sgn;
          break;
        }
        if (viol > qviol) {
          qviol = viol;
          q = j;
          qdir = sgn;
        }
      }
      if (q == ntot_) return Verdict::Optimal;

      column(q, dir);
      Vector d = apply_binv(dir);

      // ratio test
      double tmax = kInf;
      std::size_t leave_row = m_;  // m_ = bound flip
      bool leave_to_upper = false;
      if (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) tmax = ub_[q] - lb_[q];
      for (std::size_t i = 0; i < m_; ++i) {
        double delta = -qdir * d[i];
        std::size_t bi = basis_[i];
        double limit = kInf;
        bool to_upper = false;
        if (delta < -kPivotTol) {
          if (std::isfinite(lb_[bi])) limit = (x_[bi] - lb_[bi]) / (-delta);
        } else if (delta > kPivotTol) {
          if (std::isfinite(ub_[bi])) {
            limit = (ub_[bi] - x_[bi]) / delta;
            to_upper = true;
          }
        }
        if (limit < 0.0) limit = 0.0;
        bool better;
        if (limit < tmax - 1e-12) {
          better = true;
        } else if (limit <= tmax + 1e-12 && leave_row < m_) {
          // tie: Bland -> smallest variable index; else largest pivot
          better = bland ? (bi < basis_[leave_row])
                         : (std::fabs(d[i]) > std::fabs(d[leave_row]));
        } else {
          better = false;
        }
        if (better) {
          tmax = std::min(tmax, limit);
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(tmax)) return Verdict::Unbounded;

      ++iters_;
      if (tmax < kDegenTol) ++degen_;

      // move
      for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= qdir * tmax * d[i];
      x_[q] += qdir * tmax;

      if (leave_row == m_) {
        // bound flip, basis unchanged
        vs_[q] = (qdir > 0) ? VStat::AtUpper : VStat::AtLower;
        x_[q] = (qdir > 0) ? ub_[q] : lb_[q];
        continue;
      }

      std::size_t lv = basis_[leave_row];
      vs_[lv] = leave_to_upper ? VStat::AtUpper : VStat::AtLower;
      x_[lv] = leave_to_upper ? ub_[lv] : lb_[lv];
      basis_[leave_row] = q;
      vs_[q] = VStat::Basic;
      update_binv(d, leave_row);
      if (++pivots_since_refactor_ >= 100) refactorize();
    }
  }

  Vector apply_binv(const Vector& v) const {
    Vector out(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = binv_.data() + i * m_;
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += row[k] * v[k];
      out[i] = s;
    }
    return out;
  }

  // Product-form update after pivoting row r with direction d = Binv a_q.
  void update_binv(const Vector& d, std::size_t r) {
    double piv = d[r];
    double* rr = binv_.data() + r * m_;
    for (std::size_t k = 0; k < m_; ++k) rr[k] /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || d[i] == 0.0) continue;
      double f = d[i];
      double* ri = binv_.data() + i * m_;
      for (std::size_t k = 0; k < m_; ++k) ri[k] -= f * rr[k];
    }
  }

  // Rebuild Binv from the basis by Gauss-Jordan with partial pivoting, then
  // recompute the basic values from the nonbasic ones.
  void refactorize() {
    pivots_since_refactor_ = 0;
    if (m_ == 0) return;
    std::vector<double> b(m_ * m_, 0.0), inv(m_ * m_, 0.0);
    Vector col;
    for (std::size_t j = 0; j < m_; ++j) {
      column(basis_[j], col);
      for (std::size_t i = 0; i < m_; ++i) b[i * m_ + j] = col[i];
    }
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t k = 0; k < m_; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < m_; ++i)
        if (std::fabs(b[i * m_ + k]) > std::fabs(b[piv * m_ + k])) piv = i;
      require(std::fabs(b[piv * m_ + k]) > 1e-14, Errc::internal,
              "simplex: singular basis during refactorization");
      if (piv != k)
        for (std::size_t c = 0; c < m_; ++c) {
          std::swap(b[piv * m_ + c], b[k * m_ + c]);
          std::swap(inv[piv * m_ + c], inv[k * m_ + c]);
        }
      double p = b[k * m_ + k];
      for (std::size_t c = 0; c < m_; ++c) {
        b[k * m_ + c] /= p;
        inv[k * m_ + c] /= p;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == k) continue;
        double f = b[i * m_ + k];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < m_; ++c) {
          b[i * m_ + c] -= f * b[k * m_ + c];
          inv[i * m_ + c] -= f * inv[k * m_ + c];
        }
      }
    }
    binv_ = std::move(inv);
    // x_B = Binv (b - A_N x_N)
    Vector rhs(p_.eq_b);
    for (std::size_t j = 0; j < ntot_; ++j) {
      if (vs_[j] == VStat::Basic || x_[j] == 0.0) continue;
      if (j < ns_) {
        for (std::size_t i = 0; i < m_; ++i) rhs[i] -= p_.eq_a(i, j) * x_[j];
      } else {
        rhs[j - ns_] -= art_sign_[j - ns_] * x_[j];
      }
    }
    Vector xb = apply_binv(rhs);
    for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
  }

  // Replace basic artificials with structural variables where possible; rows
  // where no pivot exists are redundant and keep a zero-fixed artificial.
  void drive_out_artificials() {
    Vector col, d;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < ns_) continue;
      std::size_t found = ntot_;
      for (std::size_t j = 0; j < ns_; ++j) {
        if (vs_[j] == VStat::Basic || lb_[j] == ub_[j]) continue;
        column(j, col);
        d = apply_binv(col);
        if (std::fabs(d[i]) > 1e-7) {
          found = j;
          break;
        }
      }
      if (found == ntot_) continue;  // redundant row
      std::size_t art = basis_[i];
      column(found, col);
      d = apply_binv(col);
      double entering_value = x_[found];
      basis_[i] = found;
      vs_[found] = VStat::Basic;
      vs_[art] = VStat::AtLower;
      x_[art] = 0.0;
      update_binv(d, i);
      x_[found] = entering_value;  // degenerate swap, values unchanged
      ++pivots_since_refactor_;
    }
    refactorize();
  }
};

}  // namespace

Solution solve(const Problem& p) {
  p.validate();
  Simplex s(p);
  return s.run();
}

Vector solve_or_throw(const Problem& p) {
  Solution s = solve(p);
  switch (s.status) {
    case SolveStatus::optimal:
      return s.x;
    case SolveStatus::infeasible:
      fail(Errc::infeasible, "LP infeasible");
    case SolveStatus::unbounded:
      fail(Errc::unbounded, "LP unbounded");
    default:
      fail(Errc::iteration_limit, "LP pivot limit exceeded");
  }
}

Problem l1_problem(const Matrix& a, const Vector& y, const Vector& weights) {
  const std::size_t m = a.rows, n = a.cols;
  require(y.size() == m, Errc::invalid_argument, "l1_problem: measurement length");
  require(weights.size() == n, Errc::invalid_argument, "l1_problem: weight length");
  for (double w : weights)
    require(w > 0.0 && std::isfinite(w), Errc::invalid_argument,
            "l1_problem: weights must be strictly positive");
  Problem p;
  p.c.resize(2 * n);
  for (std::size_t j = 0; j < n; ++j) p.c[j] = p.c[n + j] = weights[j];
  p.eq_a = Matrix(m, 2 * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      p.eq_a(i, j) = a(i, j);
      p.eq_a(i, n + j) = -a(i, j);
    }
  p.eq_b = y;
  p.lower.assign(2 * n, 0.0);
  p.upper.assign(2 * n, kInf);
  return p;
}

namespace {

Vector solve_l1_family(const Matrix& a, const Vector& y, const Vector& w) {
  Problem p = l1_problem(a, y, w);
  Vector uv = solve_or_throw(p);
  const std::size_t n = a.cols;
  Vector x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = uv[j] - uv[n + j];
  // feasibility contract
  Vector r = matvec(a, x);
  double viol = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) viol = std::max(viol, std::fabs(r[i] - y[i]));
  require(viol <= kFeasTol * (1.0 + linf_norm(y)), Errc::internal,
          "l1 solve: residual above feasibility tolerance");
  return x;
}

}  // namespace

Vector l1_minimize(const Matrix& a, const Vector& y) {
  return solve_l1_family(a, y, Vector(a.cols, 1.0));
}

Vector weighted_l1_minimize(const Matrix& a, const Vector& y, const Vector& weights) {
  return solve_l1_family(a, y, weights);
}

}  // namespace lp
}  // namespace sparselab
