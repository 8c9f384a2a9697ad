#ifndef SPARSELAB_LP_HPP
#define SPARSELAB_LP_HPP

#include <cstddef>
#include <limits>

#include "numcore.hpp"

namespace sparselab {
namespace lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Feasibility is checked relative to 1 + ||b||_inf; reduced-cost cutoff is
// absolute. All downstream contracts cite these two numbers.
constexpr double kFeasTol = 1e-8;
constexpr double kReducedCostTol = 1e-9;

// min c'x  s.t.  eq_a x = eq_b,  lower <= x <= upper (entries may be +-inf).
struct Problem {
  Vector c;
  Matrix eq_a;  // may have 0 rows
  Vector eq_b;
  Vector lower;
  Vector upper;

  std::size_t num_vars() const { return c.size(); }
  void validate() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
  SolveStatus status = SolveStatus::iteration_limit;
  Vector x;  // meaningful when optimal
  double objective = 0.0;
  std::size_t iterations = 0;
};

// Two-phase primal simplex on bounded variables, dense explicit basis
// inverse, Dantzig pricing with a Bland fallback after 5*(rows+cols)
// degenerate pivots, hard cap of 50*(rows+cols) pivots.
Solution solve(const Problem& p);

// Same, but throws Errc::iteration_limit / infeasible / unbounded instead of
// returning those verdicts.
Vector solve_or_throw(const Problem& p);

// Basis-pursuit LP: split x = u - v, u,v >= 0, minimize sum w_i (u_i + v_i)
// subject to A(u - v) = y.
Problem l1_problem(const Matrix& a, const Vector& y, const Vector& weights);

// argmin ||x||_1 s.t. Ax = y.
Vector l1_minimize(const Matrix& a, const Vector& y);
// argmin sum_i w_i |x_i| s.t. Ax = y; all w_i > 0.
Vector weighted_l1_minimize(const Matrix& a, const Vector& y, const Vector& weights);

}  // namespace lp
}  // namespace sparselab

#endif
