#ifndef SPARSELAB_CERTIFY_HPP
#define SPARSELAB_CERTIFY_HPP

#include "numcore.hpp"

namespace sparselab {
namespace certify {

// Largest |K| accepted by the exact sign-enumeration kappa computation.
constexpr std::size_t kMaxExactSetSize = 16;
// Robustness margin acceptance cutoff.
constexpr double kMarginTol = 1e-8;
// Ceiling and resolution of the best-C bisection.
constexpr double kBestCMax = 1e6;
constexpr double kBestCResolution = 1e-3;

struct RobustnessCheck {
  bool holds = false;
  double margin = 0.0;  // min over the null space of LHS - RHS of the condition
};

// kappa = max ||w_K||_1 / ||w_Kbar||_1 over nonzero null vectors of A.
// Exact: one LP per sign pattern of w_K (2^|K| of them); +inf when some
// pattern is unbounded (A_K column-rank deficient) or Kbar is empty.
double compute_kappa(const Matrix& a, const IndexSet& k_set);

// Null-space condition ||x_K + w_K||_1 + ||w_Kbar||_1/C >= ||x_K||_1 for all
// w with Aw = 0; checked by minimizing the convex piecewise-linear gap over
// w = N z with |z_j| <= 10 * (1 + ||x_K||_1) * C, which covers every possible
// violating direction. x_k lists the signal values on k_set, in set order.
RobustnessCheck check_weak_robustness(const Matrix& a, const IndexSet& k_set,
                                      const Vector& x_k, double c);

// Largest C in (1, kBestCMax] for which the condition holds, to within
// kBestCResolution; +inf if it holds at the ceiling, 1.0 when it already
// fails at C -> 1+.
double estimate_best_c(const Matrix& a, const IndexSet& k_set, const Vector& x_k);

// 2C(1+kappa)/(C-1) * tail_mass
double recovery_error_bound(double c, double kappa, double tail_mass);

struct SupportErrorBound {
  double value;
  double c, kappa, a1, delta;
};

// 4C(1+kappa)Delta / ((C-1) a1): cap on how many selected indices can fall
// outside the true support.
SupportErrorBound support_error_bound(double c, double kappa, double a1, double delta);

struct ProbabilityBound {
  double value;    // clamped to [0,1]
  bool clamped;
  double raw;
};

// P1 >= 1 - 4C(kappa+1) / ((C-1) a1 rho_f delta_m) * (Delta / n)
ProbabilityBound p1_lower_bound(double c, double kappa, double a1, double delta,
                                double rho_f, double delta_m, std::size_t n);

// P2 <= (k_total - (1-eps) rho_f delta_m n + 4C(kappa+1)Delta/((C-1)a1))
//        / (n - (1-eps) rho_f delta_m n)
ProbabilityBound p2_upper_bound(std::size_t k_total, double eps, double rho_f,
                                double delta_m, std::size_t n, double c,
                                double kappa, double a1, double delta);

}  // namespace certify
}  // namespace sparselab

#endif
