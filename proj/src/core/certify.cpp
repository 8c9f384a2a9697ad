#include "certify.hpp"

#include <algorithm>
#include <cmath>

#include "lp.hpp"

namespace sparselab {
namespace certify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_set(const IndexSet& k_set, std::size_t n) {
  for (std::size_t i : k_set)
    require(i < n, Errc::invalid_argument, "certify: index out of range");
}

}  // namespace

double compute_kappa(const Matrix& a, const IndexSet& k_set) {
  const std::size_t n = a.cols;
  validate_set(k_set, n);
  if (k_set.empty()) return 0.0;
  require(k_set.size() <= kMaxExactSetSize, Errc::set_too_large,
          "compute_kappa: exact method limited to |K| <= 16");
  Matrix nb = null_space_basis(a);  // throws rank_deficient
  const std::size_t d = nb.cols;
  if (d == 0) return 0.0;  // trivial null space, empty maximization
  IndexSet kbar = complement(k_set, n);
  const std::size_t kb = kbar.size();
  if (kb == 0) return kInf;

  // variables: z (free, d) | p (kb) | q (kb) | slack (1)
  const std::size_t nv = d + 2 * kb + 1;
  lp::Problem p;
  p.c.assign(nv, 0.0);
  p.lower.assign(nv, 0.0);
  p.upper.assign(nv, lp::kInf);
  for (std::size_t j = 0; j < d; ++j) p.lower[j] = -lp::kInf;
  p.eq_a = Matrix(kb + 1, nv);
  p.eq_b.assign(kb + 1, 0.0);
  for (std::size_t r = 0; r < kb; ++r) {
    for (std::size_t j = 0; j < d; ++j) p.eq_a(r, j) = nb(kbar[r], j);
    p.eq_a(r, d + r) = -1.0;       // p_r
    p.eq_a(r, d + kb + r) = 1.0;   // q_r
  }
  for (std::size_t r = 0; r < kb; ++r) {
    p.eq_a(kb, d + r) = 1.0;
    p.eq_a(kb, d + kb + r) = 1.0;
  }
  p.eq_a(kb, d + 2 * kb) = 1.0;  // slack
  p.eq_b[kb] = 1.0;

  double best = 0.0;
  const std::size_t patterns = std::size_t(1) << k_set.size();
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    // maximize sum_i s_i (N z)_i over K  ==  minimize the negated cost on z
    for (std::size_t j = 0; j < d; ++j) {
      double cz = 0.0;
      for (std::size_t t = 0; t < k_set.size(); ++t) {
        double s = (mask >> t) & 1 ? 1.0 : -1.0;
        cz += s * nb(k_set[t], j);
      }
      p.c[j] = -cz;
    }
    lp::Solution sol = lp::solve(p);
    if (sol.status == lp::SolveStatus::unbounded) return kInf;
    require(sol.status == lp::SolveStatus::optimal, Errc::iteration_limit,
            "compute_kappa: LP did not reach optimality");
    best = std::max(best, -sol.objective);
  }
  return best;
}

RobustnessCheck check_weak_robustness(const Matrix& a, const IndexSet& k_set,
                                      const Vector& x_k, double c) {
  const std::size_t n = a.cols;
  validate_set(k_set, n);
  require(x_k.size() == k_set.size(), Errc::invalid_argument,
          "check_weak_robustness: x_K length must match |K|");
  require(c > 1.0, Errc::invalid_argument, "check_weak_robustness: need C > 1");
  if (k_set.empty()) return {true, 0.0};

  Matrix nb = null_space_basis(a);
  const std::size_t d = nb.cols;
  const double xk_l1 = l1_norm(x_k);
  if (d == 0) return {true, 0.0};  // only w = 0

  IndexSet kbar = complement(k_set, n);
  const std::size_t kk = k_set.size(), kb = kbar.size();
  const double radius = 10.0 * (1.0 + xk_l1) * c;

  // variables: z (box, d) | p,q over K | r,s over Kbar
  const std::size_t nv = d + 2 * kk + 2 * kb;
  lp::Problem p;
  p.c.assign(nv, 0.0);
  p.lower.assign(nv, 0.0);
  p.upper.assign(nv, lp::kInf);
  for (std::size_t j = 0; j < d; ++j) {
    p.lower[j] = -radius;
    p.upper[j] = radius;
  }
  for (std::size_t t = 0; t < 2 * kk; ++t) p.c[d + t] = 1.0;
  for (std::size_t t = 0; t < 2 * kb; ++t) p.c[d + 2 * kk + t] = 1.0 / c;

  p.eq_a = Matrix(kk + kb, nv);
  p.eq_b.assign(kk + kb, 0.0);
  for (std::size_t r = 0; r < kk; ++r) {
    // x_i + (N z)_i = p_r - q_r
    for (std::size_t j = 0; j < d; ++j) p.eq_a(r, j) = nb(k_set[r], j);
    p.eq_a(r, d + r) = -1.0;
    p.eq_a(r, d + kk + r) = 1.0;
    p.eq_b[r] = -x_k[r];
  }
  for (std::size_t r = 0; r < kb; ++r) {
    for (std::size_t j = 0; j < d; ++j) p.eq_a(kk + r, j) = nb(kbar[r], j);
    p.eq_a(kk + r, d + 2 * kk + r) = -1.0;
    p.eq_a(kk + r, d + 2 * kk + kb + r) = 1.0;
  }

  Vector sol = lp::solve_or_throw(p);
  double obj = 0.0;
  for (std::size_t j = 0; j < nv; ++j) obj += p.c[j] * sol[j];
  RobustnessCheck out;
  out.margin = obj - xk_l1;
  out.holds = out.margin >= -kMarginTol;
  return out;
}

double estimate_best_c(const Matrix& a, const IndexSet& k_set, const Vector& x_k) {
  if (k_set.empty()) return kInf;
  double lo = 1.0 + kBestCResolution;
  if (!check_weak_robustness(a, k_set, x_k, lo).holds) return 1.0;
  double hi = kBestCMax;
  if (check_weak_robustness(a, k_set, x_k, hi).holds) return kInf;
  while (hi - lo > kBestCResolution) {
    double mid = 0.5 * (lo + hi);
    if (check_weak_robustness(a, k_set, x_k, mid).holds)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double recovery_error_bound(double c, double kappa, double tail_mass) {
  require(c > 1.0, Errc::invalid_argument, "recovery_error_bound: need C > 1");
  require(kappa >= 0.0, Errc::invalid_argument, "recovery_error_bound: need kappa >= 0");
  require(tail_mass >= 0.0, Errc::invalid_argument,
          "recovery_error_bound: need nonnegative tail mass");
  return 2.0 * c * (1.0 + kappa) / (c - 1.0) * tail_mass;
}

SupportErrorBound support_error_bound(double c, double kappa, double a1, double delta) {
  require(c > 1.0, Errc::invalid_argument, "support_error_bound: need C > 1");
  require(a1 > 0.0, Errc::invalid_argument, "support_error_bound: need a1 > 0");
  require(kappa >= 0.0 && delta >= 0.0, Errc::invalid_argument,
          "support_error_bound: invalid kappa or delta");
  SupportErrorBound b{0.0, c, kappa, a1, delta};
  b.value = 4.0 * c * (1.0 + kappa) * delta / ((c - 1.0) * a1);
  return b;
}

namespace {

ProbabilityBound clamp01(double raw) {
  ProbabilityBound b{raw, false, raw};
  if (raw < 0.0) {
    b.value = 0.0;
    b.clamped = true;
  } else if (raw > 1.0) {
    b.value = 1.0;
    b.clamped = true;
  }
  return b;
}

}  // namespace

ProbabilityBound p1_lower_bound(double c, double kappa, double a1, double delta,
                                double rho_f, double delta_m, std::size_t n) {
  require(c > 1.0 && a1 > 0.0 && kappa >= 0.0 && delta >= 0.0, Errc::invalid_argument,
          "p1_lower_bound: invalid certificate parameters");
  require(rho_f > 0.0 && delta_m > 0.0 && n > 0, Errc::invalid_argument,
          "p1_lower_bound: denominator parameters must be positive");
  double raw = 1.0 - 4.0 * c * (kappa + 1.0) / ((c - 1.0) * a1 * rho_f * delta_m) *
                         (delta / static_cast<double>(n));
  return clamp01(raw);
}

ProbabilityBound p2_upper_bound(std::size_t k_total, double eps, double rho_f,
                                double delta_m, std::size_t n, double c,
                                double kappa, double a1, double delta) {
  require(c > 1.0 && a1 > 0.0 && kappa >= 0.0 && delta >= 0.0, Errc::invalid_argument,
          "p2_upper_bound: invalid certificate parameters");
  require(eps >= 0.0 && eps < 1.0, Errc::invalid_argument,
          "p2_upper_bound: eps must be in [0,1)");
  require(rho_f > 0.0 && delta_m > 0.0 && n > 0, Errc::invalid_argument,
          "p2_upper_bound: fractions must be positive");
  double block = (1.0 - eps) * rho_f * delta_m * static_cast<double>(n);
  double denom = static_cast<double>(n) - block;
  require(denom > 0.0, Errc::invalid_argument,
          "p2_upper_bound: first block covers the whole signal");
  double miss = 4.0 * c * (kappa + 1.0) * delta / ((c - 1.0) * a1);
  double raw = (static_cast<double>(k_total) - block + miss) / denom;
  return clamp01(raw);
}

}  // namespace certify
}  // namespace sparselab
