#include "recover.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lp.hpp"

namespace sparselab {
namespace recover {

namespace {

double weighted_objective(const Vector& x, const Vector& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::fabs(x[i]);
  return s;
}

double residual_inf(const Matrix& a, const Vector& x, const Vector& y) {
  Vector ax = matvec(a, x);
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::fabs(ax[i] - y[i]));
  return r;
}

}  // namespace

IndexSet select_top_k(const Vector& v, std::size_t k) {
  require(k <= v.size(), Errc::invalid_argument, "select_top_k: k exceeds length");
  IndexSet idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    double fa = std::fabs(v[a]), fb = std::fabs(v[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

RecoveryResult solve_l1(const Matrix& a, const Vector& y) {
  RecoveryResult r;
  r.estimate = lp::l1_minimize(a, y);
  r.stage_estimates.push_back(r.estimate);
  r.residual = residual_inf(a, r.estimate, y);
  r.objective = l1_norm(r.estimate);
  return r;
}

RecoveryResult reweight_candes(const Matrix& a, const Vector& y, double eps_prime,
                               std::size_t t_max) {
  require(eps_prime > 0.0, Errc::invalid_argument,
          "reweight_candes: eps_prime must be positive");
  const std::size_t n = a.cols;
  RecoveryResult r;
  Vector w(n, 1.0);
  Vector x = lp::weighted_l1_minimize(a, y, w);
  r.stage_estimates.push_back(x);
  for (std::size_t t = 0; t < t_max; ++t) {
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / (std::fabs(x[i]) + eps_prime);
    Vector next = lp::weighted_l1_minimize(a, y, w);
    r.stage_estimates.push_back(next);
    double move = 0.0;
    for (std::size_t i = 0; i < n; ++i) move = std::max(move, std::fabs(next[i] - x[i]));
    x = std::move(next);
    if (move <= 1e-9) break;
  }
  r.estimate = x;
  r.residual = residual_inf(a, r.estimate, y);
  if (r.stage_estimates.size() == 1) {
    r.objective = l1_norm(r.estimate);  // no reweighted solve happened
  } else {
    r.objective = weighted_objective(r.estimate, w);
  }
  return r;
}

RecoveryResult reweight_modified(const Matrix& a, const Vector& y,
                                 std::size_t k_strong, double w) {
  require(k_strong <= a.cols, Errc::invalid_argument,
          "reweight_modified: k_strong exceeds signal length");
  require(w >= 1.0, Errc::invalid_argument, "reweight_modified: weight must be >= 1");
  RecoveryResult r;
  Vector x0 = lp::l1_minimize(a, y);
  r.stage_estimates.push_back(x0);
  r.selected_set = select_top_k(x0, k_strong);
  Vector weights(a.cols, w);
  for (std::size_t i : r.selected_set) weights[i] = 1.0;
  r.estimate = lp::weighted_l1_minimize(a, y, weights);
  r.stage_estimates.push_back(r.estimate);
  r.residual = residual_inf(a, r.estimate, y);
  r.objective = weighted_objective(r.estimate, weights);
  return r;
}

}  // namespace recover
}  // namespace sparselab
