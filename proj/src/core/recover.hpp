#ifndef SPARSELAB_RECOVER_HPP
#define SPARSELAB_RECOVER_HPP

#include <cstdint>
#include <vector>

#include "numcore.hpp"

namespace sparselab {
namespace recover {

struct RecoveryResult {
  Vector estimate;
  std::vector<Vector> stage_estimates;  // one per weighted solve
  IndexSet selected_set;                // K' of the two-stage algorithm, else empty
  double residual = 0.0;                // ||A estimate - y||_inf
  double objective = 0.0;               // weighted objective of the final solve
};

// Indices of the k largest |v_i|, ties toward the smaller index.
IndexSet select_top_k(const Vector& v, std::size_t k);

RecoveryResult solve_l1(const Matrix& a, const Vector& y);

// Iterative reweighting: unit weights, then w_i = 1 / (|x_i| + eps_prime)
// after each solve; up to t_max reweighted solves, early stop when the
// iterate moves by at most 1e-9 in sup norm.
RecoveryResult reweight_candes(const Matrix& a, const Vector& y, double eps_prime,
                               std::size_t t_max);

// Two-stage: plain l1, pick the top k_strong magnitudes as K', resolve once
// with weight 1 on K' and w on its complement.
RecoveryResult reweight_modified(const Matrix& a, const Vector& y,
                                 std::size_t k_strong, double w);

}  // namespace recover
}  // namespace sparselab

#endif
