/* sparselab C API.
 *
 * Shared-library interface to the sparse-recovery laboratory: seeded
 * Gaussian measurement matrices, model-based sparse signals, plain /
 * weighted / reweighted l1 recovery, null-space robustness certificates,
 * and the Monte Carlo experiment harness.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return sl_status; on failure sl_last_error() gives a
 * human-readable detail message (thread-local).
 */

#ifndef SPARSELAB_H
#define SPARSELAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sl_status {
  SL_OK = 0,
  SL_ERR_INVALID_ARGUMENT = 1,
  SL_ERR_RANK_DEFICIENT = 2,
  SL_ERR_ITERATION_LIMIT = 3,
  SL_ERR_INFEASIBLE = 4,
  SL_ERR_UNBOUNDED = 5,
  SL_ERR_SET_TOO_LARGE = 6,
  SL_ERR_DEGENERATE_FIT = 7,
  SL_ERR_INTERNAL = 8
} sl_status;

typedef struct sl_matrix sl_matrix;
typedef struct sl_signal sl_signal;
typedef struct sl_result sl_result;
typedef struct sl_curve sl_curve;
typedef struct sl_campaign sl_campaign;

const char* sl_status_name(sl_status s);
/* Detail message for the most recent failing call on this thread. */
const char* sl_last_error(void);

/* Strings returned through char** out parameters are heap-allocated and
 * must be released with sl_string_free. */
void sl_string_free(char* s);

/* ---- matrices ---------------------------------------------------------- */

sl_status sl_matrix_gaussian(uint64_t m, uint64_t n, uint64_t seed,
                             sl_matrix** out);
sl_status sl_matrix_from_data(uint64_t rows, uint64_t cols,
                              const double* row_major, sl_matrix** out);
void sl_matrix_free(sl_matrix* a);
uint64_t sl_matrix_rows(const sl_matrix* a);
uint64_t sl_matrix_cols(const sl_matrix* a);
/* buf must hold rows*cols doubles (row-major). */
sl_status sl_matrix_data(const sl_matrix* a, double* buf, size_t len);
sl_status sl_matrix_to_csv(const sl_matrix* a, char** out);
sl_status sl_matrix_to_json(const sl_matrix* a, char** out);
/* y = A x; x has n entries, y must hold m. */
sl_status sl_matrix_apply(const sl_matrix* a, const double* x, size_t xlen,
                          double* y, size_t ylen);

/* ---- signals ----------------------------------------------------------- */

/* Two-part model: k_strong entries with magnitude in [a1, 2*a1] on a random
 * strong set, plus k_total-k_strong tail entries sharing l1 mass delta. */
sl_status sl_signal_model(uint64_t n, uint64_t k_strong, double a1,
                          double delta, uint64_t k_total, uint64_t seed,
                          sl_signal** out);

#define SL_AMP_GAUSSIAN 0
#define SL_AMP_FLAT 1

/* Two-class nonuniform model: class sizes floor(gamma1*n) and the rest,
 * per-entry nonzero probabilities p1 / p2. */
sl_status sl_signal_nonuniform(uint64_t n, double gamma1, double p1, double p2,
                               int amp_law, uint64_t seed, sl_signal** out);
void sl_signal_free(sl_signal* s);
uint64_t sl_signal_length(const sl_signal* s);
sl_status sl_signal_values(const sl_signal* s, double* buf, size_t len);
/* CSV body: one value per line. */
sl_status sl_signal_to_csv(const sl_signal* s, char** out);
/* Metadata sidecar (n, K, a1, delta, K_total, seed; 0-based indices). */
sl_status sl_signal_metadata_json(const sl_signal* s, char** out);

double sl_expected_nonzeros(uint64_t n, double gamma1, double p1, double p2);

/* ---- recovery ---------------------------------------------------------- */

sl_status sl_solve_l1(const sl_matrix* a, const double* y, size_t ylen,
                      sl_result** out);
sl_status sl_solve_weighted_l1(const sl_matrix* a, const double* y,
                               size_t ylen, const double* weights, size_t wlen,
                               sl_result** out);
/* Iterative reweighting, weights 1/(|x_i| + eps_prime); t_max extra solves. */
sl_status sl_reweight_candes(const sl_matrix* a, const double* y, size_t ylen,
                             double eps_prime, uint64_t t_max,
                             sl_result** out);
/* Two-stage: plain l1, keep top k_strong of stage 1 at weight 1, weight w
 * elsewhere, one weighted resolve. */
sl_status sl_reweight_modified(const sl_matrix* a, const double* y,
                               size_t ylen, uint64_t k_strong, double w,
                               sl_result** out);
void sl_result_free(sl_result* r);
uint64_t sl_result_length(const sl_result* r);
sl_status sl_result_estimate(const sl_result* r, double* buf, size_t len);
double sl_result_objective(const sl_result* r);
double sl_result_residual(const sl_result* r);
uint64_t sl_result_stage_count(const sl_result* r);
/* Stage-1 selected index set of the two-stage algorithm (0-based). */
uint64_t sl_result_selected_count(const sl_result* r);
sl_status sl_result_selected(const sl_result* r, uint64_t* buf, size_t len);
sl_status sl_result_to_json(const sl_result* r, const char* algo, char** out);

/* ---- certificates ------------------------------------------------------ */

/* kappa = max ||w_K||_1 / ||w_Kbar||_1 over the null space of A; exact sign
 * enumeration, |K| <= 16. Returns +inf when unbounded. Indices 0-based. */
sl_status sl_kappa(const sl_matrix* a, const uint64_t* k_set, size_t k_len,
                   double* out);
/* Null-space condition ||x_K + w_K||_1 + ||w_Kbar||_1 / C >= ||x_K||_1.
 * holds is 1/0; margin is the minimum of LHS-RHS. */
sl_status sl_weak_robustness(const sl_matrix* a, const uint64_t* k_set,
                             size_t k_len, const double* x_k, double c,
                             int* holds, double* margin);
/* Largest C in (1, 1e6] for which the condition holds, to 1e-3; +inf if it
 * holds at 1e6, 1.0 when it already fails as C -> 1+. */
sl_status sl_best_c(const sl_matrix* a, const uint64_t* k_set, size_t k_len,
                    const double* x_k, double* out);
sl_status sl_recovery_error_bound(double c, double kappa, double tail_mass,
                                  double* out);
sl_status sl_support_error_bound(double c, double kappa, double a1,
                                 double delta, double* out);
/* Sparsity-factor bounds for the two-class split; clamped to [0,1],
 * *clamped reports whether clamping occurred. */
sl_status sl_p1_lower_bound(double c, double kappa, double a1, double delta,
                            double rho_f, double delta_m, uint64_t n,
                            double* out, int* clamped);
sl_status sl_p2_upper_bound(uint64_t k_total, double eps, double rho_f,
                            double delta_m, uint64_t n, double c, double kappa,
                            double a1, double delta, double* out, int* clamped);

/* ---- experiment harness ------------------------------------------------ */

sl_status sl_phase_rho(double delta, uint64_t n, uint64_t trials_per_point,
                       const double* rho_grid, size_t grid_len, uint64_t seed,
                       uint32_t workers, sl_curve** out);
sl_status sl_phase_delta_c(double gamma1, double p1, double p2,
                           double weight_ratio, uint64_t n,
                           uint64_t trials_per_point, const double* delta_grid,
                           size_t grid_len, uint64_t seed, uint32_t workers,
                           sl_curve** out);
/* Figure-1-style sweep: axis = p1 grid, value = achieved average sparsity
 * factor. rho_f <= 0 requests an internal estimate. */
sl_status sl_sweep_fig1(double delta, double eps, double w,
                        const double* p1_grid, size_t grid_len, uint64_t n,
                        uint64_t trials_per_point, uint64_t seed, double rho_f,
                        uint32_t workers, sl_curve** out);
void sl_curve_free(sl_curve* c);
sl_status sl_curve_threshold(const sl_curve* c, double* out);
sl_status sl_curve_to_csv(const sl_curve* c, char** out);
sl_status sl_curve_to_json(const sl_curve* c, char** out);
/* Per-trial log in the canonical trial CSV schema (empty when the curve
 * carries no trial records). */
sl_status sl_curve_trials_csv(const sl_curve* c, char** out);

sl_status sl_certify_campaign(uint64_t n, uint64_t m, uint64_t instance_count,
                              uint64_t k_strong, uint64_t k_total, double a1,
                              double delta, uint64_t seed, uint32_t workers,
                              sl_campaign** out);
void sl_campaign_free(sl_campaign* c);
uint64_t sl_campaign_violations(const sl_campaign* c);
uint64_t sl_campaign_certified(const sl_campaign* c);
sl_status sl_campaign_to_json(const sl_campaign* c, char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPARSELAB_H */
