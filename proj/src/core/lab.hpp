#ifndef SPARSELAB_LAB_HPP
#define SPARSELAB_LAB_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "numcore.hpp"
#include "signals.hpp"

namespace sparselab {
namespace lab {

// Perfect recovery means relative l2 error at or below this.
constexpr double kSuccessRelL2 = 1e-4;

// Residual-deviance cutoff separating a usable logistic fit from a
// degenerate one, as a function of the fit's degrees of freedom.
inline double deviance_threshold(std::size_t df) {
  return 10.0 + 5.0 * static_cast<double>(df);
}

struct TrialRecord {
  std::uint64_t trial_id = 0;
  std::uint64_t seed = 0;
  std::string algo;  // l1 | candes | modified
  std::size_t n = 0, m = 0;
  double delta = 0.0;
  std::size_t k_strong = 0, k_total = 0;
  double a1 = 0.0, tail_mass = 0.0, w = 0.0;
  bool success = false;
  double rel_l2_error = 0.0, l1_error = 0.0, runtime_ms = 0.0;
};

struct Interval {
  double low = 0.0, high = 1.0;
};

// Wilson 95% score interval for successes out of trials.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct CurvePoint {
  double axis = 0.0;
  std::uint64_t successes = 0, trials = 0;
  double value = 0.0;  // success probability, or achieved sparsity factor
  double ci_low = 0.0, ci_high = 1.0;
};

struct ThresholdCurve {
  std::string kind;  // phase-rho | phase-delta-c | sweep-fig1
  std::vector<CurvePoint> points;
  double threshold = 0.0;  // fitted 50% midpoint; for fig1 the zeta baseline
  Interval threshold_ci;
  double deviance = 0.0;
  std::map<std::string, double> meta;
  std::vector<TrialRecord> trial_log;
};

struct LogisticFit {
  double beta0 = 0.0, beta1 = 0.0;
  double midpoint = 0.0;     // axis value where p = 0.5
  double midpoint_se = 0.0;  // delta-method standard error
  double deviance = 0.0;
  std::size_t df = 0;
};

// Binomial GLM by Newton iteration; throws Errc::degenerate_fit when the
// outcome is constant across the grid or the slope cannot be identified.
LogisticFit fit_logistic(const std::vector<CurvePoint>& pts);

// Pool-adjacent-violators projection onto non-increasing sequences.
std::vector<double> isotonic_decreasing(std::vector<double> v);

// Empirical Donoho-Tanner weak threshold: plain l1 on k = floor(rho*delta*n)
// sparse Gaussian-amplitude signals over the rho grid, logistic midpoint.
ThresholdCurve estimate_rho_f(double delta, std::size_t n,
                              std::uint64_t trials_per_point,
                              const std::vector<double>& rho_grid,
                              std::uint64_t seed, unsigned workers = 1);

// Success probability of plain l1 at a single sparsity ratio rho (rho may
// sit outside (0,1) grids, e.g. the rho = 1 sanity probe).
CurvePoint rho_success_probe(double delta, std::size_t n,
                             std::uint64_t trials_per_point, double rho,
                             std::uint64_t seed, unsigned workers = 1);

// Empirical critical undersampling for the two-class model under weighted l1
// with weights (1, weight_ratio); logistic midpoint over the delta grid.
ThresholdCurve estimate_delta_c(double gamma1, double p1, double p2,
                                double weight_ratio, std::size_t n,
                                std::uint64_t trials_per_point,
                                const std::vector<double>& delta_grid,
                                std::uint64_t seed, unsigned workers = 1);

// For each P1, the largest P2 (bisection at the 50% success level) such that
// the two-stage algorithm still recovers, reported as the achieved average
// sparsity factor P1*gamma1 + P2*gamma2 against the plain-l1 baseline
// zeta = rho_f * delta. rho_f empty requests an internal estimate.
ThresholdCurve sweep_figure1(double delta, double eps, double w,
                             const std::vector<double>& p1_grid, std::size_t n,
                             std::uint64_t trials_per_point, std::uint64_t seed,
                             std::optional<double> rho_f = std::nullopt,
                             unsigned workers = 1);

struct CampaignParams {
  std::size_t n = 40, m = 24;
  std::size_t instances = 200;
  std::size_t k_strong = 6, k_total = 8;
  double a1 = 1.0, delta = 0.05;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct CertificateRecord {
  std::uint64_t instance_id = 0, seed = 0;
  std::size_t n = 0, m = 0;
  IndexSet strong_set;
  double kappa = 0.0, best_c = 0.0, margin = 0.0;
  bool certified = false;
  // support-error check on the stage-1 top-k selection
  std::size_t support_err_actual = 0;
  double support_bound = 0.0;
  // l1 error chain on the stage-1 estimate
  double error_actual = 0.0, error_bound = 0.0;
  // the two defining inequalities of weak robustness
  double offk_err = 0.0, offk_bound = 0.0;
  double kgap = 0.0, kgap_bound = 0.0;
  bool violation = false;
};

struct CampaignResult {
  CampaignParams params;
  std::vector<CertificateRecord> records;
  std::size_t certified_count = 0;
  std::size_t violation_count = 0;
};

// Per instance: sample A, draw a model signal, compute kappa and best C, run
// the stage-1 l1 solve, and verify the support-error and error-chain bounds.
CampaignResult run_certificate_campaign(const CampaignParams& params);

// ---- serialization (all flat-file formats live here) ----------------------

std::string fmt_double(double v);
std::string matrix_csv(const Matrix& a);
std::string matrix_json(const Matrix& a);
std::string vector_csv(const Vector& v);  // one value per line
std::string model_signal_metadata_json(const signals::ModelSignal& s);
std::string nonuniform_metadata_json(const signals::NonuniformSignal& s, std::size_t n);
std::string trials_csv(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_trials_csv(const std::string& text);
std::string curve_csv(const ThresholdCurve& c);
std::string curve_json(const ThresholdCurve& c);
std::string campaign_json(const CampaignResult& c);

}  // namespace lab
}  // namespace sparselab

#endif
