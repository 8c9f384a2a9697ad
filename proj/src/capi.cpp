#include "sparselab.h"

#include <cmath>
#include <cstring>
#include <optional>
#include <variant>

#include "core/certify.hpp"
#include "core/lab.hpp"
#include "core/lp.hpp"
#include "core/recover.hpp"
#include "core/signals.hpp"

using namespace sparselab;

struct sl_matrix {
  Matrix m;
};
struct sl_signal {
  std::variant<signals::ModelSignal, signals::NonuniformSignal> s;
  const Vector& values() const {
    return std::visit([](const auto& v) -> const Vector& { return v.x; }, s);
  }
};
struct sl_result {
  recover::RecoveryResult r;
};
struct sl_curve {
  lab::ThresholdCurve c;
};
struct sl_campaign {
  lab::CampaignResult c;
};

namespace {

thread_local std::string g_last_error;

sl_status map_errc(Errc e) {
  switch (e) {
    case Errc::invalid_argument:
      return SL_ERR_INVALID_ARGUMENT;
    case Errc::rank_deficient:
      return SL_ERR_RANK_DEFICIENT;
    case Errc::iteration_limit:
      return SL_ERR_ITERATION_LIMIT;
    case Errc::infeasible:
      return SL_ERR_INFEASIBLE;
    case Errc::unbounded:
      return SL_ERR_UNBOUNDED;
    case Errc::set_too_large:
      return SL_ERR_SET_TOO_LARGE;
    case Errc::degenerate_fit:
      return SL_ERR_DEGENERATE_FIT;
    default:
      return SL_ERR_INTERNAL;
  }
}

template <typename Fn>
sl_status guarded(Fn&& fn) {
  try {
    fn();
    return SL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_errc(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SL_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Vector to_vector(const double* data, size_t len) {
  require(data != nullptr || len == 0, Errc::invalid_argument, "null buffer");
  return Vector(data, data + len);
}

IndexSet to_index_set(const uint64_t* data, size_t len) {
  require(data != nullptr || len == 0, Errc::invalid_argument, "null index buffer");
  IndexSet out(len);
  for (size_t i = 0; i < len; ++i) out[i] = static_cast<std::size_t>(data[i]);
  return out;
}

void copy_out(const Vector& v, double* buf, size_t len) {
  require(buf != nullptr && len >= v.size(), Errc::invalid_argument,
          "output buffer too small");
  std::memcpy(buf, v.data(), v.size() * sizeof(double));
}

std::vector<double> to_grid(const double* g, size_t len) {
  require(g != nullptr && len > 0, Errc::invalid_argument, "empty grid");
  return std::vector<double>(g, g + len);
}

}  // namespace

extern "C" {

const char* sl_status_name(sl_status s) {
  switch (s) {
    case SL_OK:
      return "ok";
    case SL_ERR_INVALID_ARGUMENT:
      return "invalid-argument";
    case SL_ERR_RANK_DEFICIENT:
      return "rank-deficient";
    case SL_ERR_ITERATION_LIMIT:
      return "iteration-limit-exceeded";
    case SL_ERR_INFEASIBLE:
      return "infeasible";
    case SL_ERR_UNBOUNDED:
      return "unbounded";
    case SL_ERR_SET_TOO_LARGE:
      return "set-too-large";
    case SL_ERR_DEGENERATE_FIT:
      return "degenerate-fit";
    default:
      return "internal-error";
  }
}

const char* sl_last_error(void) { return g_last_error.c_str(); }

void sl_string_free(char* s) { delete[] s; }

/* ---- matrices ---------------------------------------------------------- */

sl_status sl_matrix_gaussian(uint64_t m, uint64_t n, uint64_t seed, sl_matrix** out) {
  return guarded([&] {
    require(out != nullptr, Errc::invalid_argument, "null output handle");
    *out = new sl_matrix{sample_gaussian_matrix(m, n, seed)};
  });
}

sl_status sl_matrix_from_data(uint64_t rows, uint64_t cols, const double* row_major,
                              sl_matrix** out) {
  return guarded([&] {
    require(out != nullptr && row_major != nullptr, Errc::invalid_argument,
            "null argument");
    require(rows > 0 && cols > 0, Errc::invalid_argument, "empty matrix");
    Matrix a(rows, cols);
    for (size_t i = 0; i < rows * cols; ++i) {
      require(std::isfinite(row_major[i]), Errc::invalid_argument,
              "matrix entries must be finite");
      a.a[i] = row_major[i];
    }
    *out = new sl_matrix{std::move(a)};
  });
}

void sl_matrix_free(sl_matrix* a) { delete a; }
uint64_t sl_matrix_rows(const sl_matrix* a) { return a ? a->m.rows : 0; }
uint64_t sl_matrix_cols(const sl_matrix* a) { return a ? a->m.cols : 0; }

sl_status sl_matrix_data(const sl_matrix* a, double* buf, size_t len) {
  return guarded([&] {
    require(a != nullptr, Errc::invalid_argument, "null matrix");
    require(buf != nullptr && len >= a->m.a.size(), Errc::invalid_argument,
            "output buffer too small");
    std::memcpy(buf, a->m.a.data(), a->m.a.size() * sizeof(double));
  });
}

sl_status sl_matrix_to_csv(const sl_matrix* a, char** out) {
  return guarded([&] {
    require(a && out, Errc::invalid_argument, "null argument");
    *out = dup_string(lab::matrix_csv(a->m));
  });
}

sl_status sl_matrix_to_json(const sl_matrix* a, char** out) {
  return guarded([&] {
    require(a && out, Errc::invalid_argument, "null argument");
    *out = dup_string(lab::matrix_json(a->m));
  });
}

sl_status sl_matrix_apply(const sl_matrix* a, const double* x, size_t xlen,
                          double* y, size_t ylen) {
  return guarded([&] {
    require(a != nullptr, Errc::invalid_argument, "null matrix");
    Vector v = to_vector(x, xlen);
    Vector r = matvec(a->m, v);
    copy_out(r, y, ylen);
  });
}

/* ---- signals ----------------------------------------------------------- */

sl_status sl_signal_model(uint64_t n, uint64_t k_strong, double a1, double delta,
                          uint64_t k_total, uint64_t seed, sl_signal** out) {
  return guarded([&] {
    require(out != nullptr, Errc::invalid_argument, "null output handle");
    *out = new sl_signal{
        signals::generate_model_signal(n, k_strong, a1, delta, k_total, seed)};
  });
}

sl_status sl_signal_nonuniform(uint64_t n, double gamma1, double p1, double p2,
                               int amp_law, uint64_t seed, sl_signal** out) {
  return guarded([&] {
    require(out != nullptr, Errc::invalid_argument, "null output handle");
    require(amp_law == SL_AMP_GAUSSIAN || amp_law == SL_AMP_FLAT,
            Errc::invalid_argument, "unknown amplitude law");
    auto law = amp_law == SL_AMP_FLAT ? signals::AmpLaw::flat : signals::AmpLaw::gaussian;
    *out = new sl_signal{
        signals::generate_nonuniform_signal(n, gamma1, p1, p2, law, seed)};
  });
}

void sl_signal_free(sl_signal* s) { delete s; }
uint64_t sl_signal_length(const sl_signal* s) { return s ? s->values().size() : 0; }

sl_status sl_signal_values(const sl_signal* s, double* buf, size_t len) {
  return guarded([&] {
    require(s != nullptr, Errc::invalid_argument, "null signal");
    copy_out(s->values(), buf, len);
  });
}

sl_status sl_signal_to_csv(const sl_signal* s, char** out) {
  return guarded([&] {
    require(s && out, Errc::invalid_argument, "null argument");
    *out = dup_string(lab::vector_csv(s->values()));
  });
}

sl_status sl_signal_metadata_json(const sl_signal* s, char** out) {
  return guarded([&] {
    require(s && out, Errc::invalid_argument, "null argument");
    std::string j = std::visit(
        [&](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, signals::ModelSignal>)
            return lab::model_signal_metadata_json(v);
          else
            return lab::nonuniform_metadata_json(v, v.x.size());
        },
        s->s);
    *out = dup_string(j);
  });
}

double sl_expected_nonzeros(uint64_t n, double gamma1, double p1, double p2) {
  double out = 0.0;
  guarded([&] { out = signals::expected_nonzeros(n, gamma1, p1, p2); });
  return out;
}

/* ---- recovery ---------------------------------------------------------- */

sl_status sl_solve_l1(const sl_matrix* a, const double* y, size_t ylen,
                      sl_result** out) {
  return guarded([&] {
    require(a && out, Errc::invalid_argument, "null argument");
    *out = new sl_result{recover::solve_l1(a->m, to_vector(y, ylen))};
  });
}

sl_status sl_solve_weighted_l1(const sl_matrix* a, const double* y, size_t ylen,
                               const double* weights, size_t wlen, sl_result** out) {
  return guarded([&] {
    require(a && out, Errc::invalid_argument, "null argument");
    Vector w = to_vector(weights, wlen);
    Vector yy = to_vector(y, ylen);
    recover::RecoveryResult r;
    r.estimate = lp::weighted_l1_minimize(a->m, yy, w);
    r.stage_estimates.push_back(r.estimate);
    Vector ax = matvec(a->m, r.estimate);
    for (size_t i = 0; i < yy.size(); ++i)
      r.residual = std::max(r.residual, std::fabs(ax[i] - yy[i]));
    for (size_t i = 0; i < w.size(); ++i)
      r.objective += w[i] * std::fabs(r.estimate[i]);
    *out = new sl_result{std::move(r)};
  });
}

sl_status sl_reweight_candes(const sl_matrix* a, const double* y, size_t ylen,
                             double eps_prime, uint64_t t_max, sl_result** out) {
  return guarded([&] {
    require(a && out, Errc::invalid_argument, "null argument");
    *out = new sl_result{
        recover::reweight_candes(a->m, to_vector(y, ylen), eps_prime, t_max)};
  });
}

sl_status sl_reweight_modified(const sl_matrix* a, const double* y, size_t ylen,
                               uint64_t k_strong, double w, sl_result** out) {
  return guarded([&] {
    require(a && out, Errc::invalid_argument, "null argument");
    *out = new sl_result{
        recover::reweight_modified(a->m, to_vector(y, ylen), k_strong, w)};
  });
}

void sl_result_free(sl_result* r) { delete r; }
uint64_t sl_result_length(const sl_result* r) { return r ? r->r.estimate.size() : 0; }

sl_status sl_result_estimate(const sl_result* r, double* buf, size_t len) {
  return guarded([&] {
    require(r != nullptr, Errc::invalid_argument, "null result");
    copy_out(r->r.estimate, buf, len);
  });
}

double sl_result_objective(const sl_result* r) { return r ? r->r.objective : 0.0; }
double sl_result_residual(const sl_result* r) { return r ? r->r.residual : 0.0; }
uint64_t sl_result_stage_count(const sl_result* r) {
  return r ? r->r.stage_estimates.size() : 0;
}
uint64_t sl_result_selected_count(const sl_result* r) {
  return r ? r->r.selected_set.size() : 0;
}

sl_status sl_result_selected(const sl_result* r, uint64_t* buf, size_t len) {
  return guarded([&] {
    require(r != nullptr, Errc::invalid_argument, "null result");
    require(buf != nullptr && len >= r->r.selected_set.size(), Errc::invalid_argument,
            "output buffer too small");
    for (size_t i = 0; i < r->r.selected_set.size(); ++i) buf[i] = r->r.selected_set[i];
  });
}

sl_status sl_result_to_json(const sl_result* r, const char* algo, char** out) {
  return guarded([&] {
    require(r && out, Errc::invalid_argument, "null argument");
    std::string a = algo ? algo : "";
    std::string json = "{\"schema_version\":1,\"algo\":\"" + a + "\"";
    json += ",\"objective\":" + lab::fmt_double(r->r.objective);
    json += ",\"residual\":" + lab::fmt_double(r->r.residual);
    json += ",\"stages\":" + std::to_string(r->r.stage_estimates.size());
    json += ",\"selected\":[";
    for (size_t i = 0; i < r->r.selected_set.size(); ++i) {
      if (i) json += ',';
      json += std::to_string(r->r.selected_set[i]);
    }
    json += "],\"estimate\":[";
    for (size_t i = 0; i < r->r.estimate.size(); ++i) {
      if (i) json += ',';
      json += lab::fmt_double(r->r.estimate[i]);
    }
    json += "]}";
    *out = dup_string(json);
  });
}

/* ---- certificates ------------------------------------------------------ */

sl_status sl_kappa(const sl_matrix* a, const uint64_t* k_set, size_t k_len,
                   double* out) {
  return guarded([&] {
    require(a && out, Errc::invalid_argument, "null argument");
    *out = certify::compute_kappa(a->m, to_index_set(k_set, k_len));
  });
}

sl_status sl_weak_robustness(const sl_matrix* a, const uint64_t* k_set, size_t k_len,
                             const double* x_k, double c, int* holds, double* margin) {
  return guarded([&] {
    require(a && holds && margin, Errc::invalid_argument, "null argument");
    certify::RobustnessCheck chk = certify::check_weak_robustness(
        a->m, to_index_set(k_set, k_len), to_vector(x_k, k_len), c);
    *holds = chk.holds ? 1 : 0;
    *margin = chk.margin;
  });
}

sl_status sl_best_c(const sl_matrix* a, const uint64_t* k_set, size_t k_len,
                    const double* x_k, double* out) {
  return guarded([&] {
    require(a && out, Errc::invalid_argument, "null argument");
    *out = certify::estimate_best_c(a->m, to_index_set(k_set, k_len),
                                    to_vector(x_k, k_len));
  });
}

sl_status sl_recovery_error_bound(double c, double kappa, double tail_mass,
                                  double* out) {
  return guarded([&] {
    require(out, Errc::invalid_argument, "null argument");
    *out = certify::recovery_error_bound(c, kappa, tail_mass);
  });
}

sl_status sl_support_error_bound(double c, double kappa, double a1, double delta,
                                 double* out) {
  return guarded([&] {
    require(out, Errc::invalid_argument, "null argument");
    *out = certify::support_error_bound(c, kappa, a1, delta).value;
  });
}

sl_status sl_p1_lower_bound(double c, double kappa, double a1, double delta,
                            double rho_f, double delta_m, uint64_t n, double* out,
                            int* clamped) {
  return guarded([&] {
    require(out, Errc::invalid_argument, "null argument");
    certify::ProbabilityBound b =
        certify::p1_lower_bound(c, kappa, a1, delta, rho_f, delta_m, n);
    *out = b.value;
    if (clamped) *clamped = b.clamped ? 1 : 0;
  });
}

sl_status sl_p2_upper_bound(uint64_t k_total, double eps, double rho_f,
                            double delta_m, uint64_t n, double c, double kappa,
                            double a1, double delta, double* out, int* clamped) {
  return guarded([&] {
    require(out, Errc::invalid_argument, "null argument");
    certify::ProbabilityBound b = certify::p2_upper_bound(
        k_total, eps, rho_f, delta_m, n, c, kappa, a1, delta);
    *out = b.value;
    if (clamped) *clamped = b.clamped ? 1 : 0;
  });
}

/* ---- experiment harness ------------------------------------------------ */

sl_status sl_phase_rho(double delta, uint64_t n, uint64_t trials_per_point,
                       const double* rho_grid, size_t grid_len, uint64_t seed,
                       uint32_t workers, sl_curve** out) {
  return guarded([&] {
    require(out, Errc::invalid_argument, "null output handle");
    *out = new sl_curve{lab::estimate_rho_f(delta, n, trials_per_point,
                                            to_grid(rho_grid, grid_len), seed,
                                            workers ? workers : 1)};
  });
}

sl_status sl_phase_delta_c(double gamma1, double p1, double p2, double weight_ratio,
                           uint64_t n, uint64_t trials_per_point,
                           const double* delta_grid, size_t grid_len, uint64_t seed,
                           uint32_t workers, sl_curve** out) {
  return guarded([&] {
    require(out, Errc::invalid_argument, "null output handle");
    *out = new sl_curve{lab::estimate_delta_c(gamma1, p1, p2, weight_ratio, n,
                                              trials_per_point,
                                              to_grid(delta_grid, grid_len), seed,
                                              workers ? workers : 1)};
  });
}

sl_status sl_sweep_fig1(double delta, double eps, double w, const double* p1_grid,
                        size_t grid_len, uint64_t n, uint64_t trials_per_point,
                        uint64_t seed, double rho_f, uint32_t workers,
                        sl_curve** out) {
  return guarded([&] {
    require(out, Errc::invalid_argument, "null output handle");
    std::optional<double> rf;
    if (rho_f > 0.0) rf = rho_f;
    *out = new sl_curve{lab::sweep_figure1(delta, eps, w, to_grid(p1_grid, grid_len),
                                           n, trials_per_point, seed, rf,
                                           workers ? workers : 1)};
  });
}

void sl_curve_free(sl_curve* c) { delete c; }

sl_status sl_curve_threshold(const sl_curve* c, double* out) {
  return guarded([&] {
    require(c && out, Errc::invalid_argument, "null argument");
    *out = c->c.threshold;
  });
}

sl_status sl_curve_to_csv(const sl_curve* c, char** out) {
  return guarded([&] {
    require(c && out, Errc::invalid_argument, "null argument");
    *out = dup_string(lab::curve_csv(c->c));
  });
}

sl_status sl_curve_to_json(const sl_curve* c, char** out) {
  return guarded([&] {
    require(c && out, Errc::invalid_argument, "null argument");
    *out = dup_string(lab::curve_json(c->c));
  });
}

sl_status sl_curve_trials_csv(const sl_curve* c, char** out) {
  return guarded([&] {
    require(c && out, Errc::invalid_argument, "null argument");
    *out = dup_string(lab::trials_csv(c->c.trial_log));
  });
}

sl_status sl_certify_campaign(uint64_t n, uint64_t m, uint64_t instance_count,
                              uint64_t k_strong, uint64_t k_total, double a1,
                              double delta, uint64_t seed, uint32_t workers,
                              sl_campaign** out) {
  return guarded([&] {
    require(out, Errc::invalid_argument, "null output handle");
    lab::CampaignParams params;
    params.n = n;
    params.m = m;
    params.instances = instance_count;
    params.k_strong = k_strong;
    params.k_total = k_total;
    params.a1 = a1;
    params.delta = delta;
    params.seed = seed;
    params.workers = workers ? workers : 1;
    *out = new sl_campaign{lab::run_certificate_campaign(params)};
  });
}

void sl_campaign_free(sl_campaign* c) { delete c; }
uint64_t sl_campaign_violations(const sl_campaign* c) {
  return c ? c->c.violation_count : 0;
}
uint64_t sl_campaign_certified(const sl_campaign* c) {
  return c ? c->c.certified_count : 0;
}

sl_status sl_campaign_to_json(const sl_campaign* c, char** out) {
  return guarded([&] {
    require(c && out, Errc::invalid_argument, "null argument");
    *out = dup_string(lab::campaign_json(c->c));
  });
}

} /* extern "C" */
