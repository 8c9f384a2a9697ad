#include "lab.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "certify.hpp"
#include "lp.hpp"
#include "recover.hpp"

namespace sparselab {
namespace lab {

namespace {

using nlohmann::json;

constexpr double kZ95 = 1.959963984540054;

// Ordered parallel map: results land at their own index, so output never
// depends on scheduling.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned wn = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  pool.reserve(wn);
  for (unsigned w = 0; w < wn; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

Vector sparse_gaussian_vector(std::size_t n, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  Vector x(n, 0.0);
  IndexSet idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  for (std::size_t i = 0; i < k; ++i) x[idx[i]] = rng.next_gaussian();
  return x;
}

double rel_l2_error(const Vector& truth, const Vector& est) {
  Vector d(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) d[i] = truth[i] - est[i];
  double denom = l2_norm(truth);
  return denom > 0.0 ? l2_norm(d) / denom : l2_norm(d);
}

double l1_error(const Vector& truth, const Vector& est) {
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += std::fabs(truth[i] - est[i]);
  return s;
}

double eta_clamp(double eta) { return std::clamp(eta, -30.0, 30.0); }

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

json jindex_set(const IndexSet& s) {
  json a = json::array();
  for (std::size_t i : s) a.push_back(i);
  return a;
}

}  // namespace

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = kZ95 * kZ95;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

LogisticFit fit_logistic(const std::vector<CurvePoint>& pts) {
  std::vector<const CurvePoint*> used;
  for (const auto& p : pts)
    if (p.trials > 0) used.push_back(&p);
  require(used.size() >= 2, Errc::degenerate_fit, "logistic fit: need >= 2 grid points");
  double pmin = 1.0, pmax = 0.0;
  for (auto* p : used) {
    double f = static_cast<double>(p->successes) / static_cast<double>(p->trials);
    pmin = std::min(pmin, f);
    pmax = std::max(pmax, f);
  }
  require(pmax > pmin, Errc::degenerate_fit,
          "logistic fit: success is constant across the grid");

  double b0 = 0.0, b1 = 0.0;
  double h00 = 0, h01 = 0, h11 = 0;
  for (int it = 0; it < 100; ++it) {
    double g0 = 0, g1 = 0;
    h00 = h01 = h11 = 0;
    for (auto* pt : used) {
      double x = pt->axis;
      double nt = static_cast<double>(pt->trials);
      double y = static_cast<double>(pt->successes);
      double p = 1.0 / (1.0 + std::exp(-eta_clamp(b0 + b1 * x)));
      double w = std::max(nt * p * (1.0 - p), 1e-12);
      g0 += y - nt * p;
      g1 += (y - nt * p) * x;
      h00 += w;
      h01 += w * x;
      h11 += w * x * x;
    }
    double det = h00 * h11 - h01 * h01;
    require(std::fabs(det) > 1e-300, Errc::degenerate_fit,
            "logistic fit: singular information matrix");
    double s0 = (h11 * g0 - h01 * g1) / det;
    double s1 = (h00 * g1 - h01 * g0) / det;
    // damp large Newton steps (near-separation)
    double scale = std::max(1.0, std::max(std::fabs(s0), std::fabs(s1)) / 10.0);
    b0 += s0 / scale;
    b1 += s1 / scale;
    if (std::fabs(s0) < 1e-10 && std::fabs(s1) < 1e-10) break;
  }
  require(std::isfinite(b0) && std::isfinite(b1) && std::fabs(b1) > 1e-12,
          Errc::degenerate_fit, "logistic fit: slope not identified");

  LogisticFit fit;
  fit.beta0 = b0;
  fit.beta1 = b1;
  fit.midpoint = -b0 / b1;
  // delta method on g = -b0/b1 with covariance = inverse information
  double det = h00 * h11 - h01 * h01;
  double v00 = h11 / det, v01 = -h01 / det, v11 = h00 / det;
  double d0 = -1.0 / b1, d1 = b0 / (b1 * b1);
  double var = d0 * d0 * v00 + 2.0 * d0 * d1 * v01 + d1 * d1 * v11;
  fit.midpoint_se = (var > 0 && std::isfinite(var)) ? std::sqrt(var) : 0.0;

  double dev = 0.0;
  for (auto* pt : used) {
    double nt = static_cast<double>(pt->trials);
    double y = static_cast<double>(pt->successes);
    double p = 1.0 / (1.0 + std::exp(-eta_clamp(b0 + b1 * pt->axis)));
    double mu = std::clamp(nt * p, 1e-12, nt - 1e-12);
    if (y > 0) dev += 2.0 * y * std::log(y / mu);
    if (y < nt) dev += 2.0 * (nt - y) * std::log((nt - y) / (nt - mu));
  }
  fit.deviance = dev;
  fit.df = used.size() > 2 ? used.size() - 2 : 0;
  return fit;
}

std::vector<double> isotonic_decreasing(std::vector<double> v) {
  // PAV on the negated sequence (non-increasing target)
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (double x : v) {
    level.push_back(x);
    count.push_back(1);
    while (level.size() >= 2 && level[level.size() - 2] < level.back()) {
      double merged = (level[level.size() - 2] * count[count.size() - 2] +
                       level.back() * count.back()) /
                      static_cast<double>(count[count.size() - 2] + count.back());
      count[count.size() - 2] += count.back();
      level.pop_back();
      count.pop_back();
      level.back() = merged;
    }
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t b = 0; b < level.size(); ++b)
    out.insert(out.end(), count[b], level[b]);
  return out;
}

namespace {

struct TrialOutcome {
  TrialRecord record;
};

// One plain-l1 trial at sparsity k; shared by the rho estimator and probes.
TrialRecord run_l1_trial(std::size_t n, std::size_t m, std::size_t k,
                         std::uint64_t trial_seed, std::uint64_t trial_id,
                         double delta) {
  Matrix a = sample_gaussian_matrix(m, n, Rng::derive(trial_seed, 0));
  Vector x = sparse_gaussian_vector(n, k, Rng::derive(trial_seed, 1));
  Vector y = matvec(a, x);
  auto t0 = std::chrono::steady_clock::now();
  Vector xhat = lp::l1_minimize(a, y);
  auto t1 = std::chrono::steady_clock::now();

  // the true signal is feasible, so the reported optimum may not cost more
  double obj_true = l1_norm(x), obj_hat = l1_norm(xhat);
  require(obj_hat <= obj_true + 1e-8 * (1.0 + obj_true), Errc::internal,
          "trial: optimality certificate violated");

  TrialRecord r;
  r.trial_id = trial_id;
  r.seed = trial_seed;
  r.algo = "l1";
  r.n = n;
  r.m = m;
  r.delta = delta;
  r.k_total = k;
  r.rel_l2_error = rel_l2_error(x, xhat);
  r.l1_error = l1_error(x, xhat);
  r.success = r.rel_l2_error <= kSuccessRelL2;
  r.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

CurvePoint summarize(double axis, const std::vector<TrialRecord>& recs) {
  CurvePoint pt;
  pt.axis = axis;
  pt.trials = recs.size();
  for (const auto& r : recs) pt.successes += r.success ? 1 : 0;
  pt.value = pt.trials ? static_cast<double>(pt.successes) / pt.trials : 0.0;
  Interval ci = wilson_interval(pt.successes, pt.trials);
  pt.ci_low = ci.low;
  pt.ci_high = ci.high;
  return pt;
}

}  // namespace

ThresholdCurve estimate_rho_f(double delta, std::size_t n,
                              std::uint64_t trials_per_point,
                              const std::vector<double>& rho_grid,
                              std::uint64_t seed, unsigned workers) {
  require(delta > 0.0 && delta < 1.0, Errc::invalid_argument,
          "estimate_rho_f: delta must be in (0,1)");
  require(delta * static_cast<double>(n) >= 1.0, Errc::invalid_argument,
          "estimate_rho_f: need delta * n >= 1");
  require(!rho_grid.empty(), Errc::invalid_argument, "estimate_rho_f: empty grid");
  for (double r : rho_grid)
    require(r > 0.0 && r < 1.0, Errc::invalid_argument,
            "estimate_rho_f: grid must lie in (0,1)");
  const std::size_t m = static_cast<std::size_t>(std::llround(delta * n));
  require(m >= 1 && m < n, Errc::invalid_argument, "estimate_rho_f: bad m from delta");

  ThresholdCurve curve;
  curve.kind = "phase-rho";
  curve.meta["delta"] = delta;
  curve.meta["n"] = static_cast<double>(n);
  curve.meta["m"] = static_cast<double>(m);

  const std::size_t total = rho_grid.size() * trials_per_point;
  std::vector<TrialRecord> all(total);
  parallel_for(total, workers, [&](std::size_t i) {
    std::size_t gi = i / trials_per_point;
    std::uint64_t t = i % trials_per_point;
    double rho = rho_grid[gi];
    std::size_t k = static_cast<std::size_t>(std::floor(rho * delta * n));
    std::uint64_t trial_seed = Rng::derive(Rng::derive(seed, gi), t);
    all[i] = run_l1_trial(n, m, k, trial_seed, i, delta);
  });
  for (std::size_t gi = 0; gi < rho_grid.size(); ++gi) {
    std::vector<TrialRecord> recs(all.begin() + gi * trials_per_point,
                                  all.begin() + (gi + 1) * trials_per_point);
    curve.points.push_back(summarize(rho_grid[gi], recs));
  }
  curve.trial_log = std::move(all);

  LogisticFit fit = fit_logistic(curve.points);
  curve.threshold = fit.midpoint;
  curve.threshold_ci = {fit.midpoint - kZ95 * fit.midpoint_se,
                        fit.midpoint + kZ95 * fit.midpoint_se};
  curve.deviance = fit.deviance;
  curve.meta["deviance_threshold"] = deviance_threshold(fit.df);
  return curve;
}

CurvePoint rho_success_probe(double delta, std::size_t n,
                             std::uint64_t trials_per_point, double rho,
                             std::uint64_t seed, unsigned workers) {
  const std::size_t m = static_cast<std::size_t>(std::llround(delta * n));
  require(m >= 1 && m < n, Errc::invalid_argument, "rho_success_probe: bad m");
  std::size_t k = std::min(n, static_cast<std::size_t>(std::floor(rho * delta * n)));
  std::vector<TrialRecord> recs(trials_per_point);
  parallel_for(trials_per_point, workers, [&](std::size_t t) {
    recs[t] = run_l1_trial(n, m, k, Rng::derive(seed, t), t, delta);
  });
  return summarize(rho, recs);
}

ThresholdCurve estimate_delta_c(double gamma1, double p1, double p2,
                                double weight_ratio, std::size_t n,
                                std::uint64_t trials_per_point,
                                const std::vector<double>& delta_grid,
                                std::uint64_t seed, unsigned workers) {
  require(gamma1 >= 0.0 && gamma1 <= 1.0, Errc::invalid_argument,
          "estimate_delta_c: gamma1 must be in [0,1]");
  require(weight_ratio >= 1.0, Errc::invalid_argument,
          "estimate_delta_c: weight ratio must be >= 1");
  require(!delta_grid.empty(), Errc::invalid_argument, "estimate_delta_c: empty grid");

  ThresholdCurve curve;
  curve.kind = "phase-delta-c";
  curve.meta["gamma1"] = gamma1;
  curve.meta["p1"] = p1;
  curve.meta["p2"] = p2;
  curve.meta["weight_ratio"] = weight_ratio;
  curve.meta["n"] = static_cast<double>(n);

  const std::size_t total = delta_grid.size() * trials_per_point;
  std::vector<TrialRecord> all(total);
  parallel_for(total, workers, [&](std::size_t i) {
    std::size_t gi = i / trials_per_point;
    std::uint64_t t = i % trials_per_point;
    double delta = delta_grid[gi];
    std::size_t m = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(delta * n)), 1, n - 1);
    std::uint64_t trial_seed = Rng::derive(Rng::derive(seed, gi), t);
    signals::NonuniformSignal sig = signals::generate_nonuniform_signal(
        n, gamma1, p1, p2, signals::AmpLaw::gaussian, Rng::derive(trial_seed, 1));
    Matrix a = sample_gaussian_matrix(m, n, Rng::derive(trial_seed, 0));
    Vector y = matvec(a, sig.x);
    Vector w(n, weight_ratio);
    for (std::size_t j : sig.class1) w[j] = 1.0;
    auto t0 = std::chrono::steady_clock::now();
    Vector xhat = lp::weighted_l1_minimize(a, y, w);
    auto t1 = std::chrono::steady_clock::now();

    double obj_true = 0, obj_hat = 0;
    for (std::size_t j = 0; j < n; ++j) {
      obj_true += w[j] * std::fabs(sig.x[j]);
      obj_hat += w[j] * std::fabs(xhat[j]);
    }
    require(obj_hat <= obj_true + 1e-8 * (1.0 + obj_true), Errc::internal,
            "trial: optimality certificate violated");

    TrialRecord r;
    r.trial_id = i;
    r.seed = trial_seed;
    r.algo = "weighted";
    r.n = n;
    r.m = m;
    r.delta = delta;
    r.k_total = support(sig.x).size();
    r.w = weight_ratio;
    r.rel_l2_error = rel_l2_error(sig.x, xhat);
    r.l1_error = l1_error(sig.x, xhat);
    r.success = r.rel_l2_error <= kSuccessRelL2;
    r.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    all[i] = r;
  });
  for (std::size_t gi = 0; gi < delta_grid.size(); ++gi) {
    std::vector<TrialRecord> recs(all.begin() + gi * trials_per_point,
                                  all.begin() + (gi + 1) * trials_per_point);
    curve.points.push_back(summarize(delta_grid[gi], recs));
  }
  curve.trial_log = std::move(all);

  LogisticFit fit = fit_logistic(curve.points);
  curve.threshold = fit.midpoint;
  curve.threshold_ci = {fit.midpoint - kZ95 * fit.midpoint_se,
                        fit.midpoint + kZ95 * fit.midpoint_se};
  curve.deviance = fit.deviance;
  curve.meta["deviance_threshold"] = deviance_threshold(fit.df);
  return curve;
}

namespace {

struct Fig1Eval {
  double p2;
  CurvePoint point;
};

}  // namespace

ThresholdCurve sweep_figure1(double delta, double eps, double w,
                             const std::vector<double>& p1_grid, std::size_t n,
                             std::uint64_t trials_per_point, std::uint64_t seed,
                             std::optional<double> rho_f, unsigned workers) {
  require(delta > 0.0 && delta < 1.0, Errc::invalid_argument,
          "sweep_figure1: delta must be in (0,1)");
  require(eps > 0.0 && eps < 1.0, Errc::invalid_argument,
          "sweep_figure1: eps must be in (0,1)");
  require(w >= 1.0, Errc::invalid_argument, "sweep_figure1: weight must be >= 1");
  require(!p1_grid.empty(), Errc::invalid_argument, "sweep_figure1: empty grid");

  double rho_hat;
  Interval zeta_ci;
  if (rho_f && *rho_f > 0.0) {
    rho_hat = *rho_f;
    zeta_ci = {rho_hat * delta, rho_hat * delta};
  } else {
    std::vector<double> grid;
    for (double r = 0.1; r < 0.95; r += 0.1) grid.push_back(r);
    ThresholdCurve rho_curve = estimate_rho_f(delta, n, trials_per_point, grid,
                                              Rng::derive(seed, 0xabcdULL), workers);
    rho_hat = rho_curve.threshold;
    zeta_ci = {rho_curve.threshold_ci.low * delta, rho_curve.threshold_ci.high * delta};
  }
  const double zeta = rho_hat * delta;
  const std::size_t k_strong =
      static_cast<std::size_t>(std::floor((1.0 - eps) * zeta * n));
  require(k_strong >= 1 && k_strong < n, Errc::invalid_argument,
          "sweep_figure1: degenerate strong-set size");
  const double gamma1 = static_cast<double>(k_strong) / static_cast<double>(n);
  const double gamma2 = 1.0 - gamma1;
  const std::size_t m = static_cast<std::size_t>(std::llround(delta * n));

  ThresholdCurve curve;
  curve.kind = "sweep-fig1";
  curve.threshold = zeta;
  curve.threshold_ci = zeta_ci;
  curve.meta["delta"] = delta;
  curve.meta["eps"] = eps;
  curve.meta["W"] = w;
  curve.meta["n"] = static_cast<double>(n);
  curve.meta["m"] = static_cast<double>(m);
  curve.meta["rho_f_hat"] = rho_hat;
  curve.meta["zeta_hat"] = zeta;
  curve.meta["zeta_ci_low"] = zeta_ci.low;
  curve.meta["zeta_ci_high"] = zeta_ci.high;
  curve.meta["k_strong"] = static_cast<double>(k_strong);
  curve.meta["gamma1"] = gamma1;

  // class-1 fraction chosen so floor(gamma1*n) lands exactly on k_strong
  const double gamma1_gen = (static_cast<double>(k_strong) + 0.5) / static_cast<double>(n);

  for (std::size_t gi = 0; gi < p1_grid.size(); ++gi) {
    double p1 = p1_grid[gi];
    std::uint64_t point_seed = Rng::derive(seed, 1 + gi);
    std::uint64_t eval_counter = 0;

    auto evaluate = [&](double p2) {
      std::uint64_t eval_seed = Rng::derive(point_seed, eval_counter++);
      std::vector<TrialRecord> recs(trials_per_point);
      parallel_for(trials_per_point, workers, [&](std::size_t t) {
        std::uint64_t trial_seed = Rng::derive(eval_seed, t);
        signals::NonuniformSignal sig = signals::generate_nonuniform_signal(
            n, gamma1_gen, p1, p2, signals::AmpLaw::gaussian,
            Rng::derive(trial_seed, 1));
        Matrix a = sample_gaussian_matrix(m, n, Rng::derive(trial_seed, 0));
        Vector y = matvec(a, sig.x);
        auto t0 = std::chrono::steady_clock::now();
        recover::RecoveryResult res = recover::reweight_modified(a, y, k_strong, w);
        auto t1 = std::chrono::steady_clock::now();
        TrialRecord r;
        r.trial_id = t;
        r.seed = trial_seed;
        r.algo = "modified";
        r.n = n;
        r.m = m;
        r.delta = delta;
        r.k_strong = k_strong;
        r.k_total = support(sig.x).size();
        r.w = w;
        r.rel_l2_error = rel_l2_error(sig.x, res.estimate);
        r.l1_error = l1_error(sig.x, res.estimate);
        r.success = r.rel_l2_error <= kSuccessRelL2;
        r.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        recs[t] = r;
      });
      Fig1Eval ev;
      ev.p2 = p2;
      ev.point = summarize(p2, recs);
      return ev;
    };

    std::vector<Fig1Eval> evals;
    evals.push_back(evaluate(0.0));
    double p2_star = 0.0;
    CurvePoint at_star = evals.back().point;
    if (evals[0].point.value >= 0.5) {
      Fig1Eval top = evaluate(1.0);
      evals.push_back(top);
      if (top.point.value >= 0.5) {
        p2_star = 1.0;
        at_star = top.point;
      } else {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 7; ++it) {
          double mid = 0.5 * (lo + hi);
          Fig1Eval ev = evaluate(mid);
          evals.push_back(ev);
          if (ev.point.value >= 0.5) {
            lo = mid;
            at_star = ev.point;
          } else {
            hi = mid;
          }
        }
        p2_star = lo;
      }
    }
    // conservative bracket on p2* from confidently classified evaluations
    double p2_lo = 0.0, p2_hi = 1.0;
    for (const auto& ev : evals) {
      if (ev.point.ci_low >= 0.5) p2_lo = std::max(p2_lo, ev.p2);
      if (ev.point.ci_high <= 0.5) p2_hi = std::min(p2_hi, ev.p2);
    }
    if (evals[0].point.value < 0.5) p2_lo = 0.0;
    p2_hi = std::max(p2_hi, p2_lo);

    CurvePoint pt;
    pt.axis = p1;
    pt.successes = at_star.successes;
    pt.trials = at_star.trials;
    pt.value = p1 * gamma1 + p2_star * gamma2;
    pt.ci_low = p1 * gamma1 + p2_lo * gamma2;
    pt.ci_high = p1 * gamma1 + p2_hi * gamma2;
    curve.points.push_back(pt);
    curve.meta["p2_star_" + std::to_string(gi)] = p2_star;
  }
  return curve;
}

CampaignResult run_certificate_campaign(const CampaignParams& params) {
  require(params.k_strong <= certify::kMaxExactSetSize, Errc::set_too_large,
          "certify campaign: exact kappa limited to |K| <= 16");
  require(params.n <= 60, Errc::invalid_argument,
          "certify campaign: exact certificates limited to n <= 60");
  require(params.m >= 1 && params.m < params.n, Errc::invalid_argument,
          "certify campaign: need 1 <= m < n");

  CampaignResult out;
  out.params = params;
  out.records.resize(params.instances);

  parallel_for(params.instances, params.workers, [&](std::size_t i) {
    CertificateRecord rec;
    rec.instance_id = i;
    rec.seed = Rng::derive(params.seed, i);
    rec.n = params.n;
    rec.m = params.m;

    Matrix a = sample_gaussian_matrix(params.m, params.n, Rng::derive(rec.seed, 0));
    signals::ModelSignal sig = signals::generate_model_signal(
        params.n, params.k_strong, params.a1, params.delta, params.k_total,
        Rng::derive(rec.seed, 1));
    rec.strong_set = sig.strong_set;
    Vector x_k;
    for (std::size_t j : sig.strong_set) x_k.push_back(sig.x[j]);
    IndexSet kbar = complement(sig.strong_set, params.n);
    double tail = restricted_l1(sig.x, kbar);

    rec.kappa = certify::compute_kappa(a, sig.strong_set);
    rec.best_c = certify::estimate_best_c(a, sig.strong_set, x_k);
    rec.certified = std::isfinite(rec.kappa) && rec.best_c > 1.0 + 1e-3;
    double c_use = rec.certified
                       ? (std::isfinite(rec.best_c) ? rec.best_c : certify::kBestCMax)
                       : 1.0 + certify::kBestCResolution;
    rec.margin = certify::check_weak_robustness(a, sig.strong_set, x_k, c_use).margin;

    Vector y = matvec(a, sig.x);
    Vector x0 = lp::l1_minimize(a, y);

    if (rec.certified) {
      IndexSet kprime = recover::select_top_k(x0, params.k_strong);
      std::size_t outside = 0;
      std::vector<bool> in_supp(params.n, false);
      for (std::size_t j : sig.support) in_supp[j] = true;
      for (std::size_t j : kprime)
        if (!in_supp[j]) ++outside;
      rec.support_err_actual = outside;
      rec.support_bound =
          certify::support_error_bound(c_use, rec.kappa, params.a1, tail).value;

      rec.error_actual = l1_error(sig.x, x0);
      rec.error_bound = certify::recovery_error_bound(c_use, rec.kappa, tail);

      Vector diff(params.n);
      for (std::size_t j = 0; j < params.n; ++j) diff[j] = sig.x[j] - x0[j];
      rec.offk_err = restricted_l1(diff, kbar);
      rec.offk_bound = 2.0 * c_use / (c_use - 1.0) * tail;
      rec.kgap = restricted_l1(sig.x, sig.strong_set) -
                 restricted_l1(x0, sig.strong_set);
      rec.kgap_bound = 2.0 / (c_use - 1.0) * tail;

      rec.violation =
          static_cast<double>(rec.support_err_actual) > rec.support_bound + 1e-6 ||
          rec.error_actual > rec.error_bound + 1e-6 ||
          rec.offk_err > rec.offk_bound + 1e-6 || rec.kgap > rec.kgap_bound + 1e-6;
    }
    out.records[i] = std::move(rec);
  });

  for (const auto& r : out.records) {
    if (r.certified) ++out.certified_count;
    if (r.violation) ++out.violation_count;
  }
  return out;
}

// ---- serialization --------------------------------------------------------

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string matrix_csv(const Matrix& a) {
  std::string out;
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (j) out += ',';
      out += fmt_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string matrix_json(const Matrix& a) {
  json j;
  j["schema_version"] = 1;
  j["rows"] = a.rows;
  j["cols"] = a.cols;
  json data = json::array();
  for (double v : a.a) data.push_back(jnum(v));
  j["data"] = std::move(data);
  return j.dump();
}

std::string vector_csv(const Vector& v) {
  std::string out;
  for (double x : v) {
    out += fmt_double(x);
    out += '\n';
  }
  return out;
}

std::string model_signal_metadata_json(const signals::ModelSignal& s) {
  json j;
  j["schema_version"] = 1;
  j["n"] = s.x.size();
  j["K"] = jindex_set(s.strong_set);
  j["a1"] = s.amplitude_floor;
  j["delta"] = s.tail_mass;
  j["K_total"] = jindex_set(s.support);
  j["seed"] = s.seed;
  return j.dump();
}

std::string nonuniform_metadata_json(const signals::NonuniformSignal& s,
                                     std::size_t n) {
  json j;
  j["schema_version"] = 1;
  j["n"] = n;
  j["class1"] = jindex_set(s.class1);
  j["class2"] = jindex_set(s.class2);
  j["p1"] = s.p1;
  j["p2"] = s.p2;
  j["seed"] = s.seed;
  return j.dump();
}

static const char* kTrialHeader =
    "trial_id,seed,algo,n,m,delta,k_strong,k_total,a1,tail_mass,W,success,"
    "rel_l2_error,l1_error,runtime_ms";

std::string trials_csv(const std::vector<TrialRecord>& records) {
  std::string out = kTrialHeader;
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.trial_id) + ',' + std::to_string(r.seed) + ',' + r.algo +
           ',' + std::to_string(r.n) + ',' + std::to_string(r.m) + ',' +
           fmt_double(r.delta) + ',' + std::to_string(r.k_strong) + ',' +
           std::to_string(r.k_total) + ',' + fmt_double(r.a1) + ',' +
           fmt_double(r.tail_mass) + ',' + fmt_double(r.w) + ',' +
           (r.success ? "1" : "0") + ',' + fmt_double(r.rel_l2_error) + ',' +
           fmt_double(r.l1_error) + ',' + fmt_double(r.runtime_ms) + '\n';
  }
  return out;
}

std::vector<TrialRecord> parse_trials_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(std::getline(in, line) && line == kTrialHeader, Errc::invalid_argument,
          "trial CSV: bad header");
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    require(f.size() == 15, Errc::invalid_argument, "trial CSV: bad field count");
    TrialRecord r;
    r.trial_id = std::stoull(f[0]);
    r.seed = std::stoull(f[1]);
    r.algo = f[2];
    r.n = std::stoull(f[3]);
    r.m = std::stoull(f[4]);
    r.delta = std::stod(f[5]);
    r.k_strong = std::stoull(f[6]);
    r.k_total = std::stoull(f[7]);
    r.a1 = std::stod(f[8]);
    r.tail_mass = std::stod(f[9]);
    r.w = std::stod(f[10]);
    r.success = f[11] == "1";
    r.rel_l2_error = std::stod(f[12]);
    r.l1_error = std::stod(f[13]);
    r.runtime_ms = std::stod(f[14]);
    require(r.success == (r.rel_l2_error <= kSuccessRelL2), Errc::invalid_argument,
            "trial CSV: stored success flag disagrees with stored error");
    out.push_back(std::move(r));
  }
  return out;
}

std::string curve_csv(const ThresholdCurve& c) {
  std::string out = "axis,p_success,ci_low,ci_high,n_trials\n";
  for (const auto& p : c.points) {
    out += fmt_double(p.axis) + ',' + fmt_double(p.value) + ',' +
           fmt_double(p.ci_low) + ',' + fmt_double(p.ci_high) + ',' +
           std::to_string(p.trials) + '\n';
  }
  return out;
}

std::string curve_json(const ThresholdCurve& c) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = c.kind;
  j["threshold"] = jnum(c.threshold);
  j["threshold_ci"] = {jnum(c.threshold_ci.low), jnum(c.threshold_ci.high)};
  j["deviance"] = jnum(c.deviance);
  json meta = json::object();
  for (const auto& [k, v] : c.meta) meta[k] = jnum(v);
  j["meta"] = std::move(meta);
  json pts = json::array();
  for (const auto& p : c.points) {
    json pj;
    pj["axis"] = jnum(p.axis);
    pj["p_success"] = jnum(p.value);
    pj["ci_low"] = jnum(p.ci_low);
    pj["ci_high"] = jnum(p.ci_high);
    pj["n_trials"] = p.trials;
    pj["successes"] = p.successes;
    pts.push_back(std::move(pj));
  }
  j["points"] = std::move(pts);
  return j.dump();
}

std::string campaign_json(const CampaignResult& c) {
  json j;
  j["schema_version"] = 1;
  json pj;
  pj["n"] = c.params.n;
  pj["m"] = c.params.m;
  pj["instances"] = c.params.instances;
  pj["k_strong"] = c.params.k_strong;
  pj["k_total"] = c.params.k_total;
  pj["a1"] = c.params.a1;
  pj["delta"] = c.params.delta;
  pj["seed"] = c.params.seed;
  j["params"] = std::move(pj);
  j["certified"] = c.certified_count;
  j["violations"] = c.violation_count;
  json recs = json::array();
  for (const auto& r : c.records) {
    json rj;
    rj["instance_id"] = r.instance_id;
    rj["seed"] = r.seed;
    rj["n"] = r.n;
    rj["m"] = r.m;
    rj["K"] = jindex_set(r.strong_set);
    rj["kappa"] = jnum(r.kappa);
    rj["best_C"] = jnum(r.best_c);
    rj["margin"] = jnum(r.margin);
    rj["certified"] = r.certified;
    if (r.certified) {
      rj["support_err"] = r.support_err_actual;
      rj["support_bound"] = jnum(r.support_bound);
      rj["l1_err"] = jnum(r.error_actual);
      rj["l1_bound"] = jnum(r.error_bound);
      rj["offk_err"] = jnum(r.offk_err);
      rj["offk_bound"] = jnum(r.offk_bound);
      rj["kgap"] = jnum(r.kgap);
      rj["kgap_bound"] = jnum(r.kgap_bound);
      rj["violation"] = r.violation;
    }
    recs.push_back(std::move(rj));
  }
  j["records"] = std::move(recs);
  return j.dump();
}

}  // namespace lab
}  // namespace sparselab
