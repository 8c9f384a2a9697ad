// sl: command-line front end for the sparselab shared library.
//
// Talks to the core exclusively through the extern-C API in sparselab.h;
// file parsing and writing live here, all numerics live behind the API.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparselab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void die(sl_status s, const std::string& context) {
  int code = (s == SL_ERR_INVALID_ARGUMENT) ? kExitUsage : kExitNumerical;
  throw CliError{code, context + ": " + sl_status_name(s) + " (" + sl_last_error() + ")"};
}

void check(sl_status s, const std::string& context) {
  if (s != SL_OK) die(s, context);
}

std::string take_string(sl_status s, char** owned, const std::string& context) {
  check(s, context);
  std::string out(*owned);
  sl_string_free(*owned);
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError{kExitUsage, "cannot open output file " + path};
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CliError{kExitUsage, "cannot open input file " + path};
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw CliError{kExitUsage, "cannot parse number '" + tok + "'"};
    }
    tok.clear();
  };
  for (char c : text) {
    if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t')
      flush();
    else
      tok += c;
  }
  flush();
  return out;
}

// rows from a CSV file; every row must have the same column count
sl_matrix* load_matrix(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<double> data;
  std::size_t rows = 0, cols = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row = parse_numbers(line);
    if (row.empty()) continue;
    if (cols == 0)
      cols = row.size();
    else if (row.size() != cols)
      throw CliError{kExitUsage, "ragged matrix CSV in " + path};
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw CliError{kExitUsage, "empty matrix file " + path};
  sl_matrix* m = nullptr;
  check(sl_matrix_from_data(rows, cols, data.data(), &m), "load matrix");
  return m;
}

std::vector<uint64_t> parse_indices(const std::string& text) {
  std::vector<uint64_t> out;
  for (double v : parse_numbers(text)) out.push_back(static_cast<uint64_t>(v));
  return out;
}

std::string estimate_csv(sl_result* res) {
  std::vector<double> x(sl_result_length(res));
  check(sl_result_estimate(res, x.data(), x.size()), "read estimate");
  std::string out;
  for (double v : x) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"sparse-recovery laboratory"};
  app.require_subcommand(1);

  // shared options, registered per subcommand as needed
  uint64_t seed = 0, n = 200, m = 0, trials = 100;
  double delta = 0.555;
  std::string out_path, format = "csv";
  uint32_t workers = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", workers, "worker threads");
  };

  // gen-matrix
  auto* gm = app.add_subcommand("gen-matrix", "sample a Gaussian measurement matrix");
  gm->add_option("--m", m, "rows")->required();
  gm->add_option("--n", n, "columns")->required();
  add_common(gm);

  // gen-signal
  auto* gs = app.add_subcommand("gen-signal", "draw a signal from one of the models");
  std::string model = "model";
  uint64_t k_strong = 0, k_total = 0;
  double a1 = 1.0, tail = 0.0, gamma1 = 0.5, p1 = 0.5, p2 = 0.1;
  std::string amp_law = "gaussian";
  gs->add_option("--model", model, "model|nonuniform")
      ->check(CLI::IsMember({"model", "nonuniform"}));
  gs->add_option("--n", n, "signal length")->required();
  gs->add_option("--k-strong", k_strong, "strong-set size");
  gs->add_option("--k-total", k_total, "total support size");
  gs->add_option("--a1", a1, "amplitude floor");
  gs->add_option("--tail", tail, "tail l1 mass");
  gs->add_option("--gamma1", gamma1, "class-1 fraction");
  gs->add_option("--p1", p1, "class-1 nonzero probability");
  gs->add_option("--p2", p2, "class-2 nonzero probability");
  gs->add_option("--amp-law", amp_law, "gaussian|flat")
      ->check(CLI::IsMember({"gaussian", "flat"}));
  add_common(gs);

  // solve
  auto* sv = app.add_subcommand("solve", "recover a signal from measurements");
  std::string algo = "l1", matrix_path, y_path, signal_path, weights_path;
  double eps_prime = 0.1, big_w = 10.0;
  uint64_t t_max = 4;
  sv->add_option("--algo", algo, "l1|candes|modified")
      ->check(CLI::IsMember({"l1", "candes", "modified"}));
  sv->add_option("--matrix", matrix_path, "measurement matrix CSV")->required();
  sv->add_option("--y", y_path, "measurement vector file");
  sv->add_option("--signal", signal_path, "true signal file (y computed as Ax)");
  sv->add_option("--weights", weights_path, "weight vector file (weighted l1)");
  sv->add_option("--eps-prime", eps_prime, "reweighting smoothing constant");
  sv->add_option("--t-max", t_max, "max reweighting iterations");
  sv->add_option("--W", big_w, "off-set weight of the two-stage algorithm");
  sv->add_option("--k-strong", k_strong, "strong-set size for the two-stage algorithm");
  add_common(sv);

  // kappa
  auto* kp = app.add_subcommand("kappa", "null-space concentration constant for a set K");
  std::string set_spec, xk_spec;
  kp->add_option("--matrix", matrix_path, "measurement matrix CSV")->required();
  kp->add_option("--set", set_spec, "comma-separated 0-based indices of K")->required();
  add_common(kp);

  // robustness
  auto* rb = app.add_subcommand("robustness", "weak-robustness condition check");
  double c_value = 0.0;
  bool find_c = false;
  rb->add_option("--matrix", matrix_path, "measurement matrix CSV")->required();
  rb->add_option("--set", set_spec, "comma-separated 0-based indices of K")->required();
  rb->add_option("--xk", xk_spec, "signal values on K, comma-separated")->required();
  rb->add_option("--C", c_value, "constant C > 1 to test");
  rb->add_flag("--find-C", find_c, "search for the largest admissible C");
  add_common(rb);

  // phase-rho
  auto* pr = app.add_subcommand("phase-rho", "empirical plain-l1 weak threshold");
  std::string grid_spec = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::string trials_out;
  pr->add_option("--delta", delta, "undersampling ratio m/n");
  pr->add_option("--n", n, "signal length");
  pr->add_option("--trials", trials, "trials per grid point");
  pr->add_option("--grid", grid_spec, "comma-separated rho grid");
  pr->add_option("--trials-out", trials_out, "optional per-trial CSV log path");
  add_common(pr);

  // phase-delta-c
  auto* pd = app.add_subcommand("phase-delta-c",
                                "empirical critical delta for weighted l1");
  double weight_ratio = 10.0;
  std::string dgrid_spec = "0.2,0.3,0.4,0.5,0.6,0.7,0.8";
  pd->add_option("--gamma1", gamma1, "class-1 fraction");
  pd->add_option("--p1", p1, "class-1 nonzero probability");
  pd->add_option("--p2", p2, "class-2 nonzero probability");
  pd->add_option("--weight-ratio", weight_ratio, "W2/W1");
  pd->add_option("--n", n, "signal length");
  pd->add_option("--trials", trials, "trials per grid point");
  pd->add_option("--grid", dgrid_spec, "comma-separated delta grid");
  pd->add_option("--trials-out", trials_out, "optional per-trial CSV log path");
  add_common(pd);

  // sweep-fig1
  auto* sf = app.add_subcommand("sweep-fig1",
                                "achieved sparsity factor of the two-stage algorithm");
  double eps = 0.01, rho_f = 0.0;
  std::string p1grid_spec = "0.95,1.0";
  sf->add_option("--delta", delta, "undersampling ratio m/n");
  sf->add_option("--eps", eps, "strong-set shrink factor");
  sf->add_option("--W", big_w, "off-set weight");
  sf->add_option("--grid", p1grid_spec, "comma-separated P1 grid");
  sf->add_option("--n", n, "signal length");
  sf->add_option("--trials", trials, "trials per evaluation");
  sf->add_option("--rho-f", rho_f, "weak threshold override (0 = estimate)");
  add_common(sf);

  // certify-campaign
  auto* cc = app.add_subcommand("certify-campaign",
                                "per-instance robustness certificates and bound checks");
  uint64_t count = 200;
  cc->add_option("--n", n, "signal length");
  cc->add_option("--m", m, "measurement count");
  cc->add_option("--count", count, "instance count");
  cc->add_option("--k-strong", k_strong, "strong-set size");
  cc->add_option("--k-total", k_total, "total support size");
  cc->add_option("--a1", a1, "amplitude floor");
  cc->add_option("--tail", tail, "tail l1 mass");
  add_common(cc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (gm->parsed()) {
    sl_matrix* a = nullptr;
    check(sl_matrix_gaussian(m, n, seed, &a), "gen-matrix");
    char* text = nullptr;
    std::string body = (format == "json")
                           ? take_string(sl_matrix_to_json(a, &text), &text, "serialize")
                           : take_string(sl_matrix_to_csv(a, &text), &text, "serialize");
    sl_matrix_free(a);
    write_output(out_path, body);
    return kExitOk;
  }

  if (gs->parsed()) {
    sl_signal* s = nullptr;
    if (model == "model") {
      if (k_total == 0) k_total = k_strong;
      check(sl_signal_model(n, k_strong, a1, tail, k_total, seed, &s), "gen-signal");
    } else {
      int law = (amp_law == "flat") ? SL_AMP_FLAT : SL_AMP_GAUSSIAN;
      check(sl_signal_nonuniform(n, gamma1, p1, p2, law, seed, &s), "gen-signal");
    }
    char* text = nullptr;
    std::string values = take_string(sl_signal_to_csv(s, &text), &text, "serialize");
    std::string meta = take_string(sl_signal_metadata_json(s, &text), &text, "serialize");
    sl_signal_free(s);
    write_output(out_path, values);
    if (!out_path.empty() && out_path != "-")
      write_output(out_path + ".json", meta + "\n");
    else
      std::cout << meta << "\n";
    return kExitOk;
  }

  if (sv->parsed()) {
    sl_matrix* a = load_matrix(matrix_path);
    std::vector<double> y;
    if (!y_path.empty()) {
      y = parse_numbers(read_file(y_path));
    } else if (!signal_path.empty()) {
      std::vector<double> x = parse_numbers(read_file(signal_path));
      y.resize(sl_matrix_rows(a));
      check(sl_matrix_apply(a, x.data(), x.size(), y.data(), y.size()), "apply");
    } else {
      sl_matrix_free(a);
      throw CliError{kExitUsage, "solve: need --y or --signal"};
    }
    sl_result* res = nullptr;
    if (!weights_path.empty()) {
      std::vector<double> w = parse_numbers(read_file(weights_path));
      check(sl_solve_weighted_l1(a, y.data(), y.size(), w.data(), w.size(), &res),
            "solve");
    } else if (algo == "l1") {
      check(sl_solve_l1(a, y.data(), y.size(), &res), "solve");
    } else if (algo == "candes") {
      check(sl_reweight_candes(a, y.data(), y.size(), eps_prime, t_max, &res), "solve");
    } else {
      check(sl_reweight_modified(a, y.data(), y.size(), k_strong, big_w, &res),
            "solve");
    }
    std::string body;
    if (format == "json") {
      char* text = nullptr;
      body = take_string(sl_result_to_json(res, algo.c_str(), &text), &text, "serialize");
    } else {
      body = estimate_csv(res);
    }
    sl_result_free(res);
    sl_matrix_free(a);
    write_output(out_path, body);
    return kExitOk;
  }

  if (kp->parsed()) {
    sl_matrix* a = load_matrix(matrix_path);
    std::vector<uint64_t> k = parse_indices(set_spec);
    double kappa = 0.0;
    sl_status s = sl_kappa(a, k.data(), k.size(), &kappa);
    sl_matrix_free(a);
    check(s, "kappa");
    std::ostringstream body;
    body << "{\"schema_version\":1,\"kappa\":";
    if (std::isfinite(kappa))
      body << kappa;
    else
      body << "\"inf\"";
    body << ",\"set_size\":" << k.size() << "}\n";
    write_output(out_path, body.str());
    return kExitOk;
  }

  if (rb->parsed()) {
    sl_matrix* a = load_matrix(matrix_path);
    std::vector<uint64_t> k = parse_indices(set_spec);
    std::vector<double> xk = parse_numbers(xk_spec);
    std::ostringstream body;
    if (find_c) {
      double best = 0.0;
      sl_status s = sl_best_c(a, k.data(), k.size(), xk.data(), &best);
      sl_matrix_free(a);
      check(s, "robustness");
      body << "{\"schema_version\":1,\"best_C\":";
      if (std::isfinite(best))
        body << best;
      else
        body << "\"inf\"";
      body << ",\"certified\":" << (best > 1.0 ? "true" : "false") << "}\n";
    } else {
      if (c_value <= 1.0) {
        sl_matrix_free(a);
        throw CliError{kExitUsage, "robustness: need --C > 1 or --find-C"};
      }
      int holds = 0;
      double margin = 0.0;
      sl_status s =
          sl_weak_robustness(a, k.data(), k.size(), xk.data(), c_value, &holds, &margin);
      sl_matrix_free(a);
      check(s, "robustness");
      body << "{\"schema_version\":1,\"C\":" << c_value
           << ",\"holds\":" << (holds ? "true" : "false") << ",\"margin\":" << margin
           << "}\n";
    }
    write_output(out_path, body.str());
    return kExitOk;
  }

  auto emit_curve = [&](sl_curve* curve) {
    char* text = nullptr;
    std::string body = (format == "json")
                           ? take_string(sl_curve_to_json(curve, &text), &text, "serialize")
                           : take_string(sl_curve_to_csv(curve, &text), &text, "serialize");
    if (!trials_out.empty()) {
      char* tcsv = nullptr;
      write_output(trials_out,
                   take_string(sl_curve_trials_csv(curve, &tcsv), &tcsv, "serialize"));
    }
    sl_curve_free(curve);
    write_output(out_path, body);
  };

  if (pr->parsed()) {
    std::vector<double> grid = parse_numbers(grid_spec);
    sl_curve* curve = nullptr;
    check(sl_phase_rho(delta, n, trials, grid.data(), grid.size(), seed, workers, &curve),
          "phase-rho");
    emit_curve(curve);
    return kExitOk;
  }

  if (pd->parsed()) {
    std::vector<double> grid = parse_numbers(dgrid_spec);
    sl_curve* curve = nullptr;
    check(sl_phase_delta_c(gamma1, p1, p2, weight_ratio, n, trials, grid.data(),
                           grid.size(), seed, workers, &curve),
          "phase-delta-c");
    emit_curve(curve);
    return kExitOk;
  }

  if (sf->parsed()) {
    std::vector<double> grid = parse_numbers(p1grid_spec);
    sl_curve* curve = nullptr;
    check(sl_sweep_fig1(delta, eps, big_w, grid.data(), grid.size(), n, trials, seed,
                        rho_f, workers, &curve),
          "sweep-fig1");
    emit_curve(curve);
    return kExitOk;
  }

  if (cc->parsed()) {
    sl_campaign* camp = nullptr;
    check(sl_certify_campaign(n, m, count, k_strong, k_total, a1, tail, seed, workers,
                              &camp),
          "certify-campaign");
    char* text = nullptr;
    std::string body = take_string(sl_campaign_to_json(camp, &text), &text, "serialize");
    sl_campaign_free(camp);
    write_output(out_path, body + "\n");
    return kExitOk;
  }

  return kExitUsage;
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CliError& e) {
    std::cerr << "sl: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "sl: " << e.what() << "\n";
    return kExitNumerical;
  }
}
