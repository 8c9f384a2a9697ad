#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "sparselab.h"

namespace {

std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  sl_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("matrix lifecycle through the C surface") {
  sl_matrix* a = nullptr;
  REQUIRE(sl_matrix_gaussian(3, 5, 17, &a) == SL_OK);
  CHECK(sl_matrix_rows(a) == 3);
  CHECK(sl_matrix_cols(a) == 5);

  std::vector<double> buf(15);
  REQUIRE(sl_matrix_data(a, buf.data(), buf.size()) == SL_OK);

  // round trip through from_data
  sl_matrix* b = nullptr;
  REQUIRE(sl_matrix_from_data(3, 5, buf.data(), &b) == SL_OK);
  char* csv_a = nullptr;
  char* csv_b = nullptr;
  REQUIRE(sl_matrix_to_csv(a, &csv_a) == SL_OK);
  REQUIRE(sl_matrix_to_csv(b, &csv_b) == SL_OK);
  CHECK(take(csv_a) == take(csv_b));

  // apply: y = A x against a manual expansion
  std::vector<double> x{1, -1, 0, 2, 0.5}, y(3);
  REQUIRE(sl_matrix_apply(a, x.data(), x.size(), y.data(), y.size()) == SL_OK);
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 5; ++j) s += buf[i * 5 + j] * x[j];
    CHECK(y[i] == doctest::Approx(s));
  }
  sl_matrix_free(a);
  sl_matrix_free(b);
}

TEST_CASE("error reporting contract") {
  CHECK(sl_matrix_gaussian(3, 5, 0, nullptr) == SL_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(sl_last_error()) > 0);
  CHECK(std::string(sl_status_name(SL_OK)) == "ok");
  CHECK(std::strlen(sl_status_name(SL_ERR_UNBOUNDED)) > 0);

  sl_matrix* a = nullptr;
  REQUIRE(sl_matrix_gaussian(2, 30, 1, &a) == SL_OK);
  std::vector<uint64_t> big(20);
  for (uint64_t i = 0; i < 20; ++i) big[i] = i;
  double kap = 0.0;
  CHECK(sl_kappa(a, big.data(), big.size(), &kap) == SL_ERR_SET_TOO_LARGE);
  uint64_t oob[1] = {99};
  CHECK(sl_kappa(a, oob, 1, &kap) == SL_ERR_INVALID_ARGUMENT);
  sl_matrix_free(a);
}

TEST_CASE("model signal and recovery end to end") {
  sl_signal* s = nullptr;
  REQUIRE(sl_signal_model(30, 4, 1.0, 0.0, 4, 5, &s) == SL_OK);
  CHECK(sl_signal_length(s) == 30);
  std::vector<double> x(30);
  REQUIRE(sl_signal_values(s, x.data(), x.size()) == SL_OK);

  char* meta = nullptr;
  REQUIRE(sl_signal_metadata_json(s, &meta) == SL_OK);
  std::string mj = take(meta);
  CHECK(mj.find("\"schema_version\":1") != std::string::npos);
  CHECK(mj.find("\"n\":30") != std::string::npos);

  sl_matrix* a = nullptr;
  REQUIRE(sl_matrix_gaussian(20, 30, 6, &a) == SL_OK);
  std::vector<double> y(20);
  REQUIRE(sl_matrix_apply(a, x.data(), 30, y.data(), 20) == SL_OK);

  sl_result* res = nullptr;
  REQUIRE(sl_solve_l1(a, y.data(), 20, &res) == SL_OK);
  REQUIRE(sl_result_length(res) == 30);
  std::vector<double> xh(30);
  REQUIRE(sl_result_estimate(res, xh.data(), 30) == SL_OK);
  double err = 0.0;
  for (int j = 0; j < 30; ++j) err = std::max(err, std::fabs(xh[j] - x[j]));
  CHECK(err < 1e-8);
  CHECK(sl_result_residual(res) < 1e-8);
  CHECK(sl_result_stage_count(res) == 1);

  char* rj = nullptr;
  REQUIRE(sl_result_to_json(res, "l1", &rj) == SL_OK);
  CHECK(take(rj).find("\"algo\":\"l1\"") != std::string::npos);
  sl_result_free(res);

  // two-stage solver exposes its selected set
  sl_result* two = nullptr;
  REQUIRE(sl_reweight_modified(a, y.data(), 20, 4, 10.0, &two) == SL_OK);
  CHECK(sl_result_selected_count(two) == 4);
  std::vector<uint64_t> sel(4);
  REQUIRE(sl_result_selected(two, sel.data(), 4) == SL_OK);
  for (std::size_t i = 1; i < 4; ++i) CHECK(sel[i - 1] < sel[i]);
  sl_result_free(two);

  sl_matrix_free(a);
  sl_signal_free(s);
}

TEST_CASE("certificates through the C surface match hand values") {
  double data[2] = {1.0, 2.0};
  sl_matrix* a = nullptr;
  REQUIRE(sl_matrix_from_data(1, 2, data, &a) == SL_OK);
  uint64_t k0[1] = {0};
  double kap = 0.0;
  REQUIRE(sl_kappa(a, k0, 1, &kap) == SL_OK);
  CHECK(kap == doctest::Approx(2.0).epsilon(1e-9));

  double xk[1] = {5.0};
  int holds = 1;
  double margin = 0.0;
  REQUIRE(sl_weak_robustness(a, k0, 1, xk, 2.0, &holds, &margin) == SL_OK);
  CHECK(holds == 0);

  double best = 0.0;
  REQUIRE(sl_best_c(a, k0, 1, xk, &best) == SL_OK);
  CHECK(best == doctest::Approx(1.0));

  double bound = 0.0;
  REQUIRE(sl_recovery_error_bound(2.0, 0.5, 0.3, &bound) == SL_OK);
  CHECK(bound == doctest::Approx(1.8));
  CHECK(sl_recovery_error_bound(0.5, 0.5, 0.3, &bound) == SL_ERR_INVALID_ARGUMENT);
  sl_matrix_free(a);
}

TEST_CASE("harness curves and campaign through the C surface") {
  double grid[3] = {0.2, 0.5, 0.8};
  sl_curve* c = nullptr;
  REQUIRE(sl_phase_rho(0.5, 30, 10, grid, 3, 3, 2, &c) == SL_OK);
  char* csv = nullptr;
  REQUIRE(sl_curve_to_csv(c, &csv) == SL_OK);
  std::string body = take(csv);
  CHECK(body.rfind("axis,p_success,ci_low,ci_high,n_trials\n", 0) == 0);
  double thr = 0.0;
  REQUIRE(sl_curve_threshold(c, &thr) == SL_OK);
  char* tcsv = nullptr;
  REQUIRE(sl_curve_trials_csv(c, &tcsv) == SL_OK);
  CHECK(take(tcsv).rfind("trial_id,seed,algo,", 0) == 0);
  sl_curve_free(c);

  sl_campaign* camp = nullptr;
  REQUIRE(sl_certify_campaign(20, 12, 4, 3, 4, 1.0, 0.05, 9, 2, &camp) == SL_OK);
  CHECK(sl_campaign_violations(camp) == 0);
  char* cj = nullptr;
  REQUIRE(sl_campaign_to_json(camp, &cj) == SL_OK);
  std::string js = take(cj);
  CHECK(js.find("\"schema_version\":1") != std::string::npos);
  sl_campaign_free(camp);
}
