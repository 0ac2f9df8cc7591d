#include <doctest.h>

#include <cmath>

#include "panelcf/monte_carlo.hpp"

using namespace panelcf;

namespace {

DGPConfig small_dgp(double noise) {
  DGPConfig cfg;
  cfg.n_units = 12;
  cfg.n_years = 16;
  cfg.treatment_year = 2001;
  cfg.rank = 2;
  cfg.factor_scale = 0.5;
  cfg.noise_sd = noise;
  return cfg;
}

}  // namespace

TEST_CASE("null configs show small bias and sane coverage columns") {
  MonteCarloConfig cfg;
  cfg.configs.emplace_back("null", small_dgp(0.1));
  cfg.estimators = {EstimatorKind::lasso};
  cfg.n_seeds = 24;
  cfg.bootstrap.replications = 200;
  cfg.bootstrap.seed = 7;
  auto rows = run_monte_carlo(cfg);
  REQUIRE(rows.size() == 1);
  const auto& r = rows[0];
  CHECK(r.n_failures == 0);
  CHECK(r.coverage >= 0.0);
  CHECK(r.coverage <= 1.0);
  // |mean bias| below twice the Monte Carlo standard error of the mean
  double mcse = r.rmse / std::sqrt(static_cast<double>(r.n_runs));
  CHECK(std::abs(r.mean_bias) < 2.0 * mcse + 1e-12);
}

TEST_CASE("ATT RMSE weakly increases with the noise level") {
  MonteCarloConfig cfg;
  cfg.configs.emplace_back("sigma=0.02", small_dgp(0.02));
  cfg.configs.emplace_back("sigma=0.2", small_dgp(0.2));
  cfg.configs.emplace_back("sigma=0.6", small_dgp(0.6));
  cfg.estimators = {EstimatorKind::lasso, EstimatorKind::convex};
  cfg.n_seeds = 16;
  cfg.bootstrap.replications = 100;
  cfg.bootstrap.seed = 11;
  auto rows = run_monte_carlo(cfg);
  REQUIRE(rows.size() == 6);
  for (EstimatorKind kind : cfg.estimators) {
    double prev = -1.0;
    for (const auto& r : rows) {
      if (r.estimator != kind) continue;
      CHECK(r.rmse >= prev - 1e-9);
      prev = r.rmse;
    }
  }
}

TEST_CASE("individual run failures are counted, not fatal") {
  DGPConfig bad = small_dgp(0.1);
  bad.treatment_year = 1993;  // T0 = 3 < 5 folds: every lasso CV run fails
  MonteCarloConfig cfg;
  cfg.configs.emplace_back("short-pre", bad);
  cfg.estimators = {EstimatorKind::lasso};
  cfg.n_seeds = 5;
  cfg.bootstrap.seed = 3;
  auto rows = run_monte_carlo(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n_failures == 5);
  CHECK(rows[0].n_runs == 5);
}

TEST_CASE("rendered table carries one row per config-estimator pair") {
  MonteCarloConfig cfg;
  cfg.configs.emplace_back("a", small_dgp(0.1));
  cfg.estimators = {EstimatorKind::convex};
  cfg.n_seeds = 4;
  cfg.bootstrap.replications = 50;
  auto rows = run_monte_carlo(cfg);
  std::string table = render_monte_carlo(rows);
  CHECK(table.find("config\testimator") == 0);
  CHECK(table.find("a\tconvex\t4\t0") != std::string::npos);
}
