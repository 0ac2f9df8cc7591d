#pragma once

#include <string>
#include <vector>

#include "panelcf/analysis.hpp"
#include "panelcf/dgp.hpp"

namespace panelcf {

struct MonteCarloConfig {
  std::vector<std::pair<std::string, DGPConfig>> configs;  // label, generator
  std::vector<EstimatorKind> estimators;
  int n_seeds = 100;
  BootstrapConfig bootstrap;
  bool with_placebo = false;  // mean placebo p column (expensive)
  int workers = 1;
  LassoScmOptions lasso;
  McOptions mc;
  ConvexScmOptions convex;
};

struct MonteCarloRow {
  std::string config_label;
  EstimatorKind estimator;
  int n_runs = 0;
  int n_failures = 0;
  double mean_bias = 0;
  double rmse = 0;
  double coverage = 0;        // fraction of CIs containing the true ATT
  double mean_placebo_p = 0;  // NaN unless with_placebo
};

std::vector<MonteCarloRow> run_monte_carlo(const MonteCarloConfig& cfg);

std::string render_monte_carlo(const std::vector<MonteCarloRow>& rows);

const char* estimator_name(EstimatorKind kind);

}  // namespace panelcf
