#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "panelcf/bootstrap.hpp"
#include "panelcf/cross_validation.hpp"
#include "panelcf/panel.hpp"
#include "panelcf/soft_impute.hpp"
#include "panelcf/types.hpp"

namespace panelcf {

enum class WeightMode { convex, unrestricted };

struct WeightVector {
  std::vector<std::string> donors;
  Vectord weights;
  double intercept = 0.0;
  WeightMode mode = WeightMode::convex;
};

struct GapSeries {
  std::vector<int> years;
  Vectord observed;
  Vectord synthetic;
  Vectord gap;  // observed - synthetic, identically
};

GapSeries make_gap_series(std::vector<int> years, Vectord observed,
                          Vectord synthetic);

struct RmspeDiagnostics {
  double pre = 0;
  double post = 0;
  // post/pre; +inf on a perfect pre-fit with nonzero post, NaN when both zero
  double ratio = 0;
};

RmspeDiagnostics rmspe_diagnostics(const Vectord& gaps_pre, const Vectord& gaps_post);

struct ATTEstimate {
  double point = 0;
  double se = 0;
  double ci_lower = 0, ci_upper = 0;
  double p_bootstrap = 1;
  double p_placebo = std::numeric_limits<double>::quiet_NaN();
  double rmspe_pre = 0, rmspe_post = 0, rmspe_ratio = 0;
  std::string stars;
  std::uint64_t seed = 0;
};

std::string significance_stars(double p);

ATTEstimate assemble_att(double point, const BootstrapResult& boot,
                         const RmspeDiagnostics& diag,
                         double p_placebo = std::numeric_limits<double>::quiet_NaN(),
                         std::uint64_t seed = 0);

// --- per-outcome estimator pipelines ---------------------------------------

struct ConvexScmOptions {
  double tol = 1e-10;
  int max_iter = 10000;
};

struct LassoScmOptions {
  PenaltyGrid grid = default_lasso_grid();
  int folds = 5;
  double tol = 1e-9;
  int max_sweeps = 100000;
  std::optional<double> fixed_lambda;  // skips CV when set
};

struct McOptions {
  int grid_points = 20;
  int folds = 5;
  FeMode fe = FeMode::two_way;
  CvMaskMode cv_mask = CvMaskMode::treated_row;
  double tol = 1e-6;
  int max_iter = 500;
  std::optional<double> fixed_lambda;  // skips regime selection when set
};

struct ScmRun {
  WeightVector weights;
  GapSeries gaps;
  double att = 0;  // mean post-period gap
  RmspeDiagnostics rmspe;
  std::optional<CVReport> cv;  // lasso only
  std::vector<std::string> warnings;
};

ScmRun convex_scm_analysis(const PanelDataset& panel, const TreatmentSpec& spec,
                           const std::string& outcome,
                           const ConvexScmOptions& opts = {});

ScmRun lasso_scm_analysis(const PanelDataset& panel, const TreatmentSpec& spec,
                          const std::string& outcome,
                          const LassoScmOptions& opts = {});

enum class Regime { low, high };

struct McRegimeRun {
  double lambda = 0;
  GapSeries gaps;
  double att = 0;
  RmspeDiagnostics rmspe;
  int rank = 0;
  bool converged = true;
};

struct McRun {
  std::optional<ShrinkageRegimes> regimes;
  McRegimeRun low;
  McRegimeRun high;  // equals low when a fixed lambda was supplied
  std::vector<std::string> warnings;
};

McRun mc_analysis(const PanelDataset& panel, const TreatmentSpec& spec,
                  const std::string& outcome, const McOptions& opts = {});

// One-outcome completion problem: everything observed except treated x post.
struct CompletionProblem {
  Matrixd y;
  MaskArray omega;
  Index treated_row = 0;
  Index t0 = 0;
  FeMode fe = FeMode::two_way;
};

CompletionProblem make_completion_problem(const PanelDataset& panel,
                                          const TreatmentSpec& spec,
                                          const std::string& outcome,
                                          FeMode fe = FeMode::two_way);

// --- placebo-in-space -------------------------------------------------------

enum class EstimatorKind { convex, lasso, mc };

struct PlaceboOptions {
  EstimatorKind estimator = EstimatorKind::convex;
  ConvexScmOptions convex;
  LassoScmOptions lasso;
  McOptions mc;
  Regime mc_regime = Regime::high;
  int workers = 1;
};

struct PlaceboUnit {
  std::string unit;
  double ratio = 0;
  bool failed = false;
  std::string message;
};

struct PlaceboResult {
  std::vector<PlaceboUnit> units;  // panel unit order
  double treated_ratio = 0;
  double p_value = 1;
  int n_evaluated = 0;
  std::vector<std::string> warnings;
};

// Reruns the configured estimator once per unit as pseudo-treated (same
// treatment year). Hyperparameters are resolved on the true treated unit
// first and held fixed; the true treated unit is removed from the donor pool
// of every placebo run. p = rank of the treated ratio / units evaluated.
PlaceboResult placebo_in_space(const PanelDataset& panel, const TreatmentSpec& spec,
                               const std::string& outcome,
                               const PlaceboOptions& opts = {});

}  // namespace panelcf
