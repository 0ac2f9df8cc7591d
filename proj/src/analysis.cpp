#include "panelcf/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "panelcf/lasso.hpp"
#include "panelcf/parallel.hpp"
#include "panelcf/simplex.hpp"

namespace panelcf {

GapSeries make_gap_series(std::vector<int> years, Vectord observed,
                          Vectord synthetic) {
  if (observed.size() != synthetic.size() ||
      static_cast<std::size_t>(observed.size()) != years.size()) {
    throw std::invalid_argument("gap series: length mismatch");
  }
  GapSeries g;
  g.years = std::move(years);
  g.observed = std::move(observed);
  g.synthetic = std::move(synthetic);
  g.gap = g.observed - g.synthetic;
  return g;
}

RmspeDiagnostics rmspe_diagnostics(const Vectord& gaps_pre,
                                   const Vectord& gaps_post) {
  RmspeDiagnostics d;
  d.pre = rmspe(gaps_pre);
  d.post = rmspe(gaps_post);
  if (d.pre > 0) {
    d.ratio = d.post / d.pre;
  } else {
    d.ratio = d.post > 0 ? std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

std::string significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

ATTEstimate assemble_att(double point, const BootstrapResult& boot,
                         const RmspeDiagnostics& diag, double p_placebo,
                         std::uint64_t seed) {
  ATTEstimate e;
  e.point = point;
  e.se = boot.se;
  e.ci_lower = boot.ci_lower;
  e.ci_upper = boot.ci_upper;
  e.p_bootstrap = boot.p_value;
  e.p_placebo = p_placebo;
  e.rmspe_pre = diag.pre;
  e.rmspe_post = diag.post;
  e.rmspe_ratio = diag.ratio;
  e.stars = significance_stars(boot.p_value);
  e.seed = seed;
  return e;
}

namespace {

// Shared tail of both SCM pipelines: counterfactual over all years, gap
// series and RMSPE diagnostics.
ScmRun finish_scm_run(const SplitData& split, const WeightVector& w) {
  const Index t0 = split.y_pre.size();
  const Index t2 = split.y_post.size();
  Matrixd x_full(t0 + t2, split.x_pre.cols());
  x_full.topRows(t0) = split.x_pre;
  x_full.bottomRows(t2) = split.x_post;
  Vectord observed(t0 + t2);
  observed.head(t0) = split.y_pre;
  observed.tail(t2) = split.y_post;

  Vectord synthetic = predict_counterfactual<double>(w.weights, w.intercept, x_full);

  std::vector<int> years = split.pre_years;
  years.insert(years.end(), split.post_years.begin(), split.post_years.end());

  ScmRun run;
  run.weights = w;
  run.gaps = make_gap_series(std::move(years), std::move(observed),
                             std::move(synthetic));
  run.rmspe = rmspe_diagnostics(run.gaps.gap.head(t0), run.gaps.gap.tail(t2));
  run.att = run.gaps.gap.tail(t2).mean();
  run.warnings = split.warnings;
  return run;
}

}  // namespace

ScmRun convex_scm_analysis(const PanelDataset& panel, const TreatmentSpec& spec,
                           const std::string& outcome,
                           const ConvexScmOptions& opts) {
  SplitData split = split_pre_post(panel, spec, outcome);
  auto fit = fit_convex_weights<double>(split.y_pre, split.x_pre, opts.tol,
                                        opts.max_iter);
  WeightVector w;
  w.donors = split.donors;
  w.weights = fit.weights;
  w.intercept = 0.0;
  w.mode = WeightMode::convex;
  ScmRun run = finish_scm_run(split, w);
  if (!fit.converged) {
    run.warnings.push_back("convex fit stopped before convergence; objective " +
                           std::to_string(fit.objective));
  }
  return run;
}

ScmRun lasso_scm_analysis(const PanelDataset& panel, const TreatmentSpec& spec,
                          const std::string& outcome,
                          const LassoScmOptions& opts) {
  SplitData split = split_pre_post(panel, spec, outcome);
  const Index t0 = split.y_pre.size();
  if (!opts.fixed_lambda && t0 < opts.folds) {
    throw std::invalid_argument("pre-period too short for " +
                                std::to_string(opts.folds) + "-fold CV");
  }

  double lambda;
  std::optional<CVReport> cv;
  if (opts.fixed_lambda) {
    lambda = *opts.fixed_lambda;
  } else {
    cv = cv_select_lambda(split.y_pre, split.x_pre, opts.grid, opts.folds,
                          opts.tol, opts.max_sweeps);
    lambda = cv->selected_lambda;
  }

  auto fit = fit_lasso_weights<double>(split.y_pre, split.x_pre, lambda,
                                       opts.tol, opts.max_sweeps);
  WeightVector w;
  w.donors = split.donors;
  w.weights = fit.weights;
  w.intercept = fit.intercept;
  w.mode = WeightMode::unrestricted;
  ScmRun run = finish_scm_run(split, w);
  run.cv = std::move(cv);
  for (Index j : fit.dropped_columns) {
    run.warnings.push_back("donor '" + split.donors[static_cast<std::size_t>(j)] +
                           "' has zero variance; weight forced to 0");
  }
  if (!fit.converged) {
    run.warnings.push_back("lasso did not converge within sweep limit");
  }
  return run;
}

CompletionProblem make_completion_problem(const PanelDataset& panel,
                                          const TreatmentSpec& spec,
                                          const std::string& outcome, FeMode fe) {
  int k = panel.outcome_index(outcome);
  if (k < 0) throw std::invalid_argument("unknown outcome '" + outcome + "'");
  int treated = panel.unit_index(spec.treated_unit);
  if (treated < 0) {
    throw std::invalid_argument("treated unit '" + spec.treated_unit +
                                "' not in panel");
  }
  if (!panel.balanced(k)) {
    throw std::invalid_argument("outcome '" + outcome +
                                "' is unbalanced; completion problem undefined");
  }
  CompletionProblem p;
  p.y = panel.values[k];
  p.omega = MaskArray::Constant(panel.n_units(), panel.n_years(), true);
  p.treated_row = treated;
  p.t0 = static_cast<Index>(spec.pre_years.size());
  p.fe = fe;
  for (Index j = p.t0; j < panel.n_years(); ++j) p.omega(treated, j) = false;
  return p;
}

namespace {

McRegimeRun run_mc_at_lambda(const CompletionProblem& prob,
                             const TreatmentSpec& spec, double lambda,
                             const McOptions& opts) {
  auto fit = soft_impute_path<double>(prob.y, prob.omega, prob.fe, lambda,
                                      opts.tol, opts.max_iter);
  const Index t = prob.y.cols();
  std::vector<int> years = spec.pre_years;
  years.insert(years.end(), spec.post_years.begin(), spec.post_years.end());
  Vectord observed = prob.y.row(prob.treated_row).transpose();
  Vectord synthetic = fit.completed.row(prob.treated_row).transpose();

  McRegimeRun run;
  run.lambda = lambda;
  run.gaps = make_gap_series(std::move(years), std::move(observed),
                             std::move(synthetic));
  run.rmspe = rmspe_diagnostics(run.gaps.gap.head(prob.t0),
                                run.gaps.gap.tail(t - prob.t0));
  run.att = run.gaps.gap.tail(t - prob.t0).mean();
  run.rank = fit.rank;
  run.converged = fit.converged;
  return run;
}

}  // namespace

McRun mc_analysis(const PanelDataset& panel, const TreatmentSpec& spec,
                  const std::string& outcome, const McOptions& opts) {
  CompletionProblem prob = make_completion_problem(panel, spec, outcome, opts.fe);
  McRun run;
  if (opts.fixed_lambda) {
    run.low = run_mc_at_lambda(prob, spec, *opts.fixed_lambda, opts);
    run.high = run.low;
  } else {
    if (prob.t0 < opts.folds) {
      throw std::invalid_argument("pre-period too short for " +
                                  std::to_string(opts.folds) + "-fold CV");
    }
    PenaltyGrid grid =
        build_completion_grid(prob.y, prob.omega, prob.fe, opts.grid_points);
    run.regimes = select_completion_regimes(prob.y, prob.omega, prob.fe,
                                            prob.treated_row, prob.t0, grid,
                                            opts.folds, opts.cv_mask, opts.tol,
                                            opts.max_iter);
    run.low = run_mc_at_lambda(prob, spec, run.regimes->lambda_low, opts);
    run.high = run_mc_at_lambda(prob, spec, run.regimes->lambda_high, opts);
  }
  if (!run.low.converged || !run.high.converged) {
    run.warnings.push_back("completion stopped before convergence");
  }
  return run;
}

namespace {

// Ratio for one pseudo-treated unit under fixed hyperparameters.
double placebo_ratio(const PanelDataset& panel, const TreatmentSpec& base,
                     const std::string& unit, const std::string& outcome,
                     const PlaceboOptions& opts) {
  TreatmentSpec spec = make_treatment_spec(panel, unit, base.treatment_year);
  RmspeDiagnostics diag;
  switch (opts.estimator) {
    case EstimatorKind::convex:
      diag = convex_scm_analysis(panel, spec, outcome, opts.convex).rmspe;
      break;
    case EstimatorKind::lasso: {
      LassoScmOptions lo = opts.lasso;  // lambda already fixed by caller
      diag = lasso_scm_analysis(panel, spec, outcome, lo).rmspe;
      break;
    }
    case EstimatorKind::mc: {
      McOptions mo = opts.mc;  // lambda already fixed by caller
      diag = mc_analysis(panel, spec, outcome, mo).low.rmspe;
      break;
    }
  }
  if (std::isnan(diag.ratio)) {
    throw std::domain_error("degenerate fit: zero pre and post RMSPE");
  }
  return diag.ratio;
}

}  // namespace

PlaceboResult placebo_in_space(const PanelDataset& panel, const TreatmentSpec& spec,
                               const std::string& outcome,
                               const PlaceboOptions& opts) {
  if (panel.n_units() < 3) {
    throw std::invalid_argument("placebo test needs at least 2 donors");
  }
  int treated = panel.unit_index(spec.treated_unit);
  if (treated < 0) {
    throw std::invalid_argument("treated unit '" + spec.treated_unit +
                                "' not in panel");
  }

  // Resolve data-driven hyperparameters once, on the true treated unit, so
  // every placebo run uses the same estimator configuration.
  PlaceboOptions fixed = opts;
  if (opts.estimator == EstimatorKind::lasso && !opts.lasso.fixed_lambda) {
    ScmRun treated_run = lasso_scm_analysis(panel, spec, outcome, opts.lasso);
    fixed.lasso.fixed_lambda = treated_run.cv->selected_lambda;
  }
  if (opts.estimator == EstimatorKind::mc && !opts.mc.fixed_lambda) {
    McRun treated_run = mc_analysis(panel, spec, outcome, opts.mc);
    fixed.mc.fixed_lambda = opts.mc_regime == Regime::low
                                ? treated_run.low.lambda
                                : treated_run.high.lambda;
  }

  // The true treated unit is removed from every placebo donor pool: its
  // post-treatment outcomes are treated, not counterfactual.
  PanelDataset donors_only;
  {
    std::vector<ExclusionEntry> drop{{spec.treated_unit, "treated"}};
    donors_only = filter_donors(panel, drop).panel;
  }

  PlaceboResult result;
  result.units.resize(panel.units.size());
  parallel_for(panel.units.size(), opts.workers, [&](std::size_t u) {
    PlaceboUnit& entry = result.units[u];
    entry.unit = panel.units[u];
    try {
      const PanelDataset& run_panel =
          static_cast<int>(u) == treated ? panel : donors_only;
      entry.ratio = placebo_ratio(run_panel, spec, entry.unit, outcome, fixed);
    } catch (const std::exception& e) {
      entry.failed = true;
      entry.message = e.what();
    }
  });

  const PlaceboUnit& treated_entry = result.units[static_cast<std::size_t>(treated)];
  if (treated_entry.failed) {
    throw std::runtime_error("estimator failed on the treated unit: " +
                             treated_entry.message);
  }
  result.treated_ratio = treated_entry.ratio;

  int n_eval = 0, n_at_least = 0;
  for (const auto& entry : result.units) {
    if (entry.failed) {
      result.warnings.push_back("placebo unit '" + entry.unit +
                                "' excluded: " + entry.message);
      continue;
    }
    ++n_eval;
    if (entry.ratio >= result.treated_ratio) ++n_at_least;
  }
  result.n_evaluated = n_eval;
  result.p_value = static_cast<double>(n_at_least) / static_cast<double>(n_eval);
  return result;
}

}  // namespace panelcf
