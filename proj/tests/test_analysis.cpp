#include <doctest.h>

#include <sstream>

#include "panelcf/analysis.hpp"
#include "panelcf/dgp.hpp"
#include "panelcf/panel.hpp"

using namespace panelcf;

namespace {

PanelDataset tiny_panel(const std::string& text) {
  std::istringstream in(text);
  return load_panel(in);
}

}  // namespace

TEST_CASE("gap series identity and construction") {
  GapSeries g = make_gap_series({2000, 2001}, (Vectord(2) << 3, 4).finished(),
                                (Vectord(2) << 1, 1).finished());
  CHECK(g.gap(0) == 2.0);
  CHECK(g.gap(1) == 3.0);
  CHECK_THROWS_AS(make_gap_series({2000}, Vectord::Zero(2), Vectord::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("significance stars thresholds") {
  CHECK(significance_stars(0.001) == "***");
  CHECK(significance_stars(0.02) == "**");
  CHECK(significance_stars(0.056) == "*");
  CHECK(significance_stars(0.1) == "");
  CHECK(significance_stars(0.5) == "");
}

TEST_CASE("assemble_att carries every component") {
  BootstrapResult boot;
  boot.se = 0.028;
  boot.ci_lower = -0.816;
  boot.ci_upper = -0.705;
  boot.p_value = 0.0;
  RmspeDiagnostics diag;
  diag.pre = 0.01;
  diag.post = 0.9;
  diag.ratio = 90.0;
  ATTEstimate e = assemble_att(-0.756, boot, diag, 1.0 / 37.0, 99);
  CHECK(e.point == -0.756);
  CHECK(e.stars == "***");
  CHECK(e.rmspe_ratio == 90.0);
  CHECK(e.p_placebo == doctest::Approx(1.0 / 37.0));
  CHECK(e.seed == 99);

  boot.p_value = 0.056;
  CHECK(assemble_att(-1.006, boot, diag).stars == "*");
  boot.p_value = 0.5;
  CHECK(assemble_att(-1.006, boot, diag).stars == "");
}

TEST_CASE("convex analysis on a null instance") {
  // treated equals one donor exactly pre AND post, aside from the scale of
  // the other donor; gap is zero everywhere and the ratio is about 1
  DGPConfig cfg;
  cfg.n_units = 8;
  cfg.n_years = 14;
  cfg.treatment_year = 2000;
  cfg.noise_sd = 0.05;
  cfg.seed = 17;
  GeneratedPanel gen = generate_factor_panel(cfg);
  // inject an exact copy of the treated series into a donor
  Index treated = gen.panel.unit_index(gen.spec.treated_unit);
  gen.panel.values[0].row(3) = gen.panel.values[0].row(treated);
  ScmRun run = convex_scm_analysis(gen.panel, gen.spec, "y");
  CHECK(std::abs(run.att) < 1e-4);
  CHECK(run.rmspe.pre < 1e-4);
  CHECK(run.weights.mode == WeightMode::convex);
  CHECK(run.weights.weights.sum() == doctest::Approx(1.0));
}

TEST_CASE("lasso analysis null instance gives ATT near zero and ratio near one") {
  DGPConfig cfg;
  cfg.n_units = 20;
  cfg.n_years = 20;
  cfg.first_year = 1990;
  cfg.treatment_year = 2003;
  cfg.noise_sd = 0.02;
  cfg.factor_scale = 0.5;
  cfg.seed = 23;
  GeneratedPanel gen = generate_factor_panel(cfg);
  ScmRun run = lasso_scm_analysis(gen.panel, gen.spec, "y");
  REQUIRE(run.cv.has_value());
  CHECK(std::abs(run.att) < 0.1);
  CHECK(run.rmspe.ratio < 5.0);
  CHECK(run.weights.mode == WeightMode::unrestricted);
}

TEST_CASE("mc analysis produces both regimes with sane diagnostics") {
  DGPConfig cfg;
  cfg.n_units = 14;
  cfg.n_years = 16;
  cfg.treatment_year = 2001;
  cfg.noise_sd = 0.05;
  cfg.factor_scale = 0.5;
  cfg.seed = 29;
  cfg.effect_path = step_effect(-1.0, 5);
  GeneratedPanel gen = generate_factor_panel(cfg);
  McRun run = mc_analysis(gen.panel, gen.spec, "y");
  REQUIRE(run.regimes.has_value());
  CHECK(run.regimes->lambda_low <= run.regimes->lambda_high);
  CHECK(run.low.att < -0.3);
  CHECK(run.high.att < -0.3);
  CHECK(run.low.gaps.years.size() == 16);
  // masked problem: treated post cells are the only unobserved ones
  CompletionProblem prob = make_completion_problem(gen.panel, gen.spec, "y");
  CHECK(prob.omega.count() == 14 * 16 - 5);
  CHECK(prob.t0 == 11);
}

TEST_CASE("placebo rank arithmetic on a crafted three-unit panel") {
  // treated tracks donor D1 exactly post (ratio ~0); each donor's own
  // placebo run leaves a visible gap, so the treated unit ranks last
  PanelDataset p = tiny_panel(
      "unit,year,outcome,value\n"
      "T,2000,y,0\nT,2001,y,1\nT,2002,y,0\nT,2003,y,1\nT,2004,y,0.05\n"
      "T,2005,y,0\nT,2006,y,1\nT,2007,y,0\nT,2008,y,1\n"
      "D1,2000,y,0\nD1,2001,y,1\nD1,2002,y,0\nD1,2003,y,1\nD1,2004,y,0\n"
      "D1,2005,y,0\nD1,2006,y,1\nD1,2007,y,0\nD1,2008,y,1\n"
      "D2,2000,y,5\nD2,2001,y,0\nD2,2002,y,5\nD2,2003,y,0\nD2,2004,y,5\n"
      "D2,2005,y,5\nD2,2006,y,0\nD2,2007,y,5\nD2,2008,y,0\n");
  TreatmentSpec spec = make_treatment_spec(p, "T", 2005);
  PlaceboOptions opts;
  opts.estimator = EstimatorKind::convex;
  PlaceboResult r = placebo_in_space(p, spec, "y", opts);
  CHECK(r.n_evaluated == 3);
  // rank statistic: p = (#units with ratio >= treated) / N
  int at_least = 0;
  for (const auto& u : r.units) {
    if (!u.failed && u.ratio >= r.treated_ratio) ++at_least;
  }
  CHECK(r.p_value == doctest::Approx(double(at_least) / 3.0));
  CHECK(r.p_value == 1.0);  // treated has the smallest ratio here
}

TEST_CASE("placebo p equals 1/N when the treated effect dominates") {
  DGPConfig cfg;
  cfg.n_units = 12;
  cfg.n_years = 14;
  cfg.treatment_year = 2000;
  cfg.noise_sd = 0.05;
  cfg.factor_scale = 0.5;
  cfg.seed = 31;
  cfg.effect_path = step_effect(-25.0, 4);  // enormous effect
  GeneratedPanel gen = generate_factor_panel(cfg);
  PlaceboOptions opts;
  opts.estimator = EstimatorKind::convex;
  PlaceboResult r = placebo_in_space(gen.panel, gen.spec, "y", opts);
  CHECK(r.n_evaluated == 12);
  CHECK(r.p_value == 1.0 / 12.0);
}

TEST_CASE("placebo needs at least two donors") {
  PanelDataset p = tiny_panel(
      "unit,year,outcome,value\n"
      "T,2000,y,1\nT,2001,y,2\nT,2002,y,3\n"
      "D,2000,y,1\nD,2001,y,2\nD,2002,y,3\n");
  TreatmentSpec spec = make_treatment_spec(p, "T", 2001);
  PlaceboOptions opts;
  CHECK_THROWS_AS(placebo_in_space(p, spec, "y", opts), std::invalid_argument);
}

TEST_CASE("failed placebo units are flagged and leave the denominator") {
  // D2 and D3 are identical, so each one's placebo run fits the other
  // perfectly pre and post: a degenerate 0/0 ratio that must be excluded
  std::ostringstream text;
  text << "unit,year,outcome,value\n";
  for (int year = 2000; year <= 2009; ++year) {
    int i = year - 2000;
    text << "T," << year << ",y," << (i % 3) + 0.1 * i << "\n";
    text << "D1," << year << ",y," << (i % 4) * 0.7 << "\n";
    text << "D2," << year << ",y,5\n";
    text << "D3," << year << ",y,5\n";
  }
  PanelDataset p = tiny_panel(text.str());
  TreatmentSpec spec = make_treatment_spec(p, "T", 2006);
  PlaceboOptions opts;
  opts.estimator = EstimatorKind::convex;
  PlaceboResult r = placebo_in_space(p, spec, "y", opts);
  CHECK(r.n_evaluated == 2);
  CHECK(r.warnings.size() == 2);
  int failed = 0;
  for (const auto& u : r.units) {
    if (u.failed) {
      ++failed;
      CHECK((u.unit == "D2" || u.unit == "D3"));
    }
  }
  CHECK(failed == 2);
  CHECK(r.p_value >= 0.5);  // rank over the two evaluated units
}

TEST_CASE("placebo runs are deterministic and parallel-stable") {
  DGPConfig cfg;
  cfg.n_units = 9;
  cfg.n_years = 12;
  cfg.treatment_year = 1998;
  cfg.noise_sd = 0.1;
  cfg.seed = 37;
  GeneratedPanel gen = generate_factor_panel(cfg);
  PlaceboOptions serial;
  serial.estimator = EstimatorKind::convex;
  serial.workers = 1;
  PlaceboOptions parallel = serial;
  parallel.workers = 4;
  PlaceboResult a = placebo_in_space(gen.panel, gen.spec, "y", serial);
  PlaceboResult b = placebo_in_space(gen.panel, gen.spec, "y", parallel);
  CHECK(a.p_value == b.p_value);
  REQUIRE(a.units.size() == b.units.size());
  for (std::size_t i = 0; i < a.units.size(); ++i) {
    CHECK(a.units[i].ratio == b.units[i].ratio);
  }
}

TEST_CASE("unrestricted weights dominate convex fit outside the donor hull") {
  // treated = 1.5 x donor + level shift: unreachable for convex weights
  // (no scaling, no intercept), exactly reachable for the lasso fit
  DGPConfig cfg;
  cfg.n_units = 8;
  cfg.n_years = 20;
  cfg.treatment_year = 2004;
  cfg.noise_sd = 0.0;
  cfg.factor_scale = 1.0;
  cfg.seed = 41;
  GeneratedPanel gen = generate_factor_panel(cfg);
  Index treated = gen.panel.unit_index(gen.spec.treated_unit);
  Matrixd& v = gen.panel.values[0];
  v.row(treated) = 1.5 * v.row(3) + Matrixd::Constant(1, 20, 0.3);
  for (Index j = 0; j < 20; ++j) v(treated, j) += 0.01 * std::sin(double(j));

  ScmRun convex = convex_scm_analysis(gen.panel, gen.spec, "y");
  LassoScmOptions opts;
  opts.fixed_lambda = 0.001;
  ScmRun lasso = lasso_scm_analysis(gen.panel, gen.spec, "y", opts);
  CHECK(lasso.rmspe.pre < 0.6 * convex.rmspe.pre);  // >40% tighter pre-fit
  CHECK(lasso.weights.weights.maxCoeff() > 1.0);    // extrapolative weight
  CHECK(convex.weights.weights.minCoeff() >= -1e-12);
}

TEST_CASE("lasso donor sets stay sparse at the default grid") {
  DGPConfig cfg;
  cfg.rank = 2;
  cfg.noise_sd = 0.02;
  cfg.factor_scale = 0.3;
  cfg.seed = 43;
  GeneratedPanel gen = generate_factor_panel(cfg);  // 37 units
  ScmRun run = lasso_scm_analysis(gen.panel, gen.spec, "y");
  int nonzero = 0;
  for (Index j = 0; j < run.weights.weights.size(); ++j) {
    if (run.weights.weights(j) != 0.0) ++nonzero;
  }
  CHECK(nonzero >= 1);
  CHECK(nonzero <= 18);  // most of the 36 donors carry exactly zero
}

TEST_CASE("rmspe diagnostics edge cases") {
  Vectord zero = Vectord::Zero(3);
  Vectord ones = Vectord::Ones(2);
  RmspeDiagnostics d = rmspe_diagnostics(zero, ones);
  CHECK(std::isinf(d.ratio));
  RmspeDiagnostics dd = rmspe_diagnostics(zero, Vectord::Zero(2));
  CHECK(std::isnan(dd.ratio));
}
