#include <doctest.h>

#include "panelcf/analysis.hpp"
#include "panelcf/dgp.hpp"

using namespace panelcf;

TEST_CASE("same seed reproduces the panel, new seed does not") {
  DGPConfig cfg;
  cfg.n_units = 10;
  cfg.n_years = 12;
  cfg.treatment_year = 1998;
  cfg.noise_sd = 0.3;
  cfg.seed = 42;
  GeneratedPanel a = generate_factor_panel(cfg);
  GeneratedPanel b = generate_factor_panel(cfg);
  CHECK((a.panel.values[0] - b.panel.values[0]).norm() == 0.0);

  cfg.seed = 43;
  GeneratedPanel c = generate_factor_panel(cfg);
  CHECK((a.panel.values[0] - c.panel.values[0]).norm() > 0.0);
}

TEST_CASE("generated panels satisfy the panel invariants") {
  DGPConfig cfg;
  cfg.seed = 5;
  cfg.effect_path = {-1.0, -0.5, -0.75, -1.0, -0.5, -0.75,
                     -1.0, -0.5, -0.75, -1.0, -0.5, -0.75};
  GeneratedPanel gen = generate_factor_panel(cfg);
  CHECK(gen.panel.balanced());
  CHECK(gen.panel.n_cells() == 37 * 33);
  CHECK(gen.panel.years.front() == 1990);
  CHECK(gen.panel.years.back() == 2022);
  CHECK(gen.spec.pre_years.size() == 21);
  CHECK(gen.spec.post_years.size() == 12);
  double expected = 0;
  for (double d : cfg.effect_path) expected += d;
  expected /= 12.0;
  CHECK(gen.true_att == doctest::Approx(expected));
}

TEST_CASE("config validation") {
  DGPConfig cfg;
  cfg.rank = 50;
  CHECK_THROWS_AS(generate_factor_panel(cfg), std::invalid_argument);
  cfg = DGPConfig{};
  cfg.treated_index = 99;
  CHECK_THROWS_AS(generate_factor_panel(cfg), std::invalid_argument);
  cfg = DGPConfig{};
  cfg.treatment_year = 1990;
  CHECK_THROWS_AS(generate_factor_panel(cfg), std::invalid_argument);
  cfg = DGPConfig{};
  cfg.effect_path = {1.0};  // needs 12 entries
  CHECK_THROWS_AS(generate_factor_panel(cfg), std::invalid_argument);
  cfg = DGPConfig{};
  cfg.noise_sd = -1;
  CHECK_THROWS_AS(generate_factor_panel(cfg), std::invalid_argument);
}

TEST_CASE("exact null: noiseless zero-effect panels estimate ATT 0") {
  DGPConfig cfg;
  cfg.noise_sd = 0.0;
  cfg.factor_scale = 0.3;
  cfg.seed = 21;
  GeneratedPanel gen = generate_factor_panel(cfg);

  LassoScmOptions lasso;
  lasso.fixed_lambda = 1e-8;
  lasso.tol = 1e-12;
  ScmRun lr = lasso_scm_analysis(gen.panel, gen.spec, "y", lasso);
  CHECK(std::abs(lr.att) < 1e-6);

  McOptions mc;
  mc.fixed_lambda = 1e-9;
  mc.tol = 1e-9;
  mc.max_iter = 2000;
  McRun mr = mc_analysis(gen.panel, gen.spec, "y", mc);
  CHECK(std::abs(mr.low.att) < 1e-6);
}

TEST_CASE("noiseless step effect is recovered by completion") {
  DGPConfig cfg;
  cfg.noise_sd = 0.0;
  cfg.rank = 2;
  cfg.factor_scale = 0.3;
  cfg.seed = 33;
  cfg.effect_path = step_effect(-0.75, 12);
  GeneratedPanel gen = generate_factor_panel(cfg);

  McOptions mc;
  mc.fixed_lambda = 1e-7;
  mc.tol = 1e-9;
  mc.max_iter = 2000;
  McRun run = mc_analysis(gen.panel, gen.spec, "y", mc);
  CHECK(run.low.att == doctest::Approx(-0.75).epsilon(1e-3));
}

TEST_CASE("baseline surface excludes both noise and effect") {
  DGPConfig cfg;
  cfg.n_units = 6;
  cfg.n_years = 8;
  cfg.treatment_year = 1995;
  cfg.noise_sd = 0.0;
  cfg.seed = 9;
  cfg.effect_path = step_effect(-2.0, 3);
  GeneratedPanel gen = generate_factor_panel(cfg);
  const Index treated = gen.panel.unit_index(gen.spec.treated_unit);
  for (Index j = 0; j < 5; ++j) {
    CHECK(gen.panel.values[0](treated, j) ==
          doctest::Approx(gen.baseline(treated, j)));
  }
  for (Index j = 5; j < 8; ++j) {
    CHECK(gen.panel.values[0](treated, j) ==
          doctest::Approx(gen.baseline(treated, j) - 2.0));
  }
}
