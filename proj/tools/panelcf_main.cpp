#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "panelcf/analysis.hpp"
#include "panelcf/dgp.hpp"
#include "panelcf/figure.hpp"
#include "panelcf/monte_carlo.hpp"
#include "panelcf/panel.hpp"
#include "panelcf/parallel.hpp"
#include "panelcf/report.hpp"
#include "panelcf/rng.hpp"
#include "panelcf/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace panelcf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEstimation = 1;
constexpr int kExitConfig = 2;

struct CommonOpts {
  std::string input;
  std::string exclusions;
  std::string treated;
  int treatment_year = 0;
  std::vector<std::string> outcomes;
  std::string out_dir;
  std::uint64_t seed = 12345;
  int threads = 1;
};

struct MethodOpts {
  std::string method = "lasso";
  std::vector<double> lambda_grid;  // lasso; empty = built-in default grid
  int folds = 5;
  std::string regime = "both";  // mc: low | high | both
  int mc_grid_points = 20;
  std::string fe = "two-way";  // mc: two-way | none
  int bootstrap_reps = 1000;
  int block_length = 0;  // 0 = ceil(sqrt(T2))
  bool with_placebo = false;
};

void add_common(CLI::App* cmd, CommonOpts& c, bool need_spec = true) {
  cmd->configurable()->fallthrough();
  cmd->add_option("--input", c.input, "panel CSV (unit,year,outcome,value)")
      ->required();
  cmd->add_option("--exclusions", c.exclusions,
                  "donor exclusion CSV (unit,reason)");
  auto* treated = cmd->add_option("--treated", c.treated, "treated unit");
  auto* year = cmd->add_option("--treatment-year", c.treatment_year,
                               "first post-treatment year");
  if (need_spec) {
    treated->required();
    year->required();
  }
  cmd->add_option("--outcomes", c.outcomes,
                  "outcome selection (comma separated; default: all)")
      ->delimiter(',');
  cmd->add_option("--out", c.out_dir, "output directory");
  cmd->add_option("--seed", c.seed, "RNG seed recorded in all outputs");
  cmd->add_option("--threads", c.threads, "worker count for per-outcome runs");
}

void add_method(CLI::App* cmd, MethodOpts& m) {
  cmd->add_option("--method", m.method, "estimator: convex | lasso | mc")
      ->check(CLI::IsMember({"convex", "lasso", "mc"}));
  cmd->add_option("--lambda-grid", m.lambda_grid,
                  "lasso penalty grid (ascending, comma separated)")
      ->delimiter(',');
  cmd->add_option("--folds", m.folds, "CV fold count")->check(CLI::Range(2, 50));
  cmd->add_option("--regime", m.regime, "mc shrinkage regime: low | high | both")
      ->check(CLI::IsMember({"low", "high", "both"}));
  cmd->add_option("--mc-grid-points", m.mc_grid_points,
                  "mc penalty grid size")
      ->check(CLI::Range(1, 200));
  cmd->add_option("--fe", m.fe, "mc fixed effects: two-way | none")
      ->check(CLI::IsMember({"two-way", "none"}));
  cmd->add_option("--bootstrap-reps", m.bootstrap_reps,
                  "blocked bootstrap replications")
      ->check(CLI::Range(1, 1000000));
  cmd->add_option("--block-length", m.block_length,
                  "bootstrap block length (0 = ceil(sqrt(T2)))");
  cmd->add_flag("--placebo", m.with_placebo,
                "also run the placebo-in-space test per outcome");
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char ch : name) {
    out.push_back(std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_');
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

json manifest_base(const std::string& command, const CommonOpts& c) {
  json inputs = json::object();
  inputs["panel"] = {{"path", c.input}, {"hash", file_hash_hex(c.input)}};
  if (!c.exclusions.empty()) {
    json log = json::array();
    for (const auto& e : load_exclusions_file(c.exclusions)) {
      log.push_back(json{{"unit", e.unit}, {"reason", e.reason}});
    }
    inputs["exclusions"] = {{"path", c.exclusions},
                            {"hash", file_hash_hex(c.exclusions)},
                            {"log", log}};
  }
  return json{{"command", command},
              {"version", kToolkitVersion},
              {"seed", c.seed},
              {"inputs", inputs},
              {"config",
               {{"treated", c.treated},
                {"treatment_year", c.treatment_year},
                {"outcomes", c.outcomes},
                {"threads", c.threads}}}};
}

void append_method_config(json& manifest, const MethodOpts& m) {
  manifest["config"]["method"] = m.method;
  manifest["config"]["lambda_grid"] = m.lambda_grid;
  manifest["config"]["folds"] = m.folds;
  manifest["config"]["regime"] = m.regime;
  manifest["config"]["mc_grid_points"] = m.mc_grid_points;
  manifest["config"]["fe"] = m.fe;
  manifest["config"]["bootstrap_reps"] = m.bootstrap_reps;
  manifest["config"]["block_length"] = m.block_length;
  manifest["config"]["placebo"] = m.with_placebo;
}

PanelDataset load_inputs(const CommonOpts& c) {
  PanelDataset panel = load_panel_file(c.input);
  if (!c.exclusions.empty()) {
    auto entries = load_exclusions_file(c.exclusions);
    panel = filter_donors(panel, entries, c.treated).panel;
  }
  return panel;
}

std::vector<std::string> resolve_outcomes(const PanelDataset& panel,
                                          const std::vector<std::string>& wanted) {
  if (wanted.empty()) return panel.outcomes;
  for (const auto& name : wanted) {
    if (panel.outcome_index(name) < 0) {
      throw std::invalid_argument("unknown outcome '" + name + "'");
    }
  }
  return wanted;
}

// --- describe ---------------------------------------------------------------

int cmd_describe(const CommonOpts& c) {
  PanelDataset panel = load_inputs(c);
  TreatmentSpec spec = make_treatment_spec(panel, c.treated, c.treatment_year);
  DescriptiveStats stats = describe(panel, spec);
  if (!c.outcomes.empty()) {
    auto selected = resolve_outcomes(panel, c.outcomes);
    DescriptiveStats filtered;
    filtered.total_cells = stats.total_cells;
    for (const auto& name : selected) {
      for (const auto& row : stats.rows) {
        if (row.outcome == name) filtered.rows.push_back(row);
      }
    }
    stats = std::move(filtered);
  }
  std::string table = render_table1(stats);
  std::cout << table;
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    write_text(fs::path(c.out_dir) / "describe.txt", table);
    write_json(fs::path(c.out_dir) / "describe.json", to_json(stats));
    write_json(fs::path(c.out_dir) / "manifest.json", manifest_base("describe", c));
  }
  return kExitOk;
}

// --- estimate ---------------------------------------------------------------

struct OutcomeResult {
  std::string outcome;
  bool ok = false;
  std::string error;
  std::optional<ScmRun> scm;
  std::optional<McRun> mc;
  std::optional<ATTEstimate> att;       // scm methods
  std::optional<ATTEstimate> att_low;   // mc
  std::optional<ATTEstimate> att_high;  // mc
};

ATTEstimate infer(const GapSeries& gaps, Index t2, const MethodOpts& m,
                  std::uint64_t seed, double p_placebo) {
  Vectord post = gaps.gap.tail(t2);
  Vectord pre = gaps.gap.head(gaps.gap.size() - t2);
  BootstrapConfig cfg;
  cfg.replications = m.bootstrap_reps;
  cfg.block_length = m.block_length;
  cfg.seed = seed;
  BootstrapResult boot = blocked_bootstrap(post, cfg);
  return assemble_att(post.mean(), boot, rmspe_diagnostics(pre, post), p_placebo,
                      seed);
}

json result_to_json(const OutcomeResult& r) {
  json j{{"outcome", r.outcome}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  if (r.scm) {
    j["att"] = to_json(*r.att);
    j["gaps"] = to_json(r.scm->gaps);
    j["weights"] = to_json(r.scm->weights);
    if (r.scm->cv) j["cv"] = to_json(*r.scm->cv);
    j["warnings"] = r.scm->warnings;
  }
  if (r.mc) {
    j["att_low"] = to_json(*r.att_low);
    j["att_high"] = to_json(*r.att_high);
    j["gaps_low"] = to_json(r.mc->low.gaps);
    j["gaps_high"] = to_json(r.mc->high.gaps);
    j["lambda_low"] = r.mc->low.lambda;
    j["lambda_high"] = r.mc->high.lambda;
    if (r.mc->regimes) j["regimes"] = to_json(*r.mc->regimes);
    j["warnings"] = r.mc->warnings;
  }
  return j;
}

void emit_outcome_files(const fs::path& dir, const std::string& outcome,
                        const std::string& suffix, const GapSeries& gaps,
                        const ATTEstimate& att, int treatment_year) {
  YearBand band = band_from_bootstrap(gaps, treatment_year, att.point,
                                      att.ci_lower, att.ci_upper);
  std::string stem = sanitize(outcome) + suffix;
  emit_gap_figure(gaps, band, treatment_year,
                  (dir / ("figure_" + stem + ".svg")).string(),
                  (dir / ("gaps_" + stem + ".csv")).string());
}

int cmd_estimate(const CommonOpts& c, const MethodOpts& m) {
  if (c.out_dir.empty()) throw std::invalid_argument("--out is required");
  PanelDataset panel = load_inputs(c);
  TreatmentSpec spec = make_treatment_spec(panel, c.treated, c.treatment_year);
  std::vector<std::string> outcomes = resolve_outcomes(panel, c.outcomes);

  LassoScmOptions lasso_opts;
  if (!m.lambda_grid.empty()) lasso_opts.grid = PenaltyGrid(m.lambda_grid);
  lasso_opts.folds = m.folds;
  McOptions mc_opts;
  mc_opts.grid_points = m.mc_grid_points;
  mc_opts.folds = m.folds;
  mc_opts.fe = m.fe == "none" ? FeMode::none : FeMode::two_way;

  fs::create_directories(c.out_dir);
  const fs::path dir(c.out_dir);
  const Index t2 = static_cast<Index>(spec.post_years.size());

  std::vector<OutcomeResult> results(outcomes.size());
  parallel_for(outcomes.size(), c.threads, [&](std::size_t i) {
    OutcomeResult& r = results[i];
    r.outcome = outcomes[i];
    std::uint64_t outcome_seed = c.seed + 7919ULL * i;
    try {
      double p_placebo = std::numeric_limits<double>::quiet_NaN();
      if (m.method == "mc") {
        r.mc = mc_analysis(panel, spec, r.outcome, mc_opts);
        if (m.with_placebo) {
          PlaceboOptions popts;
          popts.estimator = EstimatorKind::mc;
          popts.mc = mc_opts;
          popts.mc.fixed_lambda = m.regime == "low" ? r.mc->low.lambda
                                                    : r.mc->high.lambda;
          p_placebo = placebo_in_space(panel, spec, r.outcome, popts).p_value;
        }
        r.att_low = infer(r.mc->low.gaps, t2, m, outcome_seed, p_placebo);
        r.att_high = infer(r.mc->high.gaps, t2, m, outcome_seed + 1, p_placebo);
      } else {
        if (m.method == "convex") {
          r.scm = convex_scm_analysis(panel, spec, r.outcome);
        } else {
          r.scm = lasso_scm_analysis(panel, spec, r.outcome, lasso_opts);
        }
        if (m.with_placebo) {
          PlaceboOptions popts;
          popts.estimator = m.method == "convex" ? EstimatorKind::convex
                                                 : EstimatorKind::lasso;
          popts.lasso = lasso_opts;
          if (r.scm->cv) popts.lasso.fixed_lambda = r.scm->cv->selected_lambda;
          p_placebo = placebo_in_space(panel, spec, r.outcome, popts).p_value;
        }
        r.att = infer(r.scm->gaps, t2, m, outcome_seed, p_placebo);
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });

  // tables over the successful outcomes
  std::vector<std::string> ok_names;
  std::vector<ATTEstimate> low, high, single;
  for (const auto& r : results) {
    if (!r.ok) continue;
    ok_names.push_back(r.outcome);
    if (r.mc) {
      low.push_back(*r.att_low);
      high.push_back(*r.att_high);
    } else {
      single.push_back(*r.att);
    }
  }

  if (m.method == "mc") {
    if (m.regime == "both") {
      write_text(dir / "att_table.txt", render_table2(ok_names, low, high));
    } else {
      write_text(dir / "att_table.txt",
                 render_table3(ok_names, m.regime == "low" ? low : high));
    }
    for (const auto& r : results) {
      if (r.ok && r.mc && r.mc->regimes) {
        write_text(dir / ("regimes_" + sanitize(r.outcome) + ".txt"),
                   render_regime_report(*r.mc->regimes));
      }
    }
  } else {
    write_text(dir / "att_table.txt", render_table3(ok_names, single));
    // Table-4-layout weight matrix across outcomes
    if (!ok_names.empty()) {
      const ScmRun* first = nullptr;
      for (const auto& r : results) {
        if (r.ok && r.scm) {
          first = &*r.scm;
          break;
        }
      }
      Matrixd w(first->weights.donors.size(), ok_names.size());
      Index col = 0;
      for (const auto& r : results) {
        if (!r.ok) continue;
        w.col(col++) = r.scm->weights.weights;
      }
      write_text(dir / "weights_table.txt",
                 render_table4(first->weights.donors, ok_names, w));
    }
    for (const auto& r : results) {
      if (r.ok && r.scm && r.scm->cv) {
        write_text(dir / ("cv_" + sanitize(r.outcome) + ".txt"),
                   render_cv_report(*r.scm->cv));
      }
    }
  }

  json results_json = json::array();
  for (const auto& r : results) results_json.push_back(result_to_json(r));
  json output{{"method", m.method},
              {"treated", c.treated},
              {"treatment_year", c.treatment_year},
              {"seed", c.seed},
              {"results", results_json}};
  write_json(dir / "results.json", output);

  for (const auto& r : results) {
    if (!r.ok) continue;
    if (r.mc) {
      emit_outcome_files(dir, r.outcome, "_low", r.mc->low.gaps, *r.att_low,
                         spec.treatment_year);
      emit_outcome_files(dir, r.outcome, "_high", r.mc->high.gaps, *r.att_high,
                         spec.treatment_year);
    } else {
      emit_outcome_files(dir, r.outcome, "", r.scm->gaps, *r.att,
                         spec.treatment_year);
    }
  }

  json manifest = manifest_base("estimate", c);
  append_method_config(manifest, m);
  write_json(dir / "manifest.json", manifest);

  int failures = 0;
  for (const auto& r : results) {
    if (!r.ok) {
      std::cerr << "estimation failed for outcome '" << r.outcome
                << "': " << r.error << '\n';
      ++failures;
    }
  }
  std::cout << "estimated " << (results.size() - failures) << "/"
            << results.size() << " outcomes -> " << c.out_dir << '\n';
  return failures > 0 ? kExitEstimation : kExitOk;
}

// --- placebo ----------------------------------------------------------------

int cmd_placebo(const CommonOpts& c, const MethodOpts& m) {
  PanelDataset panel = load_inputs(c);
  TreatmentSpec spec = make_treatment_spec(panel, c.treated, c.treatment_year);
  std::vector<std::string> outcomes = resolve_outcomes(panel, c.outcomes);
  if (panel.n_units() < 3) {
    throw std::invalid_argument("placebo test needs at least 2 donors");
  }

  PlaceboOptions popts;
  popts.estimator = m.method == "convex"  ? EstimatorKind::convex
                    : m.method == "lasso" ? EstimatorKind::lasso
                                          : EstimatorKind::mc;
  if (!m.lambda_grid.empty()) popts.lasso.grid = PenaltyGrid(m.lambda_grid);
  popts.lasso.folds = m.folds;
  popts.mc.grid_points = m.mc_grid_points;
  popts.mc.folds = m.folds;
  popts.mc_regime = m.regime == "low" ? Regime::low : Regime::high;
  popts.workers = c.threads;

  if (!c.out_dir.empty()) fs::create_directories(c.out_dir);
  int failures = 0;
  for (const auto& outcome : outcomes) {
    try {
      PlaceboResult result = placebo_in_space(panel, spec, outcome, popts);
      std::cout << outcome << ": p_placebo = " << fmt_plain(result.p_value)
                << " (treated ratio " << fmt_plain(result.treated_ratio) << ", "
                << result.n_evaluated << " units)\n";
      if (!c.out_dir.empty()) {
        write_text(fs::path(c.out_dir) / ("placebo_" + sanitize(outcome) + ".txt"),
                   render_placebo(result));
        write_json(fs::path(c.out_dir) / ("placebo_" + sanitize(outcome) + ".json"),
                   to_json(result));
      }
    } catch (const std::exception& e) {
      std::cerr << "placebo failed for outcome '" << outcome << "': " << e.what()
                << '\n';
      ++failures;
    }
  }
  if (!c.out_dir.empty()) {
    json manifest = manifest_base("placebo", c);
    append_method_config(manifest, m);
    write_json(fs::path(c.out_dir) / "manifest.json", manifest);
  }
  return failures > 0 ? kExitEstimation : kExitOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateOpts {
  DGPConfig dgp;
  std::string out_dir;
  double delta = 0.0;
  bool monte_carlo = false;
  int n_seeds = 100;
  std::vector<std::string> estimators{"convex", "lasso", "mc"};
  int threads = 1;
  int bootstrap_reps = 1000;
};

void add_simulate(CLI::App* cmd, SimulateOpts& s) {
  cmd->configurable()->fallthrough();
  cmd->add_option("--units", s.dgp.n_units, "number of units");
  cmd->add_option("--years", s.dgp.n_years, "number of years");
  cmd->add_option("--rank", s.dgp.rank, "factor rank");
  cmd->add_option("--noise", s.dgp.noise_sd, "noise standard deviation");
  cmd->add_option("--delta", s.delta, "step effect added to treated post years");
  cmd->add_option("--first-year", s.dgp.first_year, "first calendar year");
  cmd->add_option("--treatment-year", s.dgp.treatment_year, "first post year");
  cmd->add_option("--treated-index", s.dgp.treated_index, "treated unit index");
  cmd->add_option("--factor-scale", s.dgp.factor_scale, "factor loading scale");
  cmd->add_option("--level", s.dgp.level, "global level");
  cmd->add_option("--seed", s.dgp.seed, "RNG seed");
  cmd->add_option("--out", s.out_dir, "output directory")->required();
  cmd->add_flag("--monte-carlo", s.monte_carlo,
                "run a bias/coverage table instead of emitting one panel");
  cmd->add_option("--seeds", s.n_seeds, "Monte Carlo seed count");
  cmd->add_option("--estimators", s.estimators, "Monte Carlo estimators")
      ->delimiter(',');
  cmd->add_option("--threads", s.threads, "worker count");
  cmd->add_option("--bootstrap-reps", s.bootstrap_reps, "bootstrap replications");
}

int cmd_simulate(SimulateOpts& s) {
  const int last_year = s.dgp.first_year + s.dgp.n_years - 1;
  const int n_post = last_year - s.dgp.treatment_year + 1;
  if (s.delta != 0.0) s.dgp.effect_path = step_effect(s.delta, n_post);
  fs::create_directories(s.out_dir);

  if (s.monte_carlo) {
    MonteCarloConfig cfg;
    cfg.configs.emplace_back("dgp", s.dgp);
    for (const auto& e : s.estimators) {
      if (e == "convex") cfg.estimators.push_back(EstimatorKind::convex);
      else if (e == "lasso") cfg.estimators.push_back(EstimatorKind::lasso);
      else if (e == "mc") cfg.estimators.push_back(EstimatorKind::mc);
      else throw std::invalid_argument("unknown estimator '" + e + "'");
    }
    cfg.n_seeds = s.n_seeds;
    cfg.bootstrap.seed = s.dgp.seed;
    cfg.bootstrap.replications = s.bootstrap_reps;
    cfg.workers = s.threads;
    auto rows = run_monte_carlo(cfg);
    std::string table = render_monte_carlo(rows);
    std::cout << table;
    write_text(fs::path(s.out_dir) / "mc_table.txt", table);
    json jrows = json::array();
    for (const auto& r : rows) {
      jrows.push_back(json{{"config", r.config_label},
                           {"estimator", estimator_name(r.estimator)},
                           {"runs", r.n_runs},
                           {"failures", r.n_failures},
                           {"mean_bias", r.mean_bias},
                           {"rmse", r.rmse},
                           {"coverage", r.coverage}});
    }
    write_json(fs::path(s.out_dir) / "mc_table.json", jrows);
  } else {
    GeneratedPanel gen = generate_factor_panel(s.dgp);
    serialize_panel_file(gen.panel, (fs::path(s.out_dir) / "panel.csv").string());
    write_json(fs::path(s.out_dir) / "truth.json",
               json{{"treated", gen.spec.treated_unit},
                    {"treatment_year", gen.spec.treatment_year},
                    {"true_att", gen.true_att},
                    {"effect_path", s.dgp.effect_path},
                    {"seed", s.dgp.seed}});
    std::cout << "panel written to " << s.out_dir << " (true ATT "
              << fmt_plain(gen.true_att) << ")\n";
  }
  json manifest{{"command", "simulate"},
                {"version", kToolkitVersion},
                {"seed", s.dgp.seed},
                {"config",
                 {{"units", s.dgp.n_units},
                  {"years", s.dgp.n_years},
                  {"rank", s.dgp.rank},
                  {"noise", s.dgp.noise_sd},
                  {"delta", s.delta},
                  {"treatment_year", s.dgp.treatment_year},
                  {"monte_carlo", s.monte_carlo}}}};
  write_json(fs::path(s.out_dir) / "manifest.json", manifest);
  return kExitOk;
}

// --- report -----------------------------------------------------------------

int cmd_report(const std::string& results_path, const std::string& out_dir) {
  std::ifstream in(results_path);
  if (!in) throw std::invalid_argument("cannot open results '" + results_path + "'");
  json input = json::parse(in);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const std::string method = input.at("method").get<std::string>();
  const int treatment_year = input.at("treatment_year").get<int>();

  std::vector<std::string> ok_names;
  std::vector<ATTEstimate> low, high, single;
  for (const auto& r : input.at("results")) {
    if (!r.at("ok").get<bool>()) continue;
    ok_names.push_back(r.at("outcome").get<std::string>());
    if (method == "mc") {
      low.push_back(att_from_json(r.at("att_low")));
      high.push_back(att_from_json(r.at("att_high")));
      emit_outcome_files(dir, ok_names.back(), "_low",
                         gap_series_from_json(r.at("gaps_low")), low.back(),
                         treatment_year);
      emit_outcome_files(dir, ok_names.back(), "_high",
                         gap_series_from_json(r.at("gaps_high")), high.back(),
                         treatment_year);
    } else {
      single.push_back(att_from_json(r.at("att")));
      emit_outcome_files(dir, ok_names.back(), "",
                         gap_series_from_json(r.at("gaps")), single.back(),
                         treatment_year);
    }
  }
  if (method == "mc") {
    write_text(dir / "att_table.txt", render_table2(ok_names, low, high));
  } else {
    write_text(dir / "att_table.txt", render_table3(ok_names, single));
  }
  std::cout << "report written to " << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterfactual panel estimation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "TOML config file with one section per subcommand; flags win");

  CommonOpts describe_opts, estimate_opts, placebo_opts;
  MethodOpts estimate_method, placebo_method;
  std::string results_path, report_out;

  auto* describe_cmd =
      app.add_subcommand("describe", "descriptive statistics per outcome");
  add_common(describe_cmd, describe_opts);

  auto* estimate_cmd =
      app.add_subcommand("estimate", "fit counterfactuals and ATT tables");
  add_common(estimate_cmd, estimate_opts);
  add_method(estimate_cmd, estimate_method);

  auto* placebo_cmd =
      app.add_subcommand("placebo", "placebo-in-space rank p-values");
  add_common(placebo_cmd, placebo_opts);
  add_method(placebo_cmd, placebo_method);

  SimulateOpts simulate_opts;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "factor-panel generator / Monte Carlo");
  add_simulate(simulate_cmd, simulate_opts);

  auto* report_cmd =
      app.add_subcommand("report", "re-render tables and figures from results.json");
  report_cmd->configurable()->fallthrough();
  report_cmd->add_option("--results", results_path, "results.json path")
      ->required();
  report_cmd->add_option("--out", report_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (describe_cmd->parsed()) return cmd_describe(describe_opts);
    if (estimate_cmd->parsed()) return cmd_estimate(estimate_opts, estimate_method);
    if (placebo_cmd->parsed()) return cmd_placebo(placebo_opts, placebo_method);
    if (report_cmd->parsed()) return cmd_report(results_path, report_out);
    if (simulate_cmd->parsed()) return cmd_simulate(simulate_opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEstimation;
  }
  return kExitOk;
}
