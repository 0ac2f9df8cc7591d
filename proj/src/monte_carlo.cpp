#include "panelcf/monte_carlo.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "panelcf/parallel.hpp"
#include "panelcf/report.hpp"
#include "panelcf/rng.hpp"

namespace panelcf {

const char* estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::convex:
      return "convex";
    case EstimatorKind::lasso:
      return "lasso";
    case EstimatorKind::mc:
      return "mc";
  }
  return "?";
}

namespace {

struct RunOutcome {
  bool failed = false;
  double att = 0;
  bool covered = false;
  double placebo_p = std::numeric_limits<double>::quiet_NaN();
};

RunOutcome single_run(const MonteCarloConfig& cfg, const DGPConfig& base,
                      EstimatorKind estimator, std::uint64_t seed) {
  RunOutcome out;
  try {
    DGPConfig dgp = base;
    dgp.seed = seed;
    GeneratedPanel gen = generate_factor_panel(dgp);
    const std::string& outcome = gen.panel.outcomes.front();

    GapSeries gaps;
    switch (estimator) {
      case EstimatorKind::convex:
        gaps = convex_scm_analysis(gen.panel, gen.spec, outcome, cfg.convex).gaps;
        break;
      case EstimatorKind::lasso:
        gaps = lasso_scm_analysis(gen.panel, gen.spec, outcome, cfg.lasso).gaps;
        break;
      case EstimatorKind::mc:
        gaps = mc_analysis(gen.panel, gen.spec, outcome, cfg.mc).high.gaps;
        break;
    }
    const Index t2 = static_cast<Index>(gen.spec.post_years.size());
    Vectord post = gaps.gap.tail(t2);
    out.att = post.mean();

    BootstrapConfig boot = cfg.bootstrap;
    boot.seed = seed;
    BootstrapResult b = blocked_bootstrap(post, boot);
    out.covered = b.ci_lower <= gen.true_att && gen.true_att <= b.ci_upper;

    if (cfg.with_placebo) {
      PlaceboOptions popts;
      popts.estimator = estimator;
      popts.convex = cfg.convex;
      popts.lasso = cfg.lasso;
      popts.mc = cfg.mc;
      out.placebo_p =
          placebo_in_space(gen.panel, gen.spec, outcome, popts).p_value;
    }
  } catch (const std::exception&) {
    out.failed = true;
  }
  return out;
}

}  // namespace

std::vector<MonteCarloRow> run_monte_carlo(const MonteCarloConfig& cfg) {
  std::vector<MonteCarloRow> rows;
  for (const auto& [label, dgp] : cfg.configs) {
    double true_att = 0;
    if (!dgp.effect_path.empty()) {
      for (double d : dgp.effect_path) true_att += d;
      true_att /= static_cast<double>(dgp.effect_path.size());
    }
    for (EstimatorKind estimator : cfg.estimators) {
      std::vector<RunOutcome> outs(cfg.n_seeds);
      parallel_for(static_cast<std::size_t>(cfg.n_seeds), cfg.workers,
                   [&](std::size_t s) {
                     std::uint64_t seed =
                         cfg.bootstrap.seed + 1000003ULL * (s + 1);
                     outs[s] = single_run(cfg, dgp, estimator, seed);
                   });
      MonteCarloRow row;
      row.config_label = label;
      row.estimator = estimator;
      row.n_runs = cfg.n_seeds;
      double bias_sum = 0, sq_sum = 0, cover = 0, placebo_sum = 0;
      int ok = 0, placebo_n = 0;
      for (const auto& o : outs) {
        if (o.failed) {
          ++row.n_failures;
          continue;
        }
        ++ok;
        bias_sum += o.att - true_att;
        sq_sum += (o.att - true_att) * (o.att - true_att);
        cover += o.covered ? 1.0 : 0.0;
        if (!std::isnan(o.placebo_p)) {
          placebo_sum += o.placebo_p;
          ++placebo_n;
        }
      }
      if (ok > 0) {
        row.mean_bias = bias_sum / ok;
        row.rmse = std::sqrt(sq_sum / ok);
        row.coverage = cover / ok;
      }
      row.mean_placebo_p = placebo_n > 0
                               ? placebo_sum / placebo_n
                               : std::numeric_limits<double>::quiet_NaN();
      rows.push_back(row);
    }
  }
  return rows;
}

std::string render_monte_carlo(const std::vector<MonteCarloRow>& rows) {
  std::ostringstream out;
  out << "config\testimator\truns\tfailures\tmean_bias\trmse\tcoverage\tmean_placebo_p\n";
  for (const auto& r : rows) {
    out << r.config_label << '\t' << estimator_name(r.estimator) << '\t'
        << r.n_runs << '\t' << r.n_failures << '\t' << fmt_plain(r.mean_bias, 4)
        << '\t' << fmt_plain(r.rmse, 4) << '\t' << fmt_plain(r.coverage, 3)
        << '\t' << fmt_plain(r.mean_placebo_p, 3) << '\n';
  }
  return out.str();
}

}  // namespace panelcf
