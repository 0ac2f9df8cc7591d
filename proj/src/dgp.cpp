#include "panelcf/dgp.hpp"

#include <cstdio>
#include <stdexcept>

#include "panelcf/rng.hpp"

namespace panelcf {

GeneratedPanel generate_factor_panel(const DGPConfig& cfg) {
  if (cfg.n_units < 2 || cfg.n_years < 2) {
    throw std::invalid_argument("factor panel needs at least 2 units and 2 years");
  }
  if (cfg.rank < 0 || cfg.rank > std::min(cfg.n_units, cfg.n_years)) {
    throw std::invalid_argument("rank must lie in [0, min(units, years)]");
  }
  if (cfg.noise_sd < 0) throw std::invalid_argument("negative noise sd");
  if (cfg.treated_index < 0 || cfg.treated_index >= cfg.n_units) {
    throw std::invalid_argument("treated index out of range");
  }
  const int last_year = cfg.first_year + cfg.n_years - 1;
  if (cfg.treatment_year <= cfg.first_year || cfg.treatment_year > last_year) {
    throw std::invalid_argument("treatment year must leave nonempty pre and post windows");
  }
  const int n_post = last_year - cfg.treatment_year + 1;
  std::vector<double> deltas = cfg.effect_path;
  if (deltas.empty()) deltas.assign(static_cast<std::size_t>(n_post), 0.0);
  if (static_cast<int>(deltas.size()) != n_post) {
    throw std::invalid_argument("effect path length " +
                                std::to_string(deltas.size()) +
                                " != post-period length " + std::to_string(n_post));
  }

  const Index n = cfg.n_units, t = cfg.n_years;
  // Each ingredient draws from its own substream so the surface is stable
  // under changes to the sampling order elsewhere.
  Rng rng_a = Rng::substream(cfg.seed, 1);
  Rng rng_b = Rng::substream(cfg.seed, 2);
  Rng rng_load = Rng::substream(cfg.seed, 3);
  Rng rng_fact = Rng::substream(cfg.seed, 4);
  Rng rng_eps = Rng::substream(cfg.seed, 5);

  Vectord a(n), b(t);
  for (Index i = 0; i < n; ++i) a(i) = rng_a.uniform(cfg.unit_effect_min, cfg.unit_effect_max);
  for (Index j = 0; j < t; ++j) b(j) = rng_b.uniform(cfg.time_effect_min, cfg.time_effect_max);

  Matrixd loadings = Matrixd::Zero(n, std::max(cfg.rank, 1));
  Matrixd factors = Matrixd::Zero(t, std::max(cfg.rank, 1));
  for (Index i = 0; i < n; ++i) {
    for (int k = 0; k < cfg.rank; ++k) loadings(i, k) = rng_load.normal();
  }
  for (Index j = 0; j < t; ++j) {
    for (int k = 0; k < cfg.rank; ++k) factors(j, k) = rng_fact.normal();
  }

  GeneratedPanel out;
  out.baseline = Matrixd(n, t);
  Matrixd y(n, t);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < t; ++j) {
      double common = cfg.level + a(i) + b(j) +
                      cfg.factor_scale * loadings.row(i).dot(factors.row(j));
      out.baseline(i, j) = common;
      y(i, j) = common + (cfg.noise_sd > 0 ? rng_eps.normal(0.0, cfg.noise_sd) : 0.0);
    }
  }
  const Index treat_col0 = cfg.treatment_year - cfg.first_year;
  for (Index j = treat_col0; j < t; ++j) {
    y(cfg.treated_index, j) += deltas[static_cast<std::size_t>(j - treat_col0)];
  }

  PanelDataset& panel = out.panel;
  char name[32];
  int width = cfg.n_units >= 100 ? 3 : 2;
  for (int i = 0; i < cfg.n_units; ++i) {
    std::snprintf(name, sizeof(name), "U%0*d", width, i);
    panel.units.emplace_back(name);
  }
  for (int j = 0; j < cfg.n_years; ++j) panel.years.push_back(cfg.first_year + j);
  panel.outcomes.push_back(cfg.outcome_name);
  panel.values.push_back(y);
  panel.observed.push_back(MaskArray::Constant(n, t, true));

  out.spec = make_treatment_spec(panel, panel.units[cfg.treated_index],
                                 cfg.treatment_year);
  double sum = 0;
  for (double d : deltas) sum += d;
  out.true_att = sum / static_cast<double>(deltas.size());
  return out;
}

}  // namespace panelcf
