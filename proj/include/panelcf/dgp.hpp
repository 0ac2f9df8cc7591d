#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panelcf/panel.hpp"
#include "panelcf/types.hpp"

namespace panelcf {

// Low-rank factor panel with an injected treatment path:
//   Y_it = level + a_i + b_t + factor_scale * sum_k L_ik F_tk + noise_sd * eps_it
// plus delta_t on the treated unit's post years.
struct DGPConfig {
  int n_units = 37;
  int n_years = 33;
  int rank = 2;
  double noise_sd = 0.0;
  std::vector<double> effect_path;  // one delta per post year; empty = null
  int treated_index = 0;
  int first_year = 1990;
  int treatment_year = 2011;
  std::uint64_t seed = 0;
  double unit_effect_min = -1.0, unit_effect_max = 1.0;
  double time_effect_min = -1.0, time_effect_max = 1.0;
  double factor_scale = 1.0;
  double level = 0.0;
  std::string outcome_name = "y";
};

struct GeneratedPanel {
  PanelDataset panel;
  TreatmentSpec spec;
  double true_att = 0;  // mean of the effect path
  Matrixd baseline;     // noise-free untreated surface, units x years
};

inline std::vector<double> step_effect(double delta, int n_post) {
  return std::vector<double>(static_cast<std::size_t>(n_post), delta);
}

GeneratedPanel generate_factor_panel(const DGPConfig& cfg);

}  // namespace panelcf
