#pragma once

#include <string>
#include <vector>

#include "panelcf/analysis.hpp"
#include "panelcf/panel.hpp"

namespace panelcf {

// Journal-style numerals: fixed decimals with the leading zero dropped
// ("-.756", ".028", "-14.513"); negative zero collapses to positive.
std::string fmt_coef(double v, int decimals = 3);

// Plain fixed-point ("0.000", "0.136") for p-values and Table-1 cells.
std::string fmt_plain(double v, int decimals = 3);

// Donor-weight convention: exact zeros print "0", magnitudes below 0.005
// print "<0.01", everything else two decimals.
std::string fmt_weight(double w);

// "-.756*** (.028)"
std::string fmt_point_with_stars(const ATTEstimate& e);

// Descriptive statistics in the treated-pre / treated-post / donor-pool
// column layout, one outcome per row, with the matched-cell count note.
std::string render_table1(const DescriptiveStats& stats);

// Two-panel ATT table (Panel A: low shrinkage, Panel B: high shrinkage),
// point + stars + SE, CI braces and p-value rows per outcome column.
std::string render_table2(const std::vector<std::string>& outcomes,
                          const std::vector<ATTEstimate>& low,
                          const std::vector<ATTEstimate>& high);

// Single-panel ATT table with CI parentheses, post/pre RMSPE ratio and
// p-value rows per outcome column.
std::string render_table3(const std::vector<std::string>& outcomes,
                          const std::vector<ATTEstimate>& estimates);

// Donor-by-outcome weight matrix under the weight formatting convention.
std::string render_table4(const std::vector<std::string>& donors,
                          const std::vector<std::string>& outcomes,
                          const Matrixd& weights);

// Per-lambda fold RMSPE matrix and selection summary.
std::string render_cv_report(const CVReport& report);

// Penalty grid with per-lambda CV RMSE and the two selected regimes.
std::string render_regime_report(const ShrinkageRegimes& regimes);

// Per-unit post/pre ratio dump for external plotting.
std::string render_placebo(const PlaceboResult& result);

}  // namespace panelcf
