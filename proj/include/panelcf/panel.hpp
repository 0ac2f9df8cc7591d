#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "panelcf/types.hpp"

namespace panelcf {

// Balanced-or-not unit x year x outcome panel. Units and outcomes are kept
// lexicographically sorted and years ascending, so every derived quantity is
// independent of input row order.
struct PanelDataset {
  std::vector<std::string> units;
  std::vector<int> years;
  std::vector<std::string> outcomes;
  // One N x T matrix and mask per outcome, rows in unit order, cols in year order.
  std::vector<Matrixd> values;
  std::vector<MaskArray> observed;

  int unit_index(const std::string& unit) const;
  int year_index(int year) const;
  int outcome_index(const std::string& outcome) const;

  Index n_units() const { return static_cast<Index>(units.size()); }
  Index n_years() const { return static_cast<Index>(years.size()); }
  Index n_cells() const { return n_units() * n_years(); }

  bool balanced(int outcome_idx) const;
  bool balanced() const;
  Index missing_count(int outcome_idx) const;
};

struct TreatmentSpec {
  std::string treated_unit;
  int treatment_year = 0;  // first post-treatment year
  std::vector<int> pre_years;
  std::vector<int> post_years;
};

// Validates membership and window non-emptiness and fills the derived
// pre/post year lists. Throws std::invalid_argument on violation.
TreatmentSpec make_treatment_spec(const PanelDataset& panel,
                                  const std::string& treated_unit,
                                  int treatment_year);

// --- ingestion ------------------------------------------------------------

// Long format: header "unit,year,outcome,value", one observation per row,
// empty value field = missing cell. Duplicate (unit, year, outcome) rows,
// non-contiguous year sets and non-numeric values are rejected with the
// offending row named.
PanelDataset load_panel(std::istream& in);
PanelDataset load_panel_file(const std::string& path);

// Inverse of load_panel: emits every cell in canonical order, missing cells
// with an empty value field, so load(serialize(p)) reproduces p exactly.
void serialize_panel(const PanelDataset& panel, std::ostream& out);
void serialize_panel_file(const PanelDataset& panel, const std::string& path);

// --- donor filtering ---------------------------------------------------

struct ExclusionEntry {
  std::string unit;
  std::string reason;  // e.g. conflict-peer, neighbor, new-state, micro-state
};

struct FilteredPanel {
  PanelDataset panel;
  std::vector<ExclusionEntry> log;
};

// Removes the excluded units. Unknown units, the treated unit (when given)
// and exclusions that would empty the donor pool are rejected.
FilteredPanel filter_donors(const PanelDataset& panel,
                            const std::vector<ExclusionEntry>& exclusions,
                            const std::string& treated_unit = "");

// Exclusion config: delimited text "unit,reason", optional header row.
std::vector<ExclusionEntry> load_exclusions(std::istream& in);
std::vector<ExclusionEntry> load_exclusions_file(const std::string& path);

// --- pre/post split ------------------------------------------------------

struct SplitData {
  Vectord y_pre;    // treated, length T0
  Vectord y_post;   // treated, length T2
  Matrixd x_pre;    // donors, T0 x J
  Matrixd x_post;   // donors, T2 x J
  std::vector<std::string> donors;  // column order
  std::vector<int> pre_years;
  std::vector<int> post_years;
  std::vector<std::string> warnings;
};

// Requires the outcome to be balanced; missing cells are reported in the
// error message. Donor columns follow the panel's unit order.
SplitData split_pre_post(const PanelDataset& panel, const TreatmentSpec& spec,
                         const std::string& outcome);

// --- descriptive statistics -----------------------------------------------

struct OutcomeStats {
  std::string outcome;
  double treated_pre_mean = 0, treated_pre_std = 0;
  double treated_post_mean = 0, treated_post_std = 0;
  double donor_mean = 0, donor_std = 0;
  Index treated_pre_n = 0, treated_post_n = 0, donor_n = 0;
  Index missing_cells = 0;
};

struct DescriptiveStats {
  std::vector<OutcomeStats> rows;
  Index total_cells = 0;  // |units| x |years|
};

// Tolerates missing cells (observed counts are reported per window).
// Standard deviations use the n-1 divisor; windows with fewer than two
// observations report std 0.
DescriptiveStats describe(const PanelDataset& panel, const TreatmentSpec& spec);

// Sample mean / std over a plain series (shared by describe and tests).
double sample_mean(const Vectord& v);
double sample_std(const Vectord& v);

}  // namespace panelcf
