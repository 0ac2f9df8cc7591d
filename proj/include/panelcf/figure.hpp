#pragma once

#include <string>
#include <vector>

#include "panelcf/analysis.hpp"
#include "panelcf/types.hpp"

namespace panelcf {

// Year-aligned confidence band, typically covering the post period only.
struct YearBand {
  std::vector<int> years;
  Vectord lower;  // band around the gap at each year
  Vectord upper;
};

// Shifts the bootstrap ATT interval to each post-year gap, the construction
// behind the per-year bands in the gap figures.
YearBand band_from_bootstrap(const GapSeries& gaps, int treatment_year,
                             double att, double ci_lower, double ci_upper);

// Writes a static SVG (observed and synthetic lines, shaded band, treatment
// rule) plus a delimited data file so external plotters can re-render.
// Throws when the band years are not a subset of the gap years or the band
// vectors disagree in length.
void emit_gap_figure(const GapSeries& gaps, const YearBand& band,
                     int treatment_year, const std::string& svg_path,
                     const std::string& data_path);

}  // namespace panelcf
