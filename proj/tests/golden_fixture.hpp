#pragma once

// Shared fixture behind the golden-file renderer checks; the acceptance
// suite runs the same comparison.

#include <string>
#include <vector>

#include "panelcf/analysis.hpp"
#include "panelcf/panel.hpp"
#include "panelcf/report.hpp"

namespace golden {

inline panelcf::ATTEstimate make_att(double point, double se, double lo,
                                     double hi, double p, double ratio,
                                     double p_placebo) {
  panelcf::BootstrapResult b;
  b.se = se;
  b.ci_lower = lo;
  b.ci_upper = hi;
  b.p_value = p;
  panelcf::RmspeDiagnostics d;
  d.pre = 0.1;
  d.post = 0.1 * ratio;
  d.ratio = ratio;
  return panelcf::assemble_att(point, b, d, p_placebo, 12345);
}

struct Fixture {
  std::vector<std::string> outcomes;
  std::vector<panelcf::ATTEstimate> low, high;
  panelcf::DescriptiveStats stats;
  std::vector<std::string> donors;
  panelcf::Matrixd weights;
};

inline Fixture build_fixture() {
  Fixture f;
  f.outcomes = {"log_gdp", "investment_rate", "net_migration"};
  f.low = {make_att(-0.756, 0.028, -0.816, -0.705, 0.0, 220.96, 0.027),
           make_att(-14.513, 0.982, -16.462, -12.691, 0.0, 1076.794, 0.027),
           make_att(-1.006, 0.526, -2.144, -0.117, 0.056, 11.687, 0.054)};
  f.high = {make_att(-0.750, 0.036, -0.813, -0.687, 0.0, 215.4, 0.027),
            make_att(-14.305, 0.919, -15.737, -11.823, 0.0, 1020.13, 0.027),
            make_att(-1.006, 0.453, -1.911, -0.232, 0.027, 11.2, 0.054)};

  f.stats.total_cells = 1221;
  panelcf::OutcomeStats r1;
  r1.outcome = "log_gdp";
  r1.treated_pre_mean = 24.41;
  r1.treated_pre_std = 0.288;
  r1.treated_post_mean = 24.72;
  r1.treated_post_std = 0.506;
  r1.donor_mean = 23.45;
  r1.donor_std = 1.44;
  panelcf::OutcomeStats r2;
  r2.outcome = "net_migration";
  r2.treated_pre_mean = -1.085;
  r2.treated_pre_std = 1.435;
  r2.treated_post_mean = -0.385;
  r2.treated_post_std = 1.109;
  r2.donor_mean = -2.82;
  r2.donor_std = 7.56;
  f.stats.rows = {r1, r2};

  f.donors = {"Albania", "Armenia", "Bulgaria", "Cuba", "Moldova"};
  f.weights.resize(5, 3);
  f.weights << 0.0, 0.02, 0.0,
      0.0, -0.11, 0.002,
      0.0, -0.04, 0.58,
      0.0, 0.0, 0.73,
      -0.14, 0.0, -0.0049;
  return f;
}

// Renders indexed 1..4 to mirror the golden file names.
inline std::string render_golden(int table, const Fixture& f) {
  switch (table) {
    case 1:
      return panelcf::render_table1(f.stats);
    case 2:
      return panelcf::render_table2(f.outcomes, f.low, f.high);
    case 3:
      return panelcf::render_table3(f.outcomes, f.low);
    case 4:
      return panelcf::render_table4(f.donors, f.outcomes, f.weights);
  }
  return "";
}

}  // namespace golden
