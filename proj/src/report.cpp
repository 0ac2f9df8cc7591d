#include "panelcf/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace panelcf {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    // collapse negative zero after rounding
    bool all_zero = true;
    for (char c : s) {
      if (c >= '1' && c <= '9') all_zero = false;
    }
    if (all_zero) s = s.substr(1);
  }
  return s;
}

}  // namespace

std::string fmt_plain(double v, int decimals) {
  if (std::isnan(v)) return "n/a";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fixed(v, decimals);
}

std::string fmt_coef(double v, int decimals) {
  std::string s = fmt_plain(v, decimals);
  if (s.rfind("0.", 0) == 0) return s.substr(1);
  if (s.rfind("-0.", 0) == 0) return "-" + s.substr(2);
  return s;
}

std::string fmt_weight(double w) {
  if (w == 0.0) return "0";
  if (std::abs(w) < 0.005) return "<0.01";
  return fixed(w, 2);
}

std::string fmt_point_with_stars(const ATTEstimate& e) {
  return fmt_coef(e.point) + e.stars + " (" + fmt_coef(e.se) + ")";
}

std::string render_table1(const DescriptiveStats& stats) {
  std::ostringstream out;
  out << "outcome\tpre_mean\tpre_std\tpost_mean\tpost_std\tdonor_mean\tdonor_std\n";
  for (const auto& row : stats.rows) {
    out << row.outcome << '\t' << fmt_plain(row.treated_pre_mean) << '\t'
        << fmt_plain(row.treated_pre_std) << '\t'
        << fmt_plain(row.treated_post_mean) << '\t'
        << fmt_plain(row.treated_post_std) << '\t' << fmt_plain(row.donor_mean)
        << '\t' << fmt_plain(row.donor_std) << '\n';
  }
  out << "# " << stats.total_cells << " country-year matched cells\n";
  return out.str();
}

namespace {

void header_rows(std::ostringstream& out, const std::vector<std::string>& outcomes) {
  for (const auto& name : outcomes) out << '\t' << name;
  out << '\n';
  for (std::size_t i = 0; i < outcomes.size(); ++i) out << "\t(" << (i + 1) << ')';
  out << '\n';
}

void att_panel(std::ostringstream& out, const std::vector<ATTEstimate>& es,
               const char* ci_open, const char* ci_close) {
  out << "ATT";
  for (const auto& e : es) out << '\t' << fmt_point_with_stars(e);
  out << '\n';
  out << "Empirical 95% confidence intervals";
  for (const auto& e : es) {
    out << '\t' << ci_open << fmt_coef(e.ci_lower) << ", " << fmt_coef(e.ci_upper)
        << ci_close;
  }
  out << '\n';
}

void p_row(std::ostringstream& out, const std::vector<ATTEstimate>& es) {
  out << "Simulation-based p-value";
  for (const auto& e : es) out << '\t' << fmt_plain(e.p_bootstrap);
  out << '\n';
}

}  // namespace

std::string render_table2(const std::vector<std::string>& outcomes,
                          const std::vector<ATTEstimate>& low,
                          const std::vector<ATTEstimate>& high) {
  std::ostringstream out;
  header_rows(out, outcomes);
  out << "Panel A: low shrinkage\n";
  att_panel(out, low, "{", "}");
  p_row(out, low);
  out << "Panel B: high shrinkage\n";
  att_panel(out, high, "{", "}");
  p_row(out, high);
  return out.str();
}

std::string render_table3(const std::vector<std::string>& outcomes,
                          const std::vector<ATTEstimate>& estimates) {
  std::ostringstream out;
  header_rows(out, outcomes);
  att_panel(out, estimates, "(", ")");
  out << "Post/Pre-Treatment RMSPE Ratio";
  for (const auto& e : estimates) out << '\t' << fmt_plain(e.rmspe_ratio);
  out << '\n';
  p_row(out, estimates);
  return out.str();
}

std::string render_table4(const std::vector<std::string>& donors,
                          const std::vector<std::string>& outcomes,
                          const Matrixd& weights) {
  std::ostringstream out;
  for (const auto& name : outcomes) out << '\t' << name;
  out << '\n';
  for (std::size_t d = 0; d < donors.size(); ++d) {
    out << donors[d];
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      out << '\t' << fmt_weight(weights(static_cast<Index>(d), static_cast<Index>(k)));
    }
    out << '\n';
  }
  return out.str();
}

std::string render_cv_report(const CVReport& report) {
  std::ostringstream out;
  out << "lambda";
  for (std::size_t f = 0; f < report.folds.size(); ++f) out << "\tfold" << (f + 1);
  out << "\tmean\n";
  for (std::size_t g = 0; g < report.grid.size(); ++g) {
    out << fmt_plain(report.grid.values[g], 6);
    for (Index f = 0; f < report.fold_rmspe.rows(); ++f) {
      out << '\t' << fmt_plain(report.fold_rmspe(f, static_cast<Index>(g)), 6);
    }
    out << '\t' << fmt_plain(report.mean_rmspe[g], 6) << '\n';
  }
  out << "selected\t" << fmt_plain(report.selected_lambda, 6) << '\n';
  return out.str();
}

std::string render_regime_report(const ShrinkageRegimes& regimes) {
  std::ostringstream out;
  out << "lambda\tcv_rmse\thalf\n";
  const int lower_size = (static_cast<int>(regimes.grid.size()) + 1) / 2;
  for (std::size_t g = 0; g < regimes.grid.size(); ++g) {
    out << fmt_plain(regimes.grid.values[g], 6) << '\t'
        << fmt_plain(regimes.cv_rmse[g], 6) << '\t'
        << (static_cast<int>(g) < lower_size ? "low" : "high") << '\n';
  }
  out << "lambda_low\t" << fmt_plain(regimes.lambda_low, 6) << '\n';
  out << "lambda_high\t" << fmt_plain(regimes.lambda_high, 6) << '\n';
  return out.str();
}

std::string render_placebo(const PlaceboResult& result) {
  std::ostringstream out;
  out << "unit\trmspe_ratio\tstatus\n";
  for (const auto& u : result.units) {
    out << u.unit << '\t';
    if (u.failed) {
      out << "\texcluded: " << u.message << '\n';
    } else {
      out << fmt_plain(u.ratio) << "\tok\n";
    }
  }
  out << "p_placebo\t" << fmt_plain(result.p_value) << "\t(" << result.n_evaluated
      << " units evaluated)\n";
  return out.str();
}

}  // namespace panelcf
