#include "panelcf/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace panelcf {

namespace {

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) return false;
    out = static_cast<int>(v);
    return true;
  } catch (...) {
    return false;
  }
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

template <typename T>
int index_of(const std::vector<T>& v, const T& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) return -1;
  return static_cast<int>(it - v.begin());
}

}  // namespace

int PanelDataset::unit_index(const std::string& unit) const {
  return index_of(units, unit);
}

int PanelDataset::year_index(int year) const {
  if (years.empty() || year < years.front() || year > years.back()) return -1;
  return year - years.front();
}

int PanelDataset::outcome_index(const std::string& outcome) const {
  return index_of(outcomes, outcome);
}

bool PanelDataset::balanced(int outcome_idx) const {
  return observed[outcome_idx].all();
}

bool PanelDataset::balanced() const {
  for (std::size_t k = 0; k < observed.size(); ++k) {
    if (!balanced(static_cast<int>(k))) return false;
  }
  return true;
}

Index PanelDataset::missing_count(int outcome_idx) const {
  return n_cells() - observed[outcome_idx].count();
}

TreatmentSpec make_treatment_spec(const PanelDataset& panel,
                                  const std::string& treated_unit,
                                  int treatment_year) {
  if (panel.unit_index(treated_unit) < 0) {
    throw std::invalid_argument("treated unit '" + treated_unit +
                                "' not in panel");
  }
  if (panel.years.empty()) throw std::invalid_argument("panel has no years");
  if (treatment_year <= panel.years.front() ||
      treatment_year > panel.years.back()) {
    throw std::invalid_argument(
        "treatment year " + std::to_string(treatment_year) +
        " leaves an empty pre or post window for panel years " +
        std::to_string(panel.years.front()) + ".." +
        std::to_string(panel.years.back()));
  }
  TreatmentSpec spec;
  spec.treated_unit = treated_unit;
  spec.treatment_year = treatment_year;
  for (int y : panel.years) {
    if (y < treatment_year)
      spec.pre_years.push_back(y);
    else
      spec.post_years.push_back(y);
  }
  return spec;
}

PanelDataset load_panel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty input");
  line = strip_cr(line);
  if (line != "unit,year,outcome,value") {
    throw std::invalid_argument("expected header 'unit,year,outcome,value', got '" +
                                line + "'");
  }

  struct Row {
    std::string unit, outcome;
    int year;
    bool has_value;
    double value;
  };
  std::vector<Row> rows;
  std::map<std::tuple<std::string, int, std::string>, std::size_t> seen;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw std::invalid_argument("row " + std::to_string(line_no) +
                                  ": expected 4 fields, got " +
                                  std::to_string(fields.size()));
    }
    Row r;
    r.unit = fields[0];
    r.outcome = fields[2];
    if (r.unit.empty() || r.outcome.empty()) {
      throw std::invalid_argument("row " + std::to_string(line_no) +
                                  ": empty unit or outcome");
    }
    if (!parse_int(fields[1], r.year)) {
      throw std::invalid_argument("row " + std::to_string(line_no) +
                                  ": non-integer year '" + fields[1] + "'");
    }
    r.has_value = !fields[3].empty();
    r.value = 0.0;
    if (r.has_value && !parse_double(fields[3], r.value)) {
      throw std::invalid_argument("row " + std::to_string(line_no) +
                                  ": non-numeric value '" + fields[3] +
                                  "' for (" + r.unit + ", " + fields[1] + ", " +
                                  r.outcome + ")");
    }
    auto key = std::make_tuple(r.unit, r.year, r.outcome);
    auto [it, inserted] = seen.emplace(key, line_no);
    if (!inserted) {
      throw std::invalid_argument(
          "duplicate observation (" + r.unit + ", " + std::to_string(r.year) +
          ", " + r.outcome + ") at row " + std::to_string(line_no) +
          " (first at row " + std::to_string(it->second) + ")");
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw std::invalid_argument("no data rows");

  std::set<std::string> unit_set, outcome_set;
  std::set<int> year_set;
  for (const auto& r : rows) {
    unit_set.insert(r.unit);
    outcome_set.insert(r.outcome);
    year_set.insert(r.year);
  }

  PanelDataset panel;
  panel.units.assign(unit_set.begin(), unit_set.end());
  panel.outcomes.assign(outcome_set.begin(), outcome_set.end());
  panel.years.assign(year_set.begin(), year_set.end());

  int first = panel.years.front(), last = panel.years.back();
  if (last - first + 1 != static_cast<int>(panel.years.size())) {
    std::string missing;
    for (int y = first; y <= last; ++y) {
      if (!year_set.count(y)) {
        if (!missing.empty()) missing += ", ";
        missing += std::to_string(y);
      }
    }
    throw std::invalid_argument("non-contiguous year set: missing " + missing);
  }

  const Index n = panel.n_units();
  const Index t = panel.n_years();
  panel.values.assign(panel.outcomes.size(),
                      Matrixd::Constant(n, t, std::numeric_limits<double>::quiet_NaN()));
  panel.observed.assign(panel.outcomes.size(), MaskArray::Constant(n, t, false));

  for (const auto& r : rows) {
    int i = panel.unit_index(r.unit);
    int j = panel.year_index(r.year);
    int k = panel.outcome_index(r.outcome);
    if (r.has_value) {
      panel.values[k](i, j) = r.value;
      panel.observed[k](i, j) = true;
    }
  }
  return panel;
}

PanelDataset load_panel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open panel file '" + path + "'");
  return load_panel(in);
}

void serialize_panel(const PanelDataset& panel, std::ostream& out) {
  out << "unit,year,outcome,value\n";
  char buf[64];
  for (std::size_t i = 0; i < panel.units.size(); ++i) {
    for (std::size_t j = 0; j < panel.years.size(); ++j) {
      for (std::size_t k = 0; k < panel.outcomes.size(); ++k) {
        out << panel.units[i] << ',' << panel.years[j] << ','
            << panel.outcomes[k] << ',';
        if (panel.observed[k](i, j)) {
          std::snprintf(buf, sizeof(buf), "%.17g", panel.values[k](i, j));
          out << buf;
        }
        out << '\n';
      }
    }
  }
}

void serialize_panel_file(const PanelDataset& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  serialize_panel(panel, out);
}

FilteredPanel filter_donors(const PanelDataset& panel,
                            const std::vector<ExclusionEntry>& exclusions,
                            const std::string& treated_unit) {
  std::set<std::string> drop;
  for (const auto& e : exclusions) {
    if (panel.unit_index(e.unit) < 0) {
      throw std::invalid_argument("exclusion names unknown unit '" + e.unit + "'");
    }
    if (!treated_unit.empty() && e.unit == treated_unit) {
      throw std::invalid_argument("cannot exclude the treated unit '" +
                                  treated_unit + "'");
    }
    drop.insert(e.unit);
  }

  std::vector<int> keep;
  for (std::size_t i = 0; i < panel.units.size(); ++i) {
    if (!drop.count(panel.units[i])) keep.push_back(static_cast<int>(i));
  }
  std::size_t donors_left = keep.size();
  if (!treated_unit.empty() && panel.unit_index(treated_unit) >= 0) {
    donors_left -= 1;
  }
  if (keep.empty() || donors_left == 0) {
    throw std::invalid_argument("exclusions would leave no donor units");
  }

  FilteredPanel result;
  result.log = exclusions;
  PanelDataset& p = result.panel;
  p.years = panel.years;
  p.outcomes = panel.outcomes;
  for (int i : keep) p.units.push_back(panel.units[i]);
  const Index n = static_cast<Index>(keep.size());
  const Index t = panel.n_years();
  p.values.assign(panel.outcomes.size(), Matrixd(n, t));
  p.observed.assign(panel.outcomes.size(), MaskArray(n, t));
  for (std::size_t k = 0; k < panel.outcomes.size(); ++k) {
    for (Index r = 0; r < n; ++r) {
      p.values[k].row(r) = panel.values[k].row(keep[r]);
      p.observed[k].row(r) = panel.observed[k].row(keep[r]);
    }
  }
  return result;
}

std::vector<ExclusionEntry> load_exclusions(std::istream& in) {
  std::vector<ExclusionEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (line_no == 1 && line == "unit,reason") continue;
    auto fields = split_fields(line);
    if (fields.size() != 2 || fields[0].empty()) {
      throw std::invalid_argument("exclusion row " + std::to_string(line_no) +
                                  ": expected 'unit,reason'");
    }
    out.push_back({fields[0], fields[1]});
  }
  return out;
}

std::vector<ExclusionEntry> load_exclusions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open exclusion file '" + path + "'");
  return load_exclusions(in);
}

SplitData split_pre_post(const PanelDataset& panel, const TreatmentSpec& spec,
                         const std::string& outcome) {
  int k = panel.outcome_index(outcome);
  if (k < 0) throw std::invalid_argument("unknown outcome '" + outcome + "'");
  int treated = panel.unit_index(spec.treated_unit);
  if (treated < 0) {
    throw std::invalid_argument("treated unit '" + spec.treated_unit +
                                "' not in panel");
  }
  if (!panel.balanced(k)) {
    std::string cells;
    int listed = 0;
    for (Index i = 0; i < panel.n_units() && listed < 8; ++i) {
      for (Index j = 0; j < panel.n_years() && listed < 8; ++j) {
        if (!panel.observed[k](i, j)) {
          if (!cells.empty()) cells += ", ";
          cells += "(" + panel.units[i] + ", " + std::to_string(panel.years[j]) + ")";
          ++listed;
        }
      }
    }
    throw std::invalid_argument("outcome '" + outcome + "' has " +
                                std::to_string(panel.missing_count(k)) +
                                " missing cells: " + cells);
  }

  SplitData s;
  s.pre_years = spec.pre_years;
  s.post_years = spec.post_years;
  const Index t0 = static_cast<Index>(s.pre_years.size());
  const Index t2 = static_cast<Index>(s.post_years.size());
  const Index j_count = panel.n_units() - 1;

  s.y_pre.resize(t0);
  s.y_post.resize(t2);
  s.x_pre.resize(t0, j_count);
  s.x_post.resize(t2, j_count);

  for (Index i = 0; i < panel.n_units(); ++i) {
    if (i != treated) s.donors.push_back(panel.units[i]);
  }
  const Matrixd& v = panel.values[k];
  for (Index r = 0; r < t0; ++r) {
    int yj = panel.year_index(s.pre_years[r]);
    s.y_pre(r) = v(treated, yj);
    Index col = 0;
    for (Index i = 0; i < panel.n_units(); ++i) {
      if (i == treated) continue;
      s.x_pre(r, col++) = v(i, yj);
    }
  }
  for (Index r = 0; r < t2; ++r) {
    int yj = panel.year_index(s.post_years[r]);
    s.y_post(r) = v(treated, yj);
    Index col = 0;
    for (Index i = 0; i < panel.n_units(); ++i) {
      if (i == treated) continue;
      s.x_post(r, col++) = v(i, yj);
    }
  }
  if (t0 < 5) {
    s.warnings.push_back("pre-treatment window has only " + std::to_string(t0) +
                         " periods; block cross-validation is not possible");
  }
  return s;
}

double sample_mean(const Vectord& v) {
  if (v.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  return v.mean();
}

double sample_std(const Vectord& v) {
  const Index n = v.size();
  if (n < 2) return 0.0;
  double m = v.mean();
  double ss = (v.array() - m).square().sum();
  return std::sqrt(ss / static_cast<double>(n - 1));
}

namespace {

struct Accum {
  double sum = 0, sumsq = 0;
  Index n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  double stdev() const {
    if (n < 2) return 0.0;
    double m = mean();
    double ss = sumsq - static_cast<double>(n) * m * m;
    if (ss < 0) ss = 0;
    return std::sqrt(ss / static_cast<double>(n - 1));
  }
};

}  // namespace

DescriptiveStats describe(const PanelDataset& panel, const TreatmentSpec& spec) {
  int treated = panel.unit_index(spec.treated_unit);
  if (treated < 0) {
    throw std::invalid_argument("treated unit '" + spec.treated_unit +
                                "' not in panel");
  }
  DescriptiveStats stats;
  stats.total_cells = panel.n_cells();
  for (std::size_t k = 0; k < panel.outcomes.size(); ++k) {
    OutcomeStats row;
    row.outcome = panel.outcomes[k];
    row.missing_cells = panel.missing_count(static_cast<int>(k));
    Accum pre, post, donor;
    const Matrixd& v = panel.values[k];
    const MaskArray& m = panel.observed[k];
    for (Index j = 0; j < panel.n_years(); ++j) {
      int year = panel.years[j];
      for (Index i = 0; i < panel.n_units(); ++i) {
        if (!m(i, j)) continue;
        if (i == treated) {
          if (year < spec.treatment_year)
            pre.add(v(i, j));
          else
            post.add(v(i, j));
        } else {
          donor.add(v(i, j));
        }
      }
    }
    row.treated_pre_mean = pre.mean();
    row.treated_pre_std = pre.stdev();
    row.treated_pre_n = pre.n;
    row.treated_post_mean = post.mean();
    row.treated_post_std = post.stdev();
    row.treated_post_n = post.n;
    row.donor_mean = donor.mean();
    row.donor_std = donor.stdev();
    row.donor_n = donor.n;
    stats.rows.push_back(row);
  }
  return stats;
}

}  // namespace panelcf
