#include "panelcf/serialize.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <vector>

namespace panelcf {

const char* const kToolkitVersion = "0.1.0";

using nlohmann::json;

namespace {

json vec_to_json(const Vectord& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  return json(out);
}

Vectord vec_from_json(const json& j) {
  std::vector<double> raw = j.get<std::vector<double>>();
  return Eigen::Map<Vectord>(raw.data(), static_cast<Index>(raw.size()));
}

// NaN/inf are not representable in JSON; ratios and placebo p's can be both.
json finite_or_null(double v) {
  if (std::isfinite(v)) return json(v);
  if (std::isnan(v)) return json();
  return json(v > 0 ? "inf" : "-inf");
}

double finite_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    return j.get<std::string>() == "inf"
               ? std::numeric_limits<double>::infinity()
               : -std::numeric_limits<double>::infinity();
  }
  return j.get<double>();
}

}  // namespace

json to_json(const ATTEstimate& e) {
  return json{{"point", e.point},
              {"se", e.se},
              {"ci_lower", e.ci_lower},
              {"ci_upper", e.ci_upper},
              {"p_bootstrap", e.p_bootstrap},
              {"p_placebo", finite_or_null(e.p_placebo)},
              {"rmspe_pre", e.rmspe_pre},
              {"rmspe_post", e.rmspe_post},
              {"rmspe_ratio", finite_or_null(e.rmspe_ratio)},
              {"stars", e.stars},
              {"seed", e.seed}};
}

ATTEstimate att_from_json(const json& j) {
  ATTEstimate e;
  e.point = j.at("point").get<double>();
  e.se = j.at("se").get<double>();
  e.ci_lower = j.at("ci_lower").get<double>();
  e.ci_upper = j.at("ci_upper").get<double>();
  e.p_bootstrap = j.at("p_bootstrap").get<double>();
  e.p_placebo = finite_from_json(j.at("p_placebo"));
  e.rmspe_pre = j.at("rmspe_pre").get<double>();
  e.rmspe_post = j.at("rmspe_post").get<double>();
  e.rmspe_ratio = finite_from_json(j.at("rmspe_ratio"));
  e.stars = j.at("stars").get<std::string>();
  e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

json to_json(const GapSeries& g) {
  return json{{"years", g.years},
              {"observed", vec_to_json(g.observed)},
              {"synthetic", vec_to_json(g.synthetic)},
              {"gap", vec_to_json(g.gap)}};
}

GapSeries gap_series_from_json(const json& j) {
  return make_gap_series(j.at("years").get<std::vector<int>>(),
                         vec_from_json(j.at("observed")),
                         vec_from_json(j.at("synthetic")));
}

json to_json(const WeightVector& w) {
  json weights = json::object();
  for (std::size_t d = 0; d < w.donors.size(); ++d) {
    weights[w.donors[d]] = w.weights(static_cast<Index>(d));
  }
  return json{{"mode", w.mode == WeightMode::convex ? "convex" : "unrestricted"},
              {"intercept", w.intercept},
              {"weights", weights}};
}

json to_json(const CVReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back(json{{"begin", f.begin}, {"end", f.end}});
  }
  json fold_rmspe = json::array();
  for (Index f = 0; f < r.fold_rmspe.rows(); ++f) {
    std::vector<double> row(r.fold_rmspe.cols());
    for (Index g = 0; g < r.fold_rmspe.cols(); ++g) row[g] = r.fold_rmspe(f, g);
    fold_rmspe.push_back(row);
  }
  return json{{"grid", r.grid.values},
              {"fold_rmspe", fold_rmspe},
              {"mean_rmspe", r.mean_rmspe},
              {"folds", folds},
              {"selected_lambda", r.selected_lambda},
              {"selected_index", r.selected_index}};
}

json to_json(const ShrinkageRegimes& r) {
  return json{{"grid", r.grid.values},
              {"cv_rmse", r.cv_rmse},
              {"lambda_low", r.lambda_low},
              {"lambda_high", r.lambda_high},
              {"low_index", r.low_index},
              {"high_index", r.high_index}};
}

json to_json(const PlaceboResult& r) {
  json units = json::array();
  for (const auto& u : r.units) {
    units.push_back(json{{"unit", u.unit},
                         {"ratio", u.failed ? json() : finite_or_null(u.ratio)},
                         {"failed", u.failed},
                         {"message", u.message}});
  }
  return json{{"units", units},
              {"treated_ratio", finite_or_null(r.treated_ratio)},
              {"p_placebo", r.p_value},
              {"n_evaluated", r.n_evaluated},
              {"warnings", r.warnings}};
}

json to_json(const DescriptiveStats& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back(json{{"outcome", r.outcome},
                        {"treated_pre_mean", r.treated_pre_mean},
                        {"treated_pre_std", r.treated_pre_std},
                        {"treated_pre_n", r.treated_pre_n},
                        {"treated_post_mean", r.treated_post_mean},
                        {"treated_post_std", r.treated_post_std},
                        {"treated_post_n", r.treated_post_n},
                        {"donor_mean", r.donor_mean},
                        {"donor_std", r.donor_std},
                        {"donor_n", r.donor_n},
                        {"missing_cells", r.missing_cells}});
  }
  return json{{"rows", rows}, {"total_cells", s.total_cells}};
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot hash missing file '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(chunk[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace panelcf
