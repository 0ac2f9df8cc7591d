#include <doctest.h>

#include <fstream>
#include <sstream>

#include "golden_fixture.hpp"
#include "panelcf/report.hpp"

using namespace panelcf;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("journal-style coefficient formatting") {
  CHECK(fmt_coef(-0.756) == "-.756");
  CHECK(fmt_coef(0.028) == ".028");
  CHECK(fmt_coef(-14.513) == "-14.513");
  CHECK(fmt_coef(220.96) == "220.960");
  CHECK(fmt_coef(0.0) == ".000");
  CHECK(fmt_coef(-0.0001) == ".000");  // negative zero collapses
  CHECK(fmt_plain(0.136) == "0.136");
  CHECK(fmt_plain(0.0) == "0.000");
}

TEST_CASE("weight formatting convention") {
  CHECK(fmt_weight(0.0) == "0");
  CHECK(fmt_weight(0.004) == "<0.01");
  CHECK(fmt_weight(-0.0049) == "<0.01");
  CHECK(fmt_weight(0.005) == "0.01");
  CHECK(fmt_weight(0.02) == "0.02");
  CHECK(fmt_weight(-0.11) == "-0.11");
  CHECK(fmt_weight(0.58) == "0.58");
  CHECK(fmt_weight(1.0) == "1.00");
}

TEST_CASE("point-with-stars cell") {
  auto e = golden::make_att(-0.756, 0.028, -0.816, -0.705, 0.0, 1.0, 0.027);
  CHECK(fmt_point_with_stars(e) == "-.756*** (.028)");
  auto one_star = golden::make_att(-1.006, 0.526, -2.144, -0.117, 0.056, 1.0, 0.054);
  CHECK(fmt_point_with_stars(one_star) == "-1.006* (.526)");
}

TEST_CASE("table renderers reproduce the golden files byte for byte") {
  auto fixture = golden::build_fixture();
  for (int t = 1; t <= 4; ++t) {
    CAPTURE(t);
    std::string expected =
        read_file(std::string(GOLDEN_DIR) + "/table" + std::to_string(t) + ".txt");
    CHECK(golden::render_golden(t, fixture) == expected);
  }
}

TEST_CASE("renderers are pure functions of their inputs") {
  auto fixture = golden::build_fixture();
  CHECK(golden::render_golden(2, fixture) == golden::render_golden(2, fixture));
}

TEST_CASE("cv and regime reports include selections") {
  CVReport report;
  report.grid = PenaltyGrid({0.01, 0.05});
  report.folds = contiguous_folds(10, 5);
  report.fold_rmspe.resize(5, 2);
  report.fold_rmspe.setConstant(0.25);
  report.mean_rmspe = {0.25, 0.3};
  report.selected_lambda = 0.01;
  report.selected_index = 0;
  std::string text = render_cv_report(report);
  CHECK(text.find("selected\t0.010000") != std::string::npos);
  CHECK(text.find("fold5") != std::string::npos);

  ShrinkageRegimes regimes;
  regimes.grid = PenaltyGrid({0.1, 0.2, 0.4, 0.8});
  regimes.cv_rmse = {1.0, 2.0, 3.0, 0.5};
  regimes.lambda_low = 0.1;
  regimes.lambda_high = 0.8;
  std::string rtext = render_regime_report(regimes);
  CHECK(rtext.find("lambda_low\t0.100000") != std::string::npos);
  CHECK(rtext.find("lambda_high\t0.800000") != std::string::npos);
}
