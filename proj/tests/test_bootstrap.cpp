#include <doctest.h>

#include "oracles.hpp"
#include "panelcf/bootstrap.hpp"

using namespace panelcf;

TEST_CASE("rmspe and ratio basics") {
  Vectord pre(2), post(2);
  pre << 1, 1;
  post << 2, 2;
  CHECK(rmspe_ratio(pre, post) == doctest::Approx(2.0));

  pre << 3, 4;
  post << 3, 4;
  CHECK(rmspe_ratio(pre, post) == doctest::Approx(1.0));

  Vectord zeros = Vectord::Zero(3);
  Vectord ones = Vectord::Ones(3);
  CHECK_THROWS_WITH_AS(rmspe_ratio(zeros, ones),
                       doctest::Contains("perfect pre-fit"), std::domain_error);
  try {
    rmspe_ratio(zeros, ones);
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("rmspe_post") != std::string::npos);
  }
  Vectord empty;
  CHECK_THROWS_AS(rmspe(empty), std::invalid_argument);
}

TEST_CASE("constant gaps give a degenerate distribution") {
  Vectord gaps = Vectord::Constant(4, -3.0);
  BootstrapConfig cfg;
  cfg.replications = 500;
  cfg.seed = 99;
  auto r = blocked_bootstrap(gaps, cfg);
  CHECK(r.se == 0.0);
  CHECK(r.ci_lower == -3.0);
  CHECK(r.ci_upper == -3.0);
  CHECK(r.p_value == 0.0);
}

TEST_CASE("full-length blocks are circular rotations") {
  Vectord gaps(6);
  gaps << 1, -1, 1, -1, 1, -1;
  // oracle: every rotation of the series has the sample mean
  for (const auto& rot : oracles::all_rotations(gaps)) {
    CHECK(rot.mean() == doctest::Approx(gaps.mean()));
  }
  BootstrapConfig cfg;
  cfg.replications = 400;
  cfg.block_length = 6;
  cfg.seed = 7;
  auto r = blocked_bootstrap(gaps, cfg);
  for (Index i = 0; i < r.replicate_atts.size(); ++i) {
    CHECK(r.replicate_atts(i) == doctest::Approx(0.0));
  }
  CHECK(r.se == doctest::Approx(0.0));
}

TEST_CASE("same seed reproduces identical results") {
  Vectord gaps(8);
  gaps << -0.5, -0.7, -0.3, -0.9, -0.6, -0.4, -0.8, -0.55;
  BootstrapConfig cfg;
  cfg.replications = 1000;
  cfg.seed = 2024;
  auto a = blocked_bootstrap(gaps, cfg);
  auto b = blocked_bootstrap(gaps, cfg);
  CHECK(a.se == b.se);
  CHECK(a.ci_lower == b.ci_lower);
  CHECK(a.ci_upper == b.ci_upper);
  CHECK(a.p_value == b.p_value);
  CHECK((a.replicate_atts - b.replicate_atts).norm() == 0.0);
}

TEST_CASE("serial and parallel replicates agree bit for bit") {
  Vectord gaps(12);
  for (Index i = 0; i < 12; ++i) gaps(i) = -0.75 + 0.1 * std::sin(double(i));
  BootstrapConfig serial;
  serial.replications = 2000;
  serial.seed = 5;
  serial.workers = 1;
  BootstrapConfig parallel = serial;
  parallel.workers = 4;
  auto a = blocked_bootstrap(gaps, serial);
  auto b = blocked_bootstrap(gaps, parallel);
  CHECK((a.replicate_atts - b.replicate_atts).norm() == 0.0);
  CHECK(a.se == b.se);
  CHECK(a.ci_lower == b.ci_lower);
  CHECK(a.ci_upper == b.ci_upper);
  CHECK(a.p_value == b.p_value);
}

TEST_CASE("default block length is ceil(sqrt(T2))") {
  Vectord gaps = Vectord::LinSpaced(12, -1.0, 1.0);
  BootstrapConfig cfg;
  cfg.replications = 10;
  cfg.seed = 1;
  auto r = blocked_bootstrap(gaps, cfg);
  CHECK(r.block_length == 4);
}

TEST_CASE("se shrinks with the gap variance") {
  BootstrapConfig cfg;
  cfg.replications = 800;
  cfg.seed = 31;
  double prev = std::numeric_limits<double>::infinity();
  for (double scale : {1.0, 0.1, 0.01, 0.0}) {
    Vectord gaps(10);
    for (Index i = 0; i < 10; ++i) {
      gaps(i) = -0.5 + scale * ((i % 2 == 0) ? 0.3 : -0.3);
    }
    auto r = blocked_bootstrap(gaps, cfg);
    CHECK(r.se <= prev + 1e-12);
    CHECK(r.ci_lower <= r.ci_upper);
    prev = r.se;
  }
  CHECK(prev == 0.0);
}

TEST_CASE("validation") {
  Vectord one = Vectord::Ones(1);
  BootstrapConfig cfg;
  CHECK_THROWS_AS(blocked_bootstrap(one, cfg), std::invalid_argument);

  Vectord gaps = Vectord::Ones(4);
  cfg.block_length = 5;
  CHECK_THROWS_AS(blocked_bootstrap(gaps, cfg), std::invalid_argument);
  cfg.block_length = 0;
  cfg.replications = 0;
  CHECK_THROWS_AS(blocked_bootstrap(gaps, cfg), std::invalid_argument);
}

TEST_CASE("empirical quantiles interpolate") {
  std::vector<double> sorted{1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_sorted(sorted, 0.0) == 1.0);
  CHECK(quantile_sorted(sorted, 1.0) == 4.0);
  CHECK(quantile_sorted(sorted, 0.5) == doctest::Approx(2.5));
}
