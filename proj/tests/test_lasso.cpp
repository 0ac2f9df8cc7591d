#include <doctest.h>

#include "oracles.hpp"
#include "panelcf/lasso.hpp"
#include "panelcf/rng.hpp"

using namespace panelcf;

namespace {

void fill_instance(Rng& rng, Vectord& y, Matrixd& x) {
  for (Index r = 0; r < x.rows(); ++r) {
    y(r) = rng.normal();
    for (Index c = 0; c < x.cols(); ++c) x(r, c) = rng.normal();
  }
}

double l1_norm(const Vectord& v) { return v.lpNorm<1>(); }

}  // namespace

TEST_CASE("full shrinkage at lambda_max") {
  Rng rng(31);
  Matrixd x(12, 5);
  Vectord y(12);
  fill_instance(rng, y, x);
  double lmax = lasso_lambda_max<double>(y, x);
  auto fit = fit_lasso_weights<double>(y, x, lmax * 1.000001);
  CHECK(fit.weights.lpNorm<1>() == 0.0);
  CHECK(fit.intercept == doctest::Approx(y.mean()));

  // just below lambda_max something activates
  auto below = fit_lasso_weights<double>(y, x, lmax * 0.99);
  CHECK(below.weights_std.lpNorm<1>() > 0.0);
}

TEST_CASE("lambda zero equals least squares") {
  Rng rng(47);
  Matrixd x(20, 4);
  Vectord y(20);
  fill_instance(rng, y, x);
  auto fit = fit_lasso_weights<double>(y, x, 0.0, 1e-12);
  auto [alpha, beta] = oracles::normal_equations_with_intercept(y, x);
  CHECK((fit.weights - beta).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK(fit.intercept == doctest::Approx(alpha).epsilon(1e-6));
}

TEST_CASE("single donor closed form") {
  Rng rng(53);
  Vectord x(15), y(15);
  for (Index i = 0; i < 15; ++i) {
    x(i) = rng.normal();
    y(i) = 0.8 * x(i) + 0.1 * rng.normal();
  }
  Matrixd xm(15, 1);
  xm.col(0) = x;
  for (double lambda : {0.01, 0.1, 0.5, 2.0}) {
    auto fit = fit_lasso_weights<double>(y, xm, lambda);
    double expected = oracles::univariate_soft_threshold_weight(y, x, lambda);
    CHECK(fit.weights_std(0) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("subgradient conditions hold at the solution") {
  Rng rng(59);
  const double grid[] = {0.01, 0.05, 0.1, 0.2, 0.5};
  for (int inst = 0; inst < 10; ++inst) {
    Matrixd x(18, 7);
    Vectord y(18);
    fill_instance(rng, y, x);
    for (double lambda : grid) {
      auto fit = fit_lasso_weights<double>(y, x, lambda);
      CHECK(lasso_kkt_violation<double>(y, x, fit, lambda) < 1e-8);
    }
  }
}

TEST_CASE("solution path shrinks in lambda") {
  Rng rng(61);
  Matrixd x(16, 6);
  Vectord y(16);
  fill_instance(rng, y, x);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    auto fit = fit_lasso_weights<double>(y, x, lambda);
    double norm = l1_norm(fit.weights_std);
    CHECK(norm <= prev + 1e-9);
    prev = norm;
  }
}

TEST_CASE("zero-variance donor is dropped with zero weight") {
  Rng rng(67);
  Matrixd x(10, 3);
  Vectord y(10);
  fill_instance(rng, y, x);
  x.col(1).setConstant(42.0);
  auto fit = fit_lasso_weights<double>(y, x, 0.05);
  CHECK(fit.weights(1) == 0.0);
  REQUIRE(fit.dropped_columns.size() == 1);
  CHECK(fit.dropped_columns[0] == 1);
}

TEST_CASE("anti-correlated donor earns a negative weight") {
  Rng rng(71);
  Vectord base(14);
  for (Index i = 0; i < 14; ++i) base(i) = rng.normal();
  Matrixd x(14, 2);
  x.col(0) = -base;  // inverse co-movement
  for (Index i = 0; i < 14; ++i) x(i, 1) = 0.1 * rng.normal();
  Vectord y = base;
  auto fit = fit_lasso_weights<double>(y, x, 0.01);
  CHECK(fit.weights(0) < 0.0);
}

TEST_CASE("input validation") {
  Matrixd x(1, 2);
  Vectord y(1);
  CHECK_THROWS_AS(fit_lasso_weights<double>(y, x, 0.1), std::invalid_argument);

  Matrixd x2(4, 2);
  x2.setOnes();
  Vectord y2(4);
  y2 << 1, 2, std::numeric_limits<double>::infinity(), 4;
  CHECK_THROWS_AS(fit_lasso_weights<double>(y2, x2, 0.1), std::invalid_argument);
  y2(2) = 3;
  CHECK_THROWS_AS(fit_lasso_weights<double>(y2, x2, -0.1), std::invalid_argument);
}
