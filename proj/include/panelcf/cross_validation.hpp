#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "panelcf/lasso.hpp"
#include "panelcf/types.hpp"

namespace panelcf {

// Strictly increasing positive penalty values.
struct PenaltyGrid {
  std::vector<double> values;

  PenaltyGrid() = default;
  explicit PenaltyGrid(std::vector<double> v) : values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("penalty grid is empty");
    double prev = 0.0;
    for (double x : values) {
      if (!(x > prev)) {
        throw std::invalid_argument(
            "penalty grid must be strictly increasing and positive");
      }
      prev = x;
    }
  }

  std::size_t size() const { return values.size(); }
};

inline PenaltyGrid default_lasso_grid() {
  return PenaltyGrid({0.01, 0.05, 0.1, 0.2, 0.5});
}

// Contiguous half-open [begin, end) row blocks covering [0, n); remainder
// periods go to the earliest folds. T0 = 21, k = 5 gives lengths 5,4,4,4,4.
struct FoldSpec {
  Index begin = 0;
  Index end = 0;
  Index length() const { return end - begin; }
};

inline std::vector<FoldSpec> contiguous_folds(Index n, int k) {
  if (k < 1) throw std::invalid_argument("fold count must be >= 1");
  if (n < k) {
    throw std::invalid_argument("pre-period length " + std::to_string(n) +
                                " is shorter than " + std::to_string(k) +
                                " folds; use a smaller fold count");
  }
  std::vector<FoldSpec> folds(k);
  Index base = n / k;
  Index rem = n % k;
  Index pos = 0;
  for (int f = 0; f < k; ++f) {
    Index len = base + (f < rem ? 1 : 0);
    folds[f] = {pos, pos + len};
    pos += len;
  }
  return folds;
}

struct CVReport {
  PenaltyGrid grid;
  Matrixd fold_rmspe;              // k x |grid|
  std::vector<double> mean_rmspe;  // per lambda
  std::vector<FoldSpec> folds;
  double selected_lambda = 0;
  int selected_index = -1;
};

// Five-fold (by default) time-block CV for the lasso penalty: fit on the
// complement of each contiguous block, score RMSPE on the block, select the
// lambda with minimal mean RMSPE. Ties within 1e-12 go to the larger lambda.
inline CVReport cv_select_lambda(const Vectord& y_pre, const Matrixd& x_pre,
                                 const PenaltyGrid& grid, int k = 5,
                                 double tol = 1e-9, int max_sweeps = 100000) {
  const Index t0 = y_pre.size();
  CVReport report;
  report.grid = grid;
  report.folds = contiguous_folds(t0, k);
  const int m = static_cast<int>(grid.size());
  report.fold_rmspe.resize(k, m);

  for (int f = 0; f < k; ++f) {
    const FoldSpec& fold = report.folds[f];
    const Index held = fold.length();
    const Index train_n = t0 - held;
    Vectord y_train(train_n), y_test(held);
    Matrixd x_train(train_n, x_pre.cols()), x_test(held, x_pre.cols());
    Index r = 0;
    for (Index i = 0; i < t0; ++i) {
      if (i >= fold.begin && i < fold.end) continue;
      y_train(r) = y_pre(i);
      x_train.row(r) = x_pre.row(i);
      ++r;
    }
    for (Index i = 0; i < held; ++i) {
      y_test(i) = y_pre(fold.begin + i);
      x_test.row(i) = x_pre.row(fold.begin + i);
    }
    for (int g = 0; g < m; ++g) {
      auto fit = fit_lasso_weights<double>(y_train, x_train, grid.values[g],
                                           tol, max_sweeps);
      Vectord pred = (x_test * fit.weights).array() + fit.intercept;
      report.fold_rmspe(f, g) =
          std::sqrt((y_test - pred).squaredNorm() / static_cast<double>(held));
    }
  }

  report.mean_rmspe.resize(m);
  for (int g = 0; g < m; ++g) {
    report.mean_rmspe[g] = report.fold_rmspe.col(g).mean();
  }
  double lowest = *std::min_element(report.mean_rmspe.begin(), report.mean_rmspe.end());
  int best = 0;
  for (int g = 0; g < m; ++g) {
    // grid is ascending, so the last value within tolerance of the minimum
    // is the largest lambda among ties
    if (report.mean_rmspe[g] <= lowest + 1e-12) best = g;
  }
  report.selected_index = best;
  report.selected_lambda = grid.values[best];
  return report;
}

}  // namespace panelcf
