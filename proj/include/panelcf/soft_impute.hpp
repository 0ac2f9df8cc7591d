#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "panelcf/cross_validation.hpp"
#include "panelcf/types.hpp"

namespace panelcf {

enum class FeMode { none, two_way };

template <typename Scalar>
struct CompletionFit {
  Matrix<Scalar> low_rank;      // L
  Vector<Scalar> unit_effects;  // a, length N (zero when fe none)
  Vector<Scalar> time_effects;  // b, length T
  Matrix<Scalar> completed;     // L_it + a_i + b_t
  Scalar objective = 0;  // (1/|O|) sum_O (Y - completed)^2 + lambda ||L||_*
  Scalar nuclear_norm = 0;
  int rank = 0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

template <typename Scalar>
void check_mask(const Matrix<Scalar>& y, const MaskArray& omega) {
  if (omega.rows() != y.rows() || omega.cols() != y.cols()) {
    throw std::invalid_argument("soft_impute: mask shape mismatch");
  }
  for (Index i = 0; i < omega.rows(); ++i) {
    if (!omega.row(i).any()) {
      throw std::invalid_argument("soft_impute: row " + std::to_string(i) +
                                  " has no observed cells");
    }
  }
  for (Index j = 0; j < omega.cols(); ++j) {
    if (!omega.col(j).any()) {
      throw std::invalid_argument("soft_impute: column " + std::to_string(j) +
                                  " has no observed cells");
    }
  }
}

// One alternating pass of exact coordinate updates for the two-way effects;
// each update is the observed-cell mean of the current residual.
template <typename Scalar>
void update_fixed_effects(const Matrix<Scalar>& y, const MaskArray& omega,
                          const Matrix<Scalar>& low_rank, Vector<Scalar>& a,
                          Vector<Scalar>& b) {
  const Index n = y.rows(), t = y.cols();
  for (Index i = 0; i < n; ++i) {
    Scalar sum = 0;
    Index cnt = 0;
    for (Index j = 0; j < t; ++j) {
      if (!omega(i, j)) continue;
      sum += y(i, j) - low_rank(i, j) - b(j);
      ++cnt;
    }
    a(i) = sum / static_cast<Scalar>(cnt);
  }
  for (Index j = 0; j < t; ++j) {
    Scalar sum = 0;
    Index cnt = 0;
    for (Index i = 0; i < n; ++i) {
      if (!omega(i, j)) continue;
      sum += y(i, j) - low_rank(i, j) - a(i);
      ++cnt;
    }
    b(j) = sum / static_cast<Scalar>(cnt);
  }
}

template <typename Scalar>
Matrix<Scalar> fitted_matrix(const Matrix<Scalar>& low_rank,
                             const Vector<Scalar>& a, const Vector<Scalar>& b) {
  Matrix<Scalar> f = low_rank;
  f.colwise() += a;
  f.rowwise() += b.transpose();
  return f;
}

}  // namespace detail

// Nuclear-norm-penalized completion with optional two-way fixed effects:
// iterated singular-value soft-thresholding on the filled residual matrix,
// alternated with exact fixed-effect updates. Stops when the relative
// Frobenius change of the fitted matrix drops below tol.
template <typename Scalar>
CompletionFit<Scalar> soft_impute(const Matrix<Scalar>& y, const MaskArray& omega,
                                  FeMode fe, Scalar lambda,
                                  Scalar tol = Scalar(1e-6), int max_iter = 500,
                                  const CompletionFit<Scalar>* warm = nullptr,
                                  std::vector<Scalar>* objective_trace = nullptr) {
  if (lambda < Scalar(0)) throw std::invalid_argument("soft_impute: negative lambda");
  detail::check_mask(y, omega);
  const Index n = y.rows(), t = y.cols();
  const Scalar nobs = static_cast<Scalar>(omega.count());
  const Scalar threshold = lambda * nobs / Scalar(2);

  CompletionFit<Scalar> fit;
  fit.low_rank = Matrix<Scalar>::Zero(n, t);
  fit.unit_effects = Vector<Scalar>::Zero(n);
  fit.time_effects = Vector<Scalar>::Zero(t);

  if (warm != nullptr && warm->low_rank.rows() == n && warm->low_rank.cols() == t) {
    fit.low_rank = warm->low_rank;
    fit.unit_effects = warm->unit_effects;
    fit.time_effects = warm->time_effects;
  } else if (fe == FeMode::two_way) {
    // converge the fixed-effects-only fit before any thresholding, so that
    // lambda >= lambda_max is an exact fixed point with L = 0
    for (int pass = 0; pass < 200; ++pass) {
      Vector<Scalar> a_prev = fit.unit_effects;
      Vector<Scalar> b_prev = fit.time_effects;
      detail::update_fixed_effects(y, omega, fit.low_rank, fit.unit_effects,
                                   fit.time_effects);
      Scalar move = (fit.unit_effects - a_prev).template lpNorm<Eigen::Infinity>() +
                    (fit.time_effects - b_prev).template lpNorm<Eigen::Infinity>();
      if (move < Scalar(1e-12)) break;
    }
  }

  Matrix<Scalar> fitted = detail::fitted_matrix(fit.low_rank, fit.unit_effects,
                                                fit.time_effects);
  Vector<Scalar> shrunk;

  for (int it = 0; it < max_iter; ++it) {
    if (fe == FeMode::two_way) {
      detail::update_fixed_effects(y, omega, fit.low_rank, fit.unit_effects,
                                   fit.time_effects);
    }
    // fill: observed cells carry the fixed-effect residual, missing cells
    // carry the current low-rank estimate
    Matrix<Scalar> z(n, t);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < t; ++j) {
        z(i, j) = omega(i, j)
                      ? y(i, j) - fit.unit_effects(i) - fit.time_effects(j)
                      : fit.low_rank(i, j);
      }
    }
    Eigen::JacobiSVD<Matrix<Scalar>> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    shrunk = (svd.singularValues().array() - threshold).max(Scalar(0)).matrix();
    fit.low_rank = svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();

    Matrix<Scalar> fitted_next = detail::fitted_matrix(
        fit.low_rank, fit.unit_effects, fit.time_effects);
    if (objective_trace) {
      Scalar sse = 0;
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < t; ++j) {
          if (!omega(i, j)) continue;
          Scalar r = y(i, j) - fitted_next(i, j);
          sse += r * r;
        }
      }
      objective_trace->push_back(sse / nobs + lambda * shrunk.sum());
    }
    Scalar denom = std::max(fitted.norm(), Scalar(1e-12));
    Scalar delta = (fitted_next - fitted).norm() / denom;
    fitted = std::move(fitted_next);
    fit.iterations = it + 1;
    if (delta < tol) {
      fit.converged = true;
      break;
    }
  }

  fit.completed = fitted;
  fit.nuclear_norm = shrunk.size() > 0 ? shrunk.sum() : Scalar(0);
  Scalar top = shrunk.size() > 0 ? shrunk.maxCoeff() : Scalar(0);
  if (top > Scalar(0)) {
    fit.rank = static_cast<int>(
        (shrunk.array() > Scalar(1e-9) * std::max(top, Scalar(1))).count());
  }
  Scalar sse = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < t; ++j) {
      if (!omega(i, j)) continue;
      Scalar r = y(i, j) - fitted(i, j);
      sse += r * r;
    }
  }
  fit.objective = sse / nobs + lambda * fit.nuclear_norm;
  return fit;
}

// Smallest penalty driving L to zero: 2 sigma_1 / |O| of the fixed-effect
// residualized observed matrix (zeros at unobserved cells).
template <typename Scalar>
Scalar completion_lambda_max(const Matrix<Scalar>& y, const MaskArray& omega,
                             FeMode fe) {
  detail::check_mask(y, omega);
  const Index n = y.rows(), t = y.cols();
  Vector<Scalar> a = Vector<Scalar>::Zero(n);
  Vector<Scalar> b = Vector<Scalar>::Zero(t);
  Matrix<Scalar> zero_l = Matrix<Scalar>::Zero(n, t);
  if (fe == FeMode::two_way) {
    for (int pass = 0; pass < 200; ++pass) {
      Vector<Scalar> a_prev = a, b_prev = b;
      detail::update_fixed_effects(y, omega, zero_l, a, b);
      Scalar move = (a - a_prev).template lpNorm<Eigen::Infinity>() +
                    (b - b_prev).template lpNorm<Eigen::Infinity>();
      if (move < Scalar(1e-12)) break;
    }
  }
  Matrix<Scalar> residual = Matrix<Scalar>::Zero(n, t);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < t; ++j) {
      if (omega(i, j)) residual(i, j) = y(i, j) - a(i) - b(j);
    }
  }
  Eigen::JacobiSVD<Matrix<Scalar>> svd(residual);
  Scalar sigma1 = svd.singularValues()(0);
  return Scalar(2) * sigma1 / static_cast<Scalar>(omega.count());
}

// Warm-started completion along a descending penalty path ending at
// `lambda`. Cold starts at a small penalty converge arithmetically slowly
// (each sweep moves a masked cell by roughly the threshold), so production
// fits walk down from lambda_max instead.
template <typename Scalar>
CompletionFit<Scalar> soft_impute_path(const Matrix<Scalar>& y,
                                       const MaskArray& omega, FeMode fe,
                                       Scalar lambda, Scalar tol = Scalar(1e-6),
                                       int max_iter = 500, int path_steps = 15) {
  Scalar lmax = completion_lambda_max<Scalar>(y, omega, fe);
  if (lambda >= lmax || path_steps < 2) {
    return soft_impute<Scalar>(y, omega, fe, lambda, tol, max_iter);
  }
  Scalar floor_lambda = std::max(lambda, Scalar(1e-300));
  Scalar log_hi = std::log(lmax);
  Scalar log_lo = std::log(floor_lambda);
  CompletionFit<Scalar> fit;
  bool warm = false;
  for (int s = 0; s < path_steps; ++s) {
    Scalar f = static_cast<Scalar>(s) / static_cast<Scalar>(path_steps - 1);
    Scalar step_lambda = std::exp(log_hi + f * (log_lo - log_hi));
    if (s == path_steps - 1) step_lambda = lambda;
    fit = soft_impute<Scalar>(y, omega, fe, step_lambda, tol, max_iter,
                              warm ? &fit : nullptr);
    warm = true;
  }
  return fit;
}

// Log-spaced ascending grid spanning four decades below lambda_max.
inline PenaltyGrid build_completion_grid(const Matrixd& y, const MaskArray& omega,
                                         FeMode fe, int n_points = 20) {
  if (n_points < 1) throw std::invalid_argument("grid needs at least one point");
  double lmax = completion_lambda_max<double>(y, omega, fe);
  if (!(lmax > 0)) {
    throw std::invalid_argument(
        "penalty grid is degenerate: residualized matrix is zero");
  }
  std::vector<double> values(n_points);
  if (n_points == 1) {
    values[0] = lmax;
  } else {
    double log_max = std::log(lmax);
    double log_min = log_max + std::log(1e-4);
    for (int i = 0; i < n_points; ++i) {
      double f = static_cast<double>(i) / static_cast<double>(n_points - 1);
      values[i] = std::exp(log_min + f * (log_max - log_min));
    }
    values.back() = lmax;
  }
  return PenaltyGrid(values);
}

enum class CvMaskMode { treated_row, donor_rows };

// Median split of an ascending grid (odd grids put the median value in the
// lower half) with an argmin per half; ties go to the larger lambda.
inline std::pair<int, int> pick_regime_indices(const std::vector<double>& cv_rmse) {
  const int m = static_cast<int>(cv_rmse.size());
  if (m < 1) throw std::invalid_argument("empty CV curve");
  const int lower_size = (m + 1) / 2;
  auto argmin_in = [&](int begin, int end) {
    double lowest = cv_rmse[begin];
    for (int g = begin; g < end; ++g) lowest = std::min(lowest, cv_rmse[g]);
    int best = begin;
    for (int g = begin; g < end; ++g) {
      if (cv_rmse[g] <= lowest + 1e-12) best = g;
    }
    return best;
  };
  int low = argmin_in(0, lower_size);
  int high = lower_size < m ? argmin_in(lower_size, m) : low;
  return {low, high};
}

struct ShrinkageRegimes {
  PenaltyGrid grid;
  Matrixd fold_rmse;            // k x |grid|
  std::vector<double> cv_rmse;  // mean per lambda
  std::vector<FoldSpec> folds;  // over pre-period columns
  double lambda_low = 0, lambda_high = 0;
  int low_index = -1, high_index = -1;
};

// Blocked CV in the time dimension: within each contiguous pre-period block,
// the held-out cells (treated row by default) are masked, the matrix is
// completed along the descending penalty path with warm starts, and the
// block is scored by RMSE. The grid is split at its median (odd grids put
// the median value in the lower half) and each half keeps its argmin.
inline ShrinkageRegimes select_completion_regimes(
    const Matrixd& y, const MaskArray& omega, FeMode fe, Index treated_row,
    Index t0, const PenaltyGrid& grid, int k = 5,
    CvMaskMode mode = CvMaskMode::treated_row, double tol = 1e-6,
    int max_iter = 500) {
  ShrinkageRegimes regimes;
  regimes.grid = grid;
  regimes.folds = contiguous_folds(t0, k);
  const int m = static_cast<int>(grid.size());
  regimes.fold_rmse.resize(k, m);

  for (int f = 0; f < k; ++f) {
    const FoldSpec& fold = regimes.folds[f];
    MaskArray omega_cv = omega;
    std::vector<std::pair<Index, Index>> held;
    for (Index j = fold.begin; j < fold.end; ++j) {
      if (mode == CvMaskMode::treated_row) {
        if (omega(treated_row, j)) {
          omega_cv(treated_row, j) = false;
          held.emplace_back(treated_row, j);
        }
      } else {
        for (Index i = 0; i < y.rows(); ++i) {
          if (i == treated_row || !omega(i, j)) continue;
          omega_cv(i, j) = false;
          held.emplace_back(i, j);
        }
      }
    }
    CompletionFit<double> warm;
    bool have_warm = false;
    for (int g = m - 1; g >= 0; --g) {
      warm = soft_impute<double>(y, omega_cv, fe, grid.values[g], tol, max_iter,
                                 have_warm ? &warm : nullptr);
      have_warm = true;
      double sse = 0;
      for (const auto& [i, j] : held) {
        double r = y(i, j) - warm.completed(i, j);
        sse += r * r;
      }
      regimes.fold_rmse(f, g) = std::sqrt(sse / static_cast<double>(held.size()));
    }
  }

  regimes.cv_rmse.resize(m);
  for (int g = 0; g < m; ++g) regimes.cv_rmse[g] = regimes.fold_rmse.col(g).mean();

  auto [low, high] = pick_regime_indices(regimes.cv_rmse);
  regimes.low_index = low;
  regimes.high_index = high;
  regimes.lambda_low = grid.values[regimes.low_index];
  regimes.lambda_high = grid.values[regimes.high_index];
  return regimes;
}

}  // namespace panelcf
