#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "panelcf/types.hpp"

namespace panelcf {

template <typename Scalar>
Scalar soft_threshold(Scalar z, Scalar gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return Scalar(0);
}

template <typename Scalar>
struct LassoFit {
  Vector<Scalar> weights;      // original units
  Scalar intercept = 0;
  Vector<Scalar> weights_std;  // standardized design, for optimality checks
  std::vector<Index> dropped_columns;  // zero-variance donors, weight forced to 0
  int sweeps = 0;
  bool converged = false;
};

namespace detail {

template <typename Scalar>
struct Standardized {
  Matrix<Scalar> x;       // centered, unit 1/n variance columns
  Vector<Scalar> y;       // centered
  Vector<Scalar> mean;    // per column
  Vector<Scalar> scale;   // per column; 1 for dropped columns
  Scalar y_mean = 0;
  std::vector<bool> keep; // false for zero-variance columns
};

// Centers and rescales to unit 1/n variance so the coordinate update is the
// plain soft threshold and a shared penalty grid is comparable across
// outcomes of different scale.
template <typename Scalar>
Standardized<Scalar> standardize(const Vector<Scalar>& y, const Matrix<Scalar>& x) {
  const Index n = x.rows();
  const Index p = x.cols();
  Standardized<Scalar> s;
  s.mean.resize(p);
  s.scale.resize(p);
  s.keep.assign(p, true);
  s.x.resize(n, p);
  for (Index j = 0; j < p; ++j) {
    s.mean(j) = x.col(j).mean();
    Vector<Scalar> centered = x.col(j).array() - s.mean(j);
    Scalar sd = std::sqrt(centered.squaredNorm() / static_cast<Scalar>(n));
    if (!(sd > Scalar(1e-12))) {
      s.keep[j] = false;
      s.scale(j) = Scalar(1);
      s.x.col(j).setZero();
    } else {
      s.scale(j) = sd;
      s.x.col(j) = centered / sd;
    }
  }
  s.y_mean = y.mean();
  s.y = y.array() - s.y_mean;
  return s;
}

}  // namespace detail

// Smallest penalty at which every coefficient is zero.
template <typename Scalar>
Scalar lasso_lambda_max(const Vector<Scalar>& y, const Matrix<Scalar>& x) {
  auto s = detail::standardize(y, x);
  const Scalar n = static_cast<Scalar>(x.rows());
  return (s.x.transpose() * s.y).cwiseAbs().maxCoeff() / n;
}

// Minimizes (1/(2 T0)) ||y - a - X w||^2 + lambda ||w||_1 in the standardized
// design by cyclic coordinate descent; coefficients are reported in original
// units with an unpenalized intercept.
template <typename Scalar>
LassoFit<Scalar> fit_lasso_weights(const Vector<Scalar>& y, const Matrix<Scalar>& x,
                                   Scalar lambda, Scalar tol = Scalar(1e-9),
                                   int max_sweeps = 100000) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (n < 2) throw std::invalid_argument("fit_lasso_weights: need T0 >= 2");
  if (y.size() != n) throw std::invalid_argument("fit_lasso_weights: dimension mismatch");
  if (lambda < Scalar(0)) throw std::invalid_argument("fit_lasso_weights: negative lambda");
  if (!y.allFinite() || !x.allFinite()) {
    throw std::invalid_argument("fit_lasso_weights: non-finite input");
  }

  auto s = detail::standardize(y, x);
  const Scalar nn = static_cast<Scalar>(n);

  LassoFit<Scalar> fit;
  fit.weights_std = Vector<Scalar>::Zero(p);
  Vector<Scalar> residual = s.y;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Scalar max_change = 0;
    for (Index j = 0; j < p; ++j) {
      if (!s.keep[j]) continue;
      Scalar old = fit.weights_std(j);
      // columns have unit 1/n variance, so the update is one soft threshold
      Scalar rho = s.x.col(j).dot(residual) / nn + old;
      Scalar next = soft_threshold(rho, lambda);
      if (next != old) {
        residual -= (next - old) * s.x.col(j);
        fit.weights_std(j) = next;
        max_change = std::max(max_change, std::abs(next - old));
      }
    }
    fit.sweeps = sweep + 1;
    if (max_change < tol) {
      fit.converged = true;
      break;
    }
  }

  fit.weights.resize(p);
  Scalar offset = 0;
  for (Index j = 0; j < p; ++j) {
    if (!s.keep[j]) {
      fit.weights(j) = Scalar(0);
      fit.dropped_columns.push_back(j);
      continue;
    }
    fit.weights(j) = fit.weights_std(j) / s.scale(j);
    offset += fit.weights(j) * s.mean(j);
  }
  fit.intercept = s.y_mean - offset;
  return fit;
}

// Largest violation of the subgradient conditions at the returned solution,
// measured in the standardized design.
template <typename Scalar>
Scalar lasso_kkt_violation(const Vector<Scalar>& y, const Matrix<Scalar>& x,
                           const LassoFit<Scalar>& fit, Scalar lambda) {
  auto s = detail::standardize(y, x);
  const Scalar nn = static_cast<Scalar>(x.rows());
  Vector<Scalar> residual = s.y - s.x * fit.weights_std;
  Scalar worst = 0;
  for (Index j = 0; j < x.cols(); ++j) {
    if (!s.keep[j]) continue;
    Scalar g = s.x.col(j).dot(residual) / nn;
    Scalar w = fit.weights_std(j);
    if (w == Scalar(0)) {
      worst = std::max(worst, std::abs(g) - lambda);
    } else {
      Scalar sign = w > Scalar(0) ? Scalar(1) : Scalar(-1);
      worst = std::max(worst, std::abs(g - sign * lambda));
    }
  }
  return std::max(worst, Scalar(0));
}

}  // namespace panelcf
