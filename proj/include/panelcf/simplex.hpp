#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "panelcf/types.hpp"

namespace panelcf {

// Mean squared prediction error between two equal-length series.
template <typename Scalar>
Scalar mspe(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mspe: length mismatch");
  if (a.size() == 0) throw std::invalid_argument("mspe: empty series");
  return (a - b).squaredNorm() / static_cast<Scalar>(a.size());
}

// Euclidean projection onto the probability simplex {w >= 0, sum w = 1}.
template <typename Scalar>
Vector<Scalar> project_simplex(const Vector<Scalar>& v) {
  const Index n = v.size();
  std::vector<Scalar> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<Scalar>());
  Scalar cumsum = 0;
  Scalar tau = 0;
  Index rho = 0;
  for (Index j = 0; j < n; ++j) {
    cumsum += u[j];
    Scalar t = (cumsum - Scalar(1)) / static_cast<Scalar>(j + 1);
    if (u[j] - t > Scalar(0)) {
      rho = j + 1;
      tau = t;
    }
  }
  (void)rho;
  return (v.array() - tau).max(Scalar(0)).matrix();
}

template <typename Scalar>
struct SimplexFit {
  Vector<Scalar> weights;
  Scalar objective = 0;  // ||y - X w||^2 at the solution
  Scalar mspe = 0;       // objective / T0
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Least squares on the support under the sum-to-one equality constraint.
// Returns false when the KKT system is unusable or the solution leaves the
// simplex; `most_negative` then names the donor to drop.
template <typename Scalar>
bool equality_ls_on_support(const Vector<Scalar>& y, const Matrix<Scalar>& x,
                            const std::vector<Index>& support,
                            Vector<Scalar>& out, Index& most_negative) {
  const Index s = static_cast<Index>(support.size());
  Matrix<Scalar> xs(x.rows(), s);
  for (Index c = 0; c < s; ++c) xs.col(c) = x.col(support[c]);
  Matrix<Scalar> kkt(s + 1, s + 1);
  kkt.setZero();
  kkt.topLeftCorner(s, s) = Scalar(2) * xs.transpose() * xs;
  kkt.topRightCorner(s, 1).setOnes();
  kkt.bottomLeftCorner(1, s).setOnes();
  Vector<Scalar> rhs(s + 1);
  rhs.head(s) = Scalar(2) * xs.transpose() * y;
  rhs(s) = Scalar(1);
  Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod(kkt);
  Vector<Scalar> sol = cod.solve(rhs);
  most_negative = -1;
  if (!sol.allFinite()) return false;
  Scalar lowest = Scalar(-1e-12);
  for (Index c = 0; c < s; ++c) {
    if (sol(c) < lowest) {
      lowest = sol(c);
      most_negative = c;
    }
  }
  if (most_negative >= 0) return false;
  out.setZero(x.cols());
  for (Index c = 0; c < s; ++c) out(support[c]) = std::max(sol(c), Scalar(0));
  Scalar total = out.sum();
  if (std::abs(total - Scalar(1)) > Scalar(1e-8)) return false;
  out /= total;
  return true;
}

// Active-set polish: exact solve on the current support, dropping the most
// negative donor until the solution stays inside the simplex.
template <typename Scalar>
bool polish_on_support(const Vector<Scalar>& y, const Matrix<Scalar>& x,
                       std::vector<Index> support, Vector<Scalar>& out) {
  while (!support.empty()) {
    Index drop = -1;
    if (equality_ls_on_support(y, x, support, out, drop)) return true;
    if (drop < 0) return false;
    support.erase(support.begin() + drop);
  }
  return false;
}

}  // namespace detail

// Nonnegative, sum-to-one donor weights minimizing ||y_pre - X_pre w||^2.
// Projected gradient with the exact Lipschitz step (monotone descent) from
// the uniform start, followed by an exact least-squares refit on the active
// support when that refit stays inside the simplex.
template <typename Scalar>
SimplexFit<Scalar> fit_convex_weights(const Vector<Scalar>& y,
                                      const Matrix<Scalar>& x,
                                      Scalar tol = Scalar(1e-10),
                                      int max_iter = 10000,
                                      std::vector<Scalar>* objective_trace = nullptr) {
  const Index t0 = x.rows();
  const Index j = x.cols();
  if (t0 < 1 || j < 1) throw std::invalid_argument("fit_convex_weights: empty design");
  if (y.size() != t0) throw std::invalid_argument("fit_convex_weights: dimension mismatch");
  if (!y.allFinite() || !x.allFinite()) {
    throw std::invalid_argument("fit_convex_weights: non-finite input");
  }

  SimplexFit<Scalar> fit;
  fit.weights = Vector<Scalar>::Constant(j, Scalar(1) / static_cast<Scalar>(j));

  Matrix<Scalar> gram = x.transpose() * x;
  Vector<Scalar> xty = x.transpose() * y;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(gram);
  Scalar lip = Scalar(2) * eig.eigenvalues().maxCoeff();

  auto objective = [&](const Vector<Scalar>& w) {
    return (y - x * w).squaredNorm();
  };

  Scalar f = objective(fit.weights);
  if (objective_trace) objective_trace->push_back(f);
  if (lip <= Scalar(0)) {
    // all donor columns are zero; every simplex point is optimal
    fit.objective = f;
    fit.mspe = f / static_cast<Scalar>(t0);
    fit.converged = true;
    return fit;
  }

  const Scalar step = Scalar(1) / lip;
  for (int it = 0; it < max_iter; ++it) {
    Vector<Scalar> grad = Scalar(2) * (gram * fit.weights - xty);
    Vector<Scalar> next = project_simplex<Scalar>(fit.weights - step * grad);
    Scalar f_next = objective(next);
    if (f_next <= f) {
      fit.weights = next;
    } else {
      f_next = f;  // projection step cannot ascend with 1/L, but guard anyway
    }
    fit.iterations = it + 1;
    if (objective_trace) objective_trace->push_back(f_next);
    if (f - f_next < tol) {
      f = f_next;
      fit.converged = true;
      break;
    }
    f = f_next;
  }

  // Fully-corrective step: exact solve on the support found by the iteration.
  std::vector<Index> support;
  for (Index c = 0; c < j; ++c) {
    if (fit.weights(c) > Scalar(1e-12)) support.push_back(c);
  }
  if (!support.empty()) {
    Vector<Scalar> refined;
    if (detail::polish_on_support(y, x, support, refined)) {
      Scalar f_ref = objective(refined);
      if (f_ref <= f) {
        fit.weights = refined;
        f = f_ref;
        if (objective_trace) objective_trace->push_back(f);
      }
    }
  }

  fit.objective = f;
  fit.mspe = f / static_cast<Scalar>(t0);
  return fit;
}

// KKT certificate on the simplex: at an optimum, every donor carrying weight
// has the minimal partial derivative. Returns the largest excess over that
// minimum among active donors (0 at exact optimality).
template <typename Scalar>
Scalar simplex_kkt_gap(const Vector<Scalar>& y, const Matrix<Scalar>& x,
                       const Vector<Scalar>& w, Scalar active_tol = Scalar(1e-9)) {
  Vector<Scalar> grad = Scalar(2) * x.transpose() * (x * w - y);
  Scalar gmin = grad.minCoeff();
  Scalar gap = 0;
  for (Index c = 0; c < w.size(); ++c) {
    if (w(c) > active_tol) gap = std::max(gap, grad(c) - gmin);
  }
  return gap;
}

// synthetic[t] = intercept + sum_j w_j X[t, j]
template <typename Scalar>
Vector<Scalar> predict_counterfactual(const Vector<Scalar>& weights,
                                      Scalar intercept,
                                      const Matrix<Scalar>& x_full) {
  if (x_full.cols() != weights.size()) {
    throw std::invalid_argument("predict_counterfactual: dimension mismatch");
  }
  return (x_full * weights).array() + intercept;
}

}  // namespace panelcf
