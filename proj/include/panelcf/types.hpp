#pragma once

#include <Eigen/Dense>

namespace panelcf {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrixd = Matrix<double>;
using Vectord = Vector<double>;

// Observed-cell mask, same shape as the matrix it annotates.
using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

}  // namespace panelcf
