#pragma once

#include <Eigen/Dense>

namespace spectrasort {

// Spectra are stored one per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace spectrasort
