#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace bloch {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Integer coordinates of a dual-lattice point in the dual basis.
using IntVector = std::vector<int>;

}  // namespace bloch
