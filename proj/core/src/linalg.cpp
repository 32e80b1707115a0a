#include "bloch/linalg.hpp"

#include "bloch/error.hpp"

namespace bloch {

double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(Errc::dimension_mismatch, "matrix is not square");
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double hermitian_operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::numerical_failure, "eigenvalue solver did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace bloch
