#pragma once

#include "bloch/types.hpp"

namespace bloch {

/// max_ij |M_ij - conj(M_ji)|.
double hermiticity_defect(const CMatrix& m);

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
double hermitian_operator_norm(const CMatrix& m);

/// Spectral norm of an arbitrary matrix (largest singular value).
double operator_norm(const CMatrix& m);

}  // namespace bloch
