#pragma once

#include <numbers>

#include "bloch/lattice.hpp"
#include "bloch/operator.hpp"

namespace bloch::bench {

inline Lattice square_lattice(int d) {
  return Lattice(2.0 * std::numbers::pi * Matrix::Identity(d, d));
}

/// -Laplacian plus 2 q cos(x_1).
inline OperatorSpec mathieu_like(int d, double q) {
  OperatorSpec spec;
  spec.dimension = d;
  for (int i = 0; i < d; ++i) {
    MultiIndex alpha{IntVector(static_cast<std::size_t>(d), 0)};
    alpha.components[static_cast<std::size_t>(i)] = 2;
    spec.principal.push_back({alpha, 1.0});
  }
  IntVector plus(static_cast<std::size_t>(d), 0);
  plus[0] = 1;
  IntVector minus(static_cast<std::size_t>(d), 0);
  minus[0] = -1;
  spec.lower.push_back({MultiIndex{IntVector(static_cast<std::size_t>(d), 0)},
                        {{plus, CMatrix::Constant(1, 1, q)}, {minus, CMatrix::Constant(1, 1, q)}}});
  return spec;
}

inline Vector generic_t(int d) { return Vector::Constant(d, 0.23); }

}  // namespace bloch::bench
