#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bloch/lattice.hpp"
#include "bloch/operator.hpp"
#include "bloch/problem.hpp"
#include "bloch/types.hpp"

namespace bloch::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::string spec_path(const std::string& name) {
  return std::string(BLOCH_SPEC_DIR) + "/" + name;
}

inline std::string data_path(const std::string& name) {
  return std::string(BLOCH_TEST_DATA_DIR) + "/" + name;
}

/// Omega = 2 pi Z^d, so Gamma = Z^d and F* = [-1/2, 1/2)^d.
inline Lattice square_lattice(int d) { return Lattice(kTwoPi * Matrix::Identity(d, d)); }

inline CMatrix scalar(Complex v) { return CMatrix::Constant(1, 1, v); }

/// -Laplacian in d dimensions.
inline OperatorSpec free_spec(int d) {
  OperatorSpec spec;
  spec.dimension = d;
  for (int i = 0; i < d; ++i) {
    MultiIndex alpha{IntVector(static_cast<std::size_t>(d), 0)};
    alpha.components[static_cast<std::size_t>(i)] = 2;
    spec.principal.push_back({alpha, 1.0});
  }
  return spec;
}

/// -u'' + 2 q cos(x) u.
inline OperatorSpec mathieu_spec(double q) {
  OperatorSpec spec = free_spec(1);
  spec.lower.push_back({MultiIndex{{0}}, {{{1}, scalar(q)}, {{-1}, scalar(q)}}});
  return spec;
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> normal;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  }
  return scale * 0.5 * (a + a.adjoint());
}

inline CVector random_unit(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  CVector u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = Complex(normal(rng), normal(rng));
  return u.normalized();
}

/// Characteristic values of Mathieu's equation y'' + (a - 2 Q cos 2z) y = 0,
/// scaled to this operator's eigenvalues (lambda = a / 4 with Q = 4 q).
struct MathieuReference {
  double a0, b1, a1, b2, a2;
};
inline constexpr MathieuReference kMathieuQ1{-1.0701297045756306, -1.0647957251402358,
                                             0.57950204252663107, 0.68672025679816451,
                                             1.7072687086415974};
inline constexpr MathieuReference kMathieuQ01{-0.019662321949372227, 0.14524515179302877,
                                              0.34474668424041305, 0.99666897777254138,
                                              1.0163257499549447};

}  // namespace bloch::testing
