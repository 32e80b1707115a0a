#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bloch/lattice.hpp"
#include "bloch/types.hpp"

namespace bloch {

/// One Fourier mode of a periodic m x m coefficient: Q(x) contains
/// matrix * exp(i <gamma, x>) with gamma given in dual-basis coordinates.
struct FourierCoefficient {
  IntVector frequency;
  CMatrix matrix;
};

struct PrincipalTerm {
  MultiIndex alpha;
  double q = 0.0;
};

struct LowerOrderTerm {
  MultiIndex alpha;
  std::vector<FourierCoefficient> coefficients;
};

/// Differential expression
///   T u = sum_{|a|=2s} q_a I_m D_a u + sum_{|a|<=2s-1} Q_a(x) D_a u + B u
/// with D_a = (-i d/dx)^a, Q_a given as finite Fourier series and B a
/// Fourier multiplier gamma -> b(gamma).
struct OperatorSpec {
  int dimension = 1;
  int components = 1;
  int order_s = 1;
  std::vector<PrincipalTerm> principal;
  std::vector<LowerOrderTerm> lower;
  /// b(gamma); modes not listed are zero.
  std::vector<FourierCoefficient> multiplier;

  /// Shape and order checks. Self-adjointness is checked at assembly time.
  void validate() const;
};

/// sum_{|a|=2s} q_a xi^a.
double principal_symbol(const OperatorSpec& spec, const Vector& xi);

/// Matrix of T_t in the plane-wave basis exp(i <gamma + t, x>) e_k, |gamma| <= cutoff.
/// Flat index of (point p, component k) is p * components + k.
struct TruncatedOperator {
  Vector t;
  double cutoff = 0.0;
  int components = 1;
  std::vector<DualPoint> points;
  CMatrix matrix;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  [[nodiscard]] std::optional<std::size_t> find_point(const IntVector& coords) const;
  [[nodiscard]] const DualPoint& point_of(std::size_t flat) const {
    return points[flat / static_cast<std::size_t>(components)];
  }
  [[nodiscard]] int component_of(std::size_t flat) const {
    return static_cast<int>(flat % static_cast<std::size_t>(components));
  }
};

/// The three pieces of the fiber operator on a fixed basis: the principal
/// part L_t (diagonal), the lower-order part P_t and the multiplier B.
struct OperatorParts {
  Vector principal;
  CMatrix lower;
  CMatrix multiplier;

  [[nodiscard]] CMatrix differential() const;
  [[nodiscard]] CMatrix total() const;
};

OperatorParts assemble_parts(const OperatorSpec& spec, const Lattice& lattice, const Vector& t,
                             std::span<const DualPoint> points);

/// Throws Error(non_self_adjoint) when the assembled matrix is not Hermitian
/// within 1e-10.
TruncatedOperator assemble(const OperatorSpec& spec, const Lattice& lattice, const Vector& t,
                           double cutoff);

inline constexpr double kHermiticityTolerance = 1e-10;

struct SelfAdjointnessReport {
  double max_defect = 0.0;
  Vector worst_t;
  bool pass = false;
};

SelfAdjointnessReport check_self_adjointness(const OperatorSpec& spec, const Lattice& lattice,
                                             std::span<const Vector> trial_ts, double cutoff);

/// || A_{t0+shift} S u - S A_{t0} u || where S relabels coefficients by the
/// dual-lattice shift ((S u)_gamma = u_{gamma + shift}) and A is the
/// differential part L + P. The multiplier is excluded: it is removed from the
/// shifted family A_t = T_t + c - B. The product is exact, not truncated.
/// Throws Error(unsupported_shift) when the support of u is closer than |shift|
/// to the cutoff sphere.
double verify_modulation_identity(const OperatorSpec& spec, const Lattice& lattice,
                                  const Vector& t0, const IntVector& shift, const CVector& u,
                                  double cutoff);

/// max over pairs of ||M(t) - M(t')|| / |t - t'|; coincident pairs are skipped.
double operator_lipschitz_constant(const OperatorSpec& spec, const Lattice& lattice,
                                   std::span<const std::pair<Vector, Vector>> pairs,
                                   double cutoff);

}  // namespace bloch
