#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bloch/lattice.hpp"
#include "bloch/operator.hpp"
#include "bloch/types.hpp"

namespace bloch {

struct EllipticityReport {
  /// min over unit xi of sum_{|a|=2s} q_a xi^a.
  double c2 = 0.0;
  Vector min_direction;
  int samples = 0;
  bool pass = false;
};

inline constexpr double kEllipticityFloor = 1e-10;

/// Minimizes the homogeneous principal symbol on the unit sphere over a
/// deterministic sample followed by pattern-search refinement.
/// Throws Error(degenerate_symbol) if every q_a is zero.
EllipticityReport check_ellipticity(const OperatorSpec& spec, int n_samples = 4096);

struct LowerOrderBound {
  /// sum_a sum_gamma ||Qhat_a(gamma)||, a bound for sum_a sup_x ||Q_a(x)||.
  double c1 = 0.0;
  /// sup_gamma ||b(gamma)||.
  double multiplier_bound = 0.0;
};

LowerOrderBound bound_lower_order(const OperatorSpec& spec);

/// Inputs of the scalar inequality
///   c2 r^{2s} + c > sqrt(c3) (c1 + eps) sum_{k<2s} n_k r^k,
/// n_k the number of multi-indices of order k in d variables.
struct CoercivityInputs {
  int dimension = 1;
  int order_s = 1;
  double c1 = 0.0;
  double c2 = 1.0;
  double epsilon = 0.1;
};

struct CoercivityReport {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double epsilon = 0.0;
  /// Beyond this radius the principal term alone dominates.
  double c4 = 0.0;
  /// Shift constant: covers every lattice point and every radius in [0, c4].
  double c = 0.0;
  /// max over enumerated gamma of the deficit, plus margin.
  double c_lattice = 0.0;
  /// sup over r in [0, c4] of the deficit.
  double radial_sup = 0.0;
  double verified_range = 0.0;
  std::size_t lattice_points_checked = 0;
  bool symbol_certified = false;
  int dimension = 1;
  int order_s = 1;
};

inline constexpr double kCoercivityMargin = 1e-6;
inline constexpr double kDefaultEpsilon = 0.1;
inline constexpr double kDefaultEnumerationCap = 1e3;

/// sum_{k<2s} n_k r^k.
double lower_order_weight(int dimension, int order_s, double r);

/// Number of multi-indices of order at most 2s - 1.
double cauchy_schwarz_count(int dimension, int order_s);

/// Throws Error(insufficient_enumeration) when enumeration_cap < c4.
CoercivityReport coercivity_shift(const CoercivityInputs& inputs, const Lattice& lattice,
                                  double enumeration_cap = kDefaultEnumerationCap);

/// Runs the ellipticity check and the lower-order bound, then coercivity_shift.
/// Throws Error(degenerate_symbol) when ellipticity fails.
CoercivityReport compute_coercivity_shift(const OperatorSpec& spec, const Lattice& lattice,
                                          double epsilon = kDefaultEpsilon,
                                          double enumeration_cap = kDefaultEnumerationCap);

struct RelativeBoundWitness {
  Vector t;
  CVector u;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct RelativeBoundReport {
  double c5 = 0.0;
  double c6 = 0.0;
  double multiplier_bound = 0.0;
  /// c5 / c6 + 1/2 from the self-adjoint resolvent bounds.
  double condition_value = 0.0;
  /// The same expression with the resolvent norms of the truncation.
  double condition_value_truncated = 0.0;
  std::size_t battery_size = 0;
  /// min over the battery of c5 ||u|| + ||Lu + cu|| / 2 - ||Pu + Bu||.
  double battery_margin = 0.0;
  bool battery_pass = false;
  /// min over the battery of ||Lu + cu|| - (c1 + eps) sum_a ||D_a u||.
  double chain_margin = 0.0;
  bool chain_pass = false;
  /// min over trial t of the smallest eigenvalue of M(t) + c.
  double min_shifted_eigenvalue = 0.0;
  bool below_bounded = false;
  bool pass = false;
  std::optional<RelativeBoundWitness> witness;
};

inline constexpr std::uint64_t kDefaultSeed = 20240607;

/// Certifies ||Pu + Bu|| <= c5 ||u|| + ||Lu + cu|| / 2 on a deterministic
/// battery of trial vectors at every trial t and evaluates the compact
/// resolvent condition with mu = i c6, c6 = 2 c5 + 1.
RelativeBoundReport check_relative_bound(const OperatorSpec& spec, const Lattice& lattice,
                                         const CoercivityReport& coercivity, double cutoff,
                                         std::span<const Vector> trial_ts,
                                         std::uint64_t seed = kDefaultSeed);

}  // namespace bloch
