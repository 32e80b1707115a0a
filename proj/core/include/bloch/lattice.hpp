#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bloch/types.hpp"

namespace bloch {

/// A Bravais lattice Omega in R^d together with its dual lattice Gamma.
///
/// Rows of basis() are the primal generators a_j; rows of dual_basis() are the
/// dual generators b_i with <b_i, a_j> = 2 pi delta_ij.
class Lattice {
 public:
  /// Throws Error(degenerate_lattice) when the generators are linearly dependent.
  explicit Lattice(const Matrix& generators);

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(basis_.rows()); }
  [[nodiscard]] const Matrix& basis() const noexcept { return basis_; }
  [[nodiscard]] const Matrix& dual_basis() const noexcept { return dual_; }
  [[nodiscard]] double cell_volume() const noexcept { return volume_; }

  /// Cartesian vector sum_i n_i b_i.
  [[nodiscard]] Vector dual_point(std::span<const int> coords) const;

  /// Coordinates c of t in the dual basis, t = sum_i c_i b_i.
  [[nodiscard]] Vector dual_coordinates(const Vector& t) const;

 private:
  Matrix basis_;
  Matrix dual_;
  double volume_ = 0.0;
};

Lattice build_lattice(const Matrix& generators);

/// A point of the dual lattice, kept both in integer and Cartesian form.
struct DualPoint {
  IntVector coords;
  Vector cartesian;
};

/// All gamma in Gamma with |gamma| <= cutoff, ordered lexicographically on the
/// integer coordinates (first coordinate most significant).
std::vector<DualPoint> enumerate_dual_points(const Lattice& lattice, double cutoff);

/// Reduces t into the centred half-open cell { sum c_i b_i : c_i in [-1/2, 1/2) }.
/// A point already inside the cell is returned unchanged, bit for bit.
Vector reduce_to_fundamental(const Lattice& lattice, const Vector& t);

struct MultiIndex {
  IntVector components;

  [[nodiscard]] int order() const noexcept;
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(components.size()); }

  auto operator<=>(const MultiIndex&) const = default;
};

/// xi^alpha = xi_1^alpha_1 ... xi_d^alpha_d.
double monomial(const MultiIndex& alpha, const Vector& xi);

/// All multi-indices in d variables with order <= max_order, ordered by order
/// then lexicographically (descending in the first component).
std::vector<MultiIndex> multi_indices_up_to(int dimension, int max_order);

/// Number of multi-indices in d variables of order exactly k.
long long multi_index_count(int dimension, int order);

struct QuasimomentumPath {
  std::vector<Vector> samples;
  /// Sample index of every waypoint, in order.
  std::vector<std::size_t> waypoint_samples;
  std::vector<std::string> labels;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
};

/// Piecewise-linear sampling between consecutive waypoints. Each segment gets
/// steps_per_segment steps; shared waypoints appear once. Samples are reduced
/// to the fundamental domain only when `reduce` is set.
QuasimomentumPath sample_path(const Lattice& lattice, std::span<const Vector> waypoints,
                              int steps_per_segment, bool reduce = false,
                              std::vector<std::string> labels = {});

}  // namespace bloch
