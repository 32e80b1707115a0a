#include "bloch/lattice.hpp"

#include <cmath>
#include <numbers>

#include "bloch/error.hpp"

namespace bloch {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Shift vector k with c - k in [-1/2, 1/2)^d.
IntVector cell_shift(const Vector& coords) {
  IntVector shift(static_cast<std::size_t>(coords.size()));
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    shift[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(coords[i] + 0.5));
  }
  return shift;
}

bool is_zero(const IntVector& v) {
  for (int x : v) {
    if (x != 0) return false;
  }
  return true;
}

}  // namespace

Lattice::Lattice(const Matrix& generators) : basis_(generators) {
  if (generators.rows() == 0 || generators.rows() != generators.cols()) {
    throw Error(Errc::invalid_argument, "lattice generators must form a non-empty square matrix");
  }
  const double det = generators.determinant();
  double scale = 1.0;
  for (Eigen::Index i = 0; i < generators.rows(); ++i) scale *= generators.row(i).norm();
  if (!std::isfinite(det) || scale == 0.0 || std::abs(det) <= 1e-12 * scale) {
    throw Error(Errc::degenerate_lattice, "lattice generators are linearly dependent");
  }
  volume_ = std::abs(det);
  // B A^T = 2 pi I  =>  B = 2 pi A^{-T}
  dual_ = kTwoPi * generators.inverse().transpose();
}

Vector Lattice::dual_point(std::span<const int> coords) const {
  Vector out = Vector::Zero(dimension());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    out += static_cast<double>(coords[i]) * dual_.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return out;
}

Vector Lattice::dual_coordinates(const Vector& t) const {
  // t = B^T c  =>  c = A t / (2 pi)
  return basis_ * t / kTwoPi;
}

Lattice build_lattice(const Matrix& generators) { return Lattice(generators); }

std::vector<DualPoint> enumerate_dual_points(const Lattice& lattice, double cutoff) {
  if (!(cutoff > 0.0)) {
    throw Error(Errc::invalid_argument, "cutoff must be positive");
  }
  const int d = lattice.dimension();
  // |n_i| = |<a_i, gamma>| / 2 pi <= |a_i| cutoff / 2 pi
  IntVector bound(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    bound[static_cast<std::size_t>(i)] =
        static_cast<int>(std::ceil(lattice.basis().row(i).norm() * cutoff / kTwoPi));
  }
  const double limit = cutoff * cutoff * (1.0 + 1e-12);

  std::vector<DualPoint> points;
  IntVector n(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) n[static_cast<std::size_t>(i)] = -bound[static_cast<std::size_t>(i)];
  while (true) {
    Vector gamma = lattice.dual_point(n);
    if (gamma.squaredNorm() <= limit) points.push_back({n, std::move(gamma)});
    // odometer, last coordinate fastest
    int i = d - 1;
    while (i >= 0) {
      auto idx = static_cast<std::size_t>(i);
      if (n[idx] < bound[idx]) {
        ++n[idx];
        break;
      }
      n[idx] = -bound[idx];
      --i;
    }
    if (i < 0) break;
  }
  return points;
}

Vector reduce_to_fundamental(const Lattice& lattice, const Vector& t) {
  if (t.size() != lattice.dimension()) {
    throw Error(Errc::dimension_mismatch, "quasimomentum dimension differs from lattice dimension");
  }
  Vector current = t;
  // A second pass absorbs rounding when the first lands just outside the cell.
  for (int pass = 0; pass < 3; ++pass) {
    const IntVector shift = cell_shift(lattice.dual_coordinates(current));
    if (is_zero(shift)) return current;
    current = current - lattice.dual_point(shift);
  }
  return current;
}

int MultiIndex::order() const noexcept {
  int sum = 0;
  for (int c : components) sum += c;
  return sum;
}

double monomial(const MultiIndex& alpha, const Vector& xi) {
  double value = 1.0;
  for (std::size_t i = 0; i < alpha.components.size(); ++i) {
    for (int p = 0; p < alpha.components[i]; ++p) value *= xi[static_cast<Eigen::Index>(i)];
  }
  return value;
}

namespace {

void collect_of_order(int remaining, std::size_t position, IntVector& current,
                      std::vector<MultiIndex>& out) {
  if (position + 1 == current.size()) {
    current[position] = remaining;
    out.push_back({current});
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    current[position] = c;
    collect_of_order(remaining - c, position + 1, current, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices_up_to(int dimension, int max_order) {
  if (dimension <= 0 || max_order < 0) {
    throw Error(Errc::invalid_argument, "multi-index enumeration needs d >= 1 and order >= 0");
  }
  std::vector<MultiIndex> out;
  IntVector current(static_cast<std::size_t>(dimension), 0);
  for (int k = 0; k <= max_order; ++k) collect_of_order(k, 0, current, out);
  return out;
}

long long multi_index_count(int dimension, int order) {
  // C(order + d - 1, d - 1)
  long long result = 1;
  for (int i = 1; i < dimension; ++i) {
    result = result * (order + i) / i;
  }
  return result;
}

QuasimomentumPath sample_path(const Lattice& lattice, std::span<const Vector> waypoints,
                              int steps_per_segment, bool reduce,
                              std::vector<std::string> labels) {
  if (waypoints.size() < 2) {
    throw Error(Errc::invalid_argument, "a path needs at least two waypoints");
  }
  if (steps_per_segment < 1) {
    throw Error(Errc::invalid_argument, "steps_per_segment must be at least 1");
  }
  for (const auto& w : waypoints) {
    if (w.size() != lattice.dimension()) {
      throw Error(Errc::dimension_mismatch, "waypoint dimension differs from lattice dimension");
    }
  }
  if (!labels.empty() && labels.size() != waypoints.size()) {
    throw Error(Errc::invalid_argument, "one label per waypoint is required");
  }

  QuasimomentumPath path;
  path.labels = std::move(labels);
  for (std::size_t s = 0; s + 1 < waypoints.size(); ++s) {
    const Vector& from = waypoints[s];
    const Vector& to = waypoints[s + 1];
    path.waypoint_samples.push_back(path.samples.size());
    for (int j = 0; j < steps_per_segment; ++j) {
      const double f = static_cast<double>(j) / steps_per_segment;
      path.samples.push_back(j == 0 ? from : Vector(from + f * (to - from)));
    }
  }
  path.waypoint_samples.push_back(path.samples.size());
  path.samples.push_back(waypoints.back());

  if (reduce) {
    for (auto& t : path.samples) t = reduce_to_fundamental(lattice, t);
  }
  return path;
}

}  // namespace bloch
