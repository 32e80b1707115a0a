#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bloch/gapmetric.hpp"
#include "bloch/lattice.hpp"
#include "bloch/linalg.hpp"
#include "bloch/operator.hpp"
#include "bloch/projector.hpp"
#include "bloch/spectral.hpp"
#include "support.hpp"

namespace bloch {
namespace {

constexpr int kCases = 40;

/// Seeded generators; each property derives its own stream from the case number.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& rng() { return rng_; }

  /// Well-conditioned generators: identity plus a bounded perturbation, scaled.
  Matrix generators(int d) {
    Matrix a = Matrix::Identity(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a(i, j) += uniform(-0.4, 0.4);
    }
    return uniform(0.5, 3.0) * a;
  }

  Vector point(int d, double scale) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = uniform(-scale, scale);
    return v;
  }

  /// Random self-adjoint scalar spec: -Laplacian plus a Hermitian-paired potential,
  /// a real first-order drift and a real even multiplier.
  OperatorSpec spec(int d) {
    OperatorSpec s = testing::free_spec(d);
    std::vector<FourierCoefficient> potential;
    const int modes = integer(1, 3);
    for (int k = 0; k < modes; ++k) {
      IntVector g(static_cast<std::size_t>(d));
      for (auto& c : g) c = integer(-2, 2);
      const Complex v(uniform(-1, 1), uniform(-1, 1));
      IntVector minus = g;
      for (auto& c : minus) c = -c;
      if (g == minus) {
        potential.push_back({g, testing::scalar(v.real())});
      } else {
        potential.push_back({g, testing::scalar(v)});
        potential.push_back({minus, testing::scalar(std::conj(v))});
      }
    }
    s.lower.push_back({MultiIndex{IntVector(static_cast<std::size_t>(d), 0)}, potential});
    IntVector drift(static_cast<std::size_t>(d), 0);
    drift[0] = 1;
    s.lower.push_back({MultiIndex{drift}, {{IntVector(static_cast<std::size_t>(d), 0),
                                            testing::scalar(uniform(-1, 1))}}});
    IntVector zero(static_cast<std::size_t>(d), 0);
    s.multiplier.push_back({zero, testing::scalar(uniform(-1, 1))});
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

TEST(LatticeProperty, Biorthogonality) {
  for (int c = 0; c < kCases; ++c) {
    Gen gen(1000 + c);
    const int d = gen.integer(1, 3);
    const Lattice lattice(gen.generators(d));
    const Matrix product = lattice.basis() * lattice.dual_basis().transpose();
    EXPECT_LE((product - testing::kTwoPi * Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LatticeProperty, ReductionTilesAndIsIdempotent) {
  for (int c = 0; c < kCases; ++c) {
    Gen gen(2000 + c);
    const int d = gen.integer(1, 3);
    const Lattice lattice(gen.generators(d));
    const Vector t = gen.point(d, 10.0);
    const Vector r = reduce_to_fundamental(lattice, t);
    const Vector coords = lattice.dual_coordinates(r);
    EXPECT_GE(coords.minCoeff(), -0.5 - 1e-12);
    EXPECT_LT(coords.maxCoeff(), 0.5 + 1e-12);
    // t - r is a dual-lattice vector.
    const Vector diff = lattice.dual_coordinates(t - r);
    for (Eigen::Index i = 0; i < d; ++i) EXPECT_NEAR(diff[i], std::round(diff[i]), 1e-9);
    EXPECT_EQ(reduce_to_fundamental(lattice, r), r);
    // Translates reduce to the same point.
    IntVector shift(static_cast<std::size_t>(d));
    for (auto& s : shift) s = gen.integer(-3, 3);
    const Vector moved = reduce_to_fundamental(lattice, t + lattice.dual_point(shift));
    EXPECT_LE((moved - r).norm(), 1e-9 * (1 + t.norm()));
  }
}

TEST(LatticeProperty, EnumerationMatchesBruteForce) {
  for (int c = 0; c < 10; ++c) {
    Gen gen(3000 + c);
    const int d = gen.integer(1, 2);
    const Lattice lattice(gen.generators(d));
    const double cutoff = gen.uniform(1.0, 4.0);
    const auto points = enumerate_dual_points(lattice, cutoff);
    std::size_t brute = 0;
    const int range = 40;
    if (d == 1) {
      for (int i = -range; i <= range; ++i) brute += lattice.dual_point(IntVector{i}).norm() <= cutoff;
    } else {
      for (int i = -range; i <= range; ++i) {
        for (int j = -range; j <= range; ++j) {
          brute += lattice.dual_point(IntVector{i, j}).norm() <= cutoff;
        }
      }
    }
    EXPECT_EQ(points.size(), brute);
    for (std::size_t k = 1; k < points.size(); ++k) EXPECT_LT(points[k - 1].coords, points[k].coords);
  }
}

TEST(OperatorProperty, RandomSpecsAreHermitian) {
  for (int c = 0; c < kCases; ++c) {
    Gen gen(4000 + c);
    const int d = gen.integer(1, 2);
    const Lattice lattice(gen.generators(d));
    const OperatorSpec spec = gen.spec(d);
    const double cutoff = 2.0 * lattice.dual_basis().rowwise().norm().maxCoeff() * 2.0 + 1.0;
    const std::vector<Vector> ts{gen.point(d, 0.5), gen.point(d, 0.5)};
    EXPECT_TRUE(check_self_adjointness(spec, lattice, ts, cutoff).pass);
  }
}

TEST(SpectralProperty, CountingConsistency) {
  for (int c = 0; c < kCases; ++c) {
    Gen gen(5000 + c);
    const OperatorSpec spec = gen.spec(1);
    const Lattice lattice = testing::square_lattice(1);
    const auto s = eigen_decompose(assemble(spec, lattice, gen.point(1, 0.5), 6.0));
    const auto clusters = cluster_multiplicities(s);
    const int p = clusters.count();
    const double r = gen.uniform(0.05, 0.95) * min_cluster_gap(clusters, p - 1);
    int total = 0;
    for (int j = 0; j < p; ++j) {
      total += count_in_interval(s, clusters.values[static_cast<std::size_t>(j)], r);
    }
    EXPECT_EQ(total, clusters.partial_sums.back());
    EXPECT_EQ(static_cast<std::size_t>(total), s.size());
  }
}

TEST(SpectralProperty, ClusterInvariants) {
  for (int c = 0; c < kCases; ++c) {
    Gen gen(6000 + c);
    std::vector<double> values;
    const int n = gen.integer(1, 12);
    double x = gen.uniform(-5, 5);
    for (int i = 0; i < n; ++i) {
      values.push_back(x);
      x += gen.integer(0, 2) == 0 ? 0.0 : gen.uniform(0.1, 2.0);
    }
    const auto clusters = cluster_multiplicities(values, ClusterTolerance::fixed(1e-8));
    int sum = 0;
    for (std::size_t j = 0; j < clusters.values.size(); ++j) {
      sum += clusters.multiplicities[j];
      EXPECT_EQ(clusters.partial_sums[j], sum);
      if (j > 0) {
        EXPECT_GT(clusters.values[j] - clusters.values[j - 1], 1e-8);
      }
    }
    EXPECT_EQ(sum, n);
  }
}

TEST(ProjectorProperty, QuadratureMatchesEigenAndIsIdempotent) {
  for (int c = 0; c < 20; ++c) {
    Gen gen(7000 + c);
    const OperatorSpec spec = gen.spec(1);
    const Lattice lattice = testing::square_lattice(1);
    const auto op = assemble(spec, lattice, gen.point(1, 0.5), 5.0);
    const auto s = eigen_decompose(op);
    const auto clusters = cluster_multiplicities(s);
    const int j = gen.integer(0, clusters.count() / 2);
    double half_gap = 1e300;
    if (j > 0) half_gap = std::min(half_gap, 0.5 * (clusters.values[j] - clusters.values[j - 1]));
    half_gap = std::min(half_gap, 0.5 * (clusters.values[j + 1] - clusters.values[j]));
    const Contour contour{clusters.values[static_cast<std::size_t>(j)], half_gap};
    const CMatrix p =
        riesz_projector_quadrature(op.matrix, contour, quadrature_nodes_for(s.values(), contour));
    const CMatrix e = riesz_projector_eigen(s, clusters, j);
    EXPECT_LE(operator_norm(p - e), 1e-8);
    EXPECT_LE(operator_norm(p * p - p), 1e-8);
    EXPECT_LE(hermiticity_defect(p), 1e-8);
  }
}

TEST(ProjectorProperty, AlignmentIsUnimodularRotation) {
  for (int c = 0; c < kCases; ++c) {
    Gen gen(8000 + c);
    const Eigen::Index n = gen.integer(2, 8);
    BlochVector ref;
    ref.coefficients = testing::random_unit(gen.rng(), n);
    ref.t = Vector::Zero(1);
    BlochVector psi = ref;
    psi.coefficients = testing::random_unit(gen.rng(), n);
    const auto aligned = align_phase_to_reference(psi, ref);
    EXPECT_NEAR(aligned.coefficients.norm(), 1.0, 1e-12);
    const Complex overlap = ref.coefficients.dot(aligned.coefficients);
    EXPECT_NEAR(overlap.imag(), 0.0, 1e-12);
    EXPECT_GE(overlap.real(), 0.0);
  }
}

TEST(GapProperty, SymmetricBoundedAndZeroOnDiagonal) {
  for (int c = 0; c < kCases; ++c) {
    Gen gen(9000 + c);
    const int n = gen.integer(1, 6);
    const CMatrix a = testing::random_hermitian(gen.rng(), n, gen.uniform(0.1, 10));
    const CMatrix b = testing::random_hermitian(gen.rng(), n, gen.uniform(0.1, 10));
    const auto ab = gap(a, b);
    EXPECT_NEAR(ab.gap, gap(b, a).gap, 1e-12);
    EXPECT_GE(ab.gap, 0.0);
    EXPECT_LE(ab.gap, 1.0);
    EXPECT_LE(gap(a, a).gap, 1e-12);
  }
}

}  // namespace
}  // namespace bloch
