#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bloch/error.hpp"
#include "bloch/linalg.hpp"
#include "bloch/projector.hpp"
#include "support.hpp"

namespace bloch {
namespace {

using testing::free_spec;
using testing::mathieu_spec;
using testing::square_lattice;
using testing::vec;

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::invalid_argument;
}

CMatrix diag(std::initializer_list<double> values) {
  return Vector(vec(values)).cast<Complex>().asDiagonal();
}

BlochVector bloch(const CVector& c, std::optional<std::size_t> planewave = 0) {
  BlochVector v;
  v.coefficients = c;
  v.t = vec({0.0});
  v.planewave_index = planewave;
  return v;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

TEST(RieszQuadrature, DiagonalExamples) {
  const CMatrix a = diag({0, 2});
  EXPECT_LE(max_abs(riesz_projector_quadrature(a, {0.0, 1.0}, 64) - diag({1, 0})), 1e-10);
  EXPECT_LE(max_abs(riesz_projector_quadrature(a, {1.0, 2.0}, 64) - CMatrix::Identity(2, 2)), 1e-10);
  EXPECT_LE(max_abs(riesz_projector_quadrature(a, {5.0, 1.0}, 64)), 1e-10);
}

TEST(RieszQuadrature, Errors) {
  const CMatrix a = diag({0, 2});
  EXPECT_EQ(code_of([&] { riesz_projector_quadrature(a, {1.0, 1.0}, 64); }),
            Errc::contour_collision);
  EXPECT_EQ(code_of([&] { riesz_projector_quadrature(a, {0.0, 1.0}, 8); }), Errc::invalid_argument);
}

TEST(RieszQuadrature, MathieuGroundStateMatchesOuterProduct) {
  const auto op = assemble(mathieu_spec(1.0), square_lattice(1), vec({0.25}), 32.0);
  const auto s = eigen_decompose(op);
  const auto clusters = cluster_multiplicities(s);
  const Contour contour{clusters.values[0], 0.5 * min_cluster_gap(clusters, 1)};
  const CMatrix p = riesz_projector_quadrature(op.matrix, contour,
                                               quadrature_nodes_for(s.values(), contour));
  const CVector v = s.eigenvectors.col(0);
  EXPECT_LE(operator_norm(p - v * v.adjoint()), 1e-8);
  EXPECT_NEAR(p.trace().real(), 1.0, 1e-9);
  EXPECT_LE(operator_norm(p * p - p), 1e-8);
  EXPECT_LE(hermiticity_defect(p), 1e-8);
}

TEST(QuadratureNodes, GrowsAsPolesApproachContour) {
  const std::vector<double> far{0.0, 10.0};
  const std::vector<double> near{0.0, 1.05};
  const Contour contour{0.0, 1.0};
  EXPECT_EQ(quadrature_nodes_for(far, contour), kDefaultQuadratureNodes);
  const int n = quadrature_nodes_for(near, contour);
  EXPECT_GT(n, kDefaultQuadratureNodes);
  const CMatrix a = diag({0.0, 1.05});
  EXPECT_LE(max_abs(riesz_projector_quadrature(a, contour, n) - diag({1, 0})), 1e-12);
}

TEST(EigenProjector, FreeDoubleCluster) {
  const auto op = assemble(free_spec(1), square_lattice(1), vec({0.0}), 1.5);
  const auto s = eigen_decompose(op);
  const auto clusters = cluster_multiplicities(s);
  const CMatrix p = riesz_projector_eigen(s, clusters, 1);
  EXPECT_LE(max_abs(p - diag({1, 0, 1})), 1e-12);
  EXPECT_LE(max_abs(riesz_projector_eigen(s, clusters, 0) - diag({0, 1, 0})), 1e-12);
}

TEST(EigenProjector, CompletenessAndRank) {
  const auto op = assemble(mathieu_spec(1.0), square_lattice(1), vec({0.0}), 6.0);
  const auto s = eigen_decompose(op);
  const auto clusters = cluster_multiplicities(s);
  CMatrix sum = CMatrix::Zero(op.matrix.rows(), op.matrix.cols());
  for (int j = 0; j < clusters.count(); ++j) {
    const CMatrix p = riesz_projector_eigen(s, clusters, j);
    EXPECT_NEAR(p.trace().real(), clusters.multiplicities[static_cast<std::size_t>(j)], 1e-9);
    EXPECT_LE(operator_norm(p * p - p), 1e-10);
    sum += p;
  }
  EXPECT_LE(operator_norm(sum - CMatrix::Identity(sum.rows(), sum.cols())), 1e-9);
}

TEST(EigenProjector, IndependentOfClusterBasis) {
  std::mt19937_64 rng(3);
  const auto op = assemble(free_spec(1), square_lattice(1), vec({0.0}), 3.0);
  auto s = eigen_decompose(op);
  const auto clusters = cluster_multiplicities(s);
  const CMatrix before = riesz_projector_eigen(s, clusters, 1);
  // Rotate the doubled eigenspace by a random unitary.
  const CMatrix h = testing::random_hermitian(rng, 2);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  const CMatrix u = solver.eigenvectors();
  s.eigenvectors.middleCols(1, 2) = s.eigenvectors.middleCols(1, 2) * u;
  EXPECT_LE(operator_norm(riesz_projector_eigen(s, clusters, 1) - before), 1e-12);
}

TEST(AlignReference, Examples) {
  std::mt19937_64 rng(11);
  const CVector ref = testing::random_unit(rng, 5);
  const auto r = bloch(ref);
  const auto rotated = align_phase_to_reference(bloch(Complex(0, 1) * ref), r);
  EXPECT_LE((rotated.coefficients - ref).norm(), 1e-15);
  EXPECT_EQ(rotated.convention, PhaseConvention::reference);
  EXPECT_LE((align_phase_to_reference(r, r).coefficients - ref).norm(), 1e-15);

  CVector orth = CVector::Zero(2);
  orth[1] = 1.0;
  CVector e0 = CVector::Zero(2);
  e0[0] = 1.0;
  EXPECT_EQ(code_of([&] { align_phase_to_reference(bloch(orth), bloch(e0)); }),
            Errc::alignment_undefined);
}

TEST(AlignReference, Optimality) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const CVector ref = testing::random_unit(rng, 6);
    const CVector psi = testing::random_unit(rng, 6);
    const auto aligned = align_phase_to_reference(bloch(psi), bloch(ref));
    const double overlap = std::abs(ref.dot(psi));
    EXPECT_NEAR((aligned.coefficients - ref).norm(), std::sqrt(2 - 2 * overlap), 1e-12);
    for (int k = 0; k < 32; ++k) {
      const Complex phase = std::polar(1.0, 2 * std::numbers::pi * k / 32);
      EXPECT_LE((aligned.coefficients - ref).norm(), (phase * psi - ref).norm() + 1e-12);
    }
  }
}

TEST(AlignPlanewave, Examples) {
  CVector wave = CVector::Zero(3);
  wave[1] = 1.0;
  const auto plain = align_phase_to_planewave(bloch(wave, 1), 1e-3);
  EXPECT_EQ(plain.coefficients, wave);
  EXPECT_EQ(plain.convention, PhaseConvention::planewave);
  EXPECT_EQ(overlap_with_planewave(bloch(wave, 1)), Complex(1.0));

  CVector psi(2);
  psi[0] = Complex(1, 1) / std::sqrt(2.0) * 0.9;
  psi[1] = 0.436;
  const auto aligned = align_phase_to_planewave(bloch(psi, 0), 1e-3);
  EXPECT_NEAR(aligned.coefficients[0].real(), 0.9, 1e-15);
  EXPECT_NEAR(aligned.coefficients[0].imag(), 0.0, 1e-15);

  CVector tiny = CVector::Zero(2);
  tiny[0] = 1e-4;
  tiny[1] = 1.0;
  EXPECT_EQ(code_of([&] { align_phase_to_planewave(bloch(tiny, 0), 1e-3); }),
            Errc::overlap_below_threshold);
}

TEST(AlignPlanewave, MathieuWeakCouplingOverlapAboveHalf) {
  const auto op = assemble(mathieu_spec(0.1), square_lattice(1), vec({0.25}), 32.0);
  const auto s = eigen_decompose(op);
  const auto psi = make_bloch_vector(op, s, 0);
  const double overlap = std::abs(overlap_with_planewave(psi));
  EXPECT_GT(overlap * overlap, 0.5);
  EXPECT_NO_THROW(align_phase_to_planewave(psi, kDefaultOverlapThreshold));
}

TEST(Overlap, PhaseInvariant) {
  const auto op = assemble(mathieu_spec(1.0), square_lattice(1), vec({0.25}), 32.0);
  const auto s = eigen_decompose(op);
  const auto psi = make_bloch_vector(op, s, 0);
  const double base = std::abs(overlap_with_planewave(psi));
  for (double theta : {0.3, 1.7, -2.9}) {
    auto rotated = psi;
    rotated.coefficients *= std::polar(1.0, theta);
    EXPECT_NEAR(std::abs(overlap_with_planewave(rotated)), base, 1e-15);
  }
  const auto fine_op = assemble(mathieu_spec(1.0), square_lattice(1), vec({0.25}), 64.0);
  const auto fine = make_bloch_vector(fine_op, eigen_decompose(fine_op), 0);
  EXPECT_NEAR(std::abs(overlap_with_planewave(fine)), base, 1e-8);
}

TEST(Overlap, ScanReportsThreshold) {
  const std::vector<Vector> ts{vec({0.0}), vec({0.25})};
  const auto report = planewave_overlap_scan(mathieu_spec(0.1), square_lattice(1), ts, 0, 16.0, 0.5);
  EXPECT_TRUE(report.pass);
  for (double v : report.values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-12);
  }
}

TEST(PhaseConvention, RoundTrip) {
  for (auto c : {PhaseConvention::raw, PhaseConvention::reference, PhaseConvention::planewave}) {
    EXPECT_EQ(parse_phase_convention(to_string(c)), c);
  }
  EXPECT_EQ(code_of([] { parse_phase_convention("sideways"); }), Errc::invalid_argument);
}

TEST(ProjectorScan, ConstantPathIsZero) {
  const std::vector<Vector> seq(4, vec({0.25}));
  const auto scan =
      projector_continuity_scan(mathieu_spec(1.0), square_lattice(1), vec({0.25}), seq, 0, 8.0);
  for (double d : scan.distance) EXPECT_LE(d, 1e-12);
}

TEST(ProjectorScan, FreeGroundStateLinearDecay) {
  std::vector<Vector> seq;
  for (int i = 3; i <= 10; ++i) seq.push_back(vec({std::pow(2.0, -i)}));
  const auto scan =
      projector_continuity_scan(free_spec(1), square_lattice(1), vec({0.0}), seq, 0, 8.0);
  // The free eigenvectors do not depend on t, so the projector stays the gamma = 0 plane wave.
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_LE(scan.distance[i], 1e-10);
    EXPECT_LE(scan.quadrature_defect[i], 1e-8);
  }
}

TEST(ProjectorScan, MathieuGenericPointDecreases) {
  std::vector<Vector> seq;
  for (int i = 1; i <= 10; ++i) seq.push_back(vec({0.25 + std::pow(2.0, -i - 3)}));
  seq.push_back(vec({0.25 + 1e-7}));
  const auto scan =
      projector_continuity_scan(mathieu_spec(1.0), square_lattice(1), vec({0.25}), seq, 0, 32.0);
  for (std::size_t i = 1; i < seq.size(); ++i) EXPECT_LT(scan.distance[i], scan.distance[i - 1]);
  EXPECT_LT(scan.distance.back(), 1e-6);
  for (double d : scan.quadrature_defect) EXPECT_LE(d, 1e-8);
}

TEST(ProjectorScan, CountingViolation) {
  const std::vector<Vector> seq{vec({0.45})};
  EXPECT_EQ(code_of([&] {
              projector_continuity_scan(free_spec(1), square_lattice(1), vec({0.0}), seq, 1, 8.0);
            }),
            Errc::counting_violation);
}

TEST(BlochScan, FreePlanewaveExact) {
  std::vector<Vector> path;
  for (int i = 0; i <= 8; ++i) path.push_back(vec({0.2 + 0.01 * i}));
  BlochScanOptions options;
  options.convention = PhaseConvention::planewave;
  const auto scan = bloch_continuity_scan(free_spec(1), square_lattice(1), path, 0, 8.0, options);
  for (double d : scan.difference) EXPECT_LE(d, 1e-12);
  for (auto c : scan.applied) EXPECT_EQ(c, PhaseConvention::planewave);
}

TEST(BlochScan, PlanewaveFallsBackWithoutOverlap) {
  // Free band 2 at t = 0.25 is the gamma = -1 plane wave, so u_0 = 0.
  std::vector<Vector> seq;
  for (int i = 4; i <= 10; ++i) seq.push_back(vec({0.25 + std::pow(2.0, -i)}));
  BlochScanOptions options;
  options.convention = PhaseConvention::planewave;
  const auto scan =
      bloch_deviation_scan(free_spec(1), square_lattice(1), vec({0.25}), seq, 1, 8.0, options);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(scan.applied[i], PhaseConvention::reference);
    EXPECT_LE(scan.difference[i], 1e-12);
    EXPECT_EQ(scan.overlap[i], 0.0);
  }
}

TEST(BlochScan, MathieuReferenceHalving) {
  const Lattice lattice = square_lattice(1);
  double previous = 0.0;
  for (int level = 0; level < 4; ++level) {
    const double h = 0.02 / std::pow(2.0, level);
    std::vector<Vector> path;
    for (int i = 0; i <= 4; ++i) path.push_back(vec({0.25 + h * i}));
    const auto ref = bloch_continuity_scan(mathieu_spec(1.0), lattice, path, 0, 32.0);
    BlochScanOptions raw_options;
    raw_options.convention = PhaseConvention::raw;
    const auto raw = bloch_continuity_scan(mathieu_spec(1.0), lattice, path, 0, 32.0, raw_options);
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.difference.size(); ++i) {
      EXPECT_LE(ref.difference[i], raw.difference[i] + 1e-12);
      worst = std::max(worst, ref.difference[i]);
    }
    if (level > 0) {
      EXPECT_GE(worst / previous, 0.4);
      EXPECT_LE(worst / previous, 0.6);
    }
    previous = worst;
  }
}

TEST(BlochScan, DegenerateBandRejected) {
  const std::vector<Vector> path{vec({0.1}), vec({0.0})};
  EXPECT_EQ(code_of([&] { bloch_continuity_scan(free_spec(1), square_lattice(1), path, 1, 8.0); }),
            Errc::simplicity_violation);
}

TEST(BlochScan, DeviationFromReferencePoint) {
  std::vector<Vector> seq;
  for (int i = 1; i <= 8; ++i) seq.push_back(vec({0.25 + std::pow(2.0, -i - 3)}));
  const auto scan =
      bloch_deviation_scan(mathieu_spec(1.0), square_lattice(1), vec({0.25}), seq, 0, 16.0);
  for (std::size_t i = 1; i < seq.size(); ++i) {
    EXPECT_LT(scan.difference[i], scan.difference[i - 1]);
  }
}

}  // namespace
}  // namespace bloch
