#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bloch/lattice.hpp"
#include "bloch/operator.hpp"
#include "bloch/spectral.hpp"
#include "bloch/types.hpp"

namespace bloch {

/// Circle |z - center| = radius in the complex spectral plane.
struct Contour {
  double center = 0.0;
  double radius = 1.0;
};

inline constexpr int kDefaultQuadratureNodes = 64;

/// (1 / 2 pi i) \oint (z - A)^{-1} dz by the trapezoid rule in the angle.
/// Throws Error(contour_collision) if an eigenvalue lies within 1e-8 of the circle.
CMatrix riesz_projector_quadrature(const CMatrix& hermitian, const Contour& contour,
                                   int nodes = kDefaultQuadratureNodes);

/// Smallest node count (at least `minimum`, at most 8192) for which the
/// trapezoid error of every eigenvalue's pole term is below `target`: a pole at
/// distance rho * radius from the centre contributes about rho^N (rho < 1) or
/// rho^-N (rho > 1).
int quadrature_nodes_for(std::span<const double> eigenvalues, const Contour& contour,
                         double target = 1e-14, int minimum = kDefaultQuadratureNodes);

/// Sum of v_n v_n^* over the zero-based eigenvalue range [first, first + count).
CMatrix spectral_projector(const SpectrumAtT& spectrum, int first, int count);

/// Orthogonal projector onto the eigenspace of cluster j (zero-based).
CMatrix riesz_projector_eigen(const SpectrumAtT& spectrum, const ClusterDecomposition& clusters,
                              int cluster);

enum class PhaseConvention { raw, reference, planewave };

std::string_view to_string(PhaseConvention convention) noexcept;
PhaseConvention parse_phase_convention(std::string_view text);

/// A normalized eigenvector u_{gamma,k} of the truncated operator at t.
struct BlochVector {
  CVector coefficients;
  Vector t;
  int band = 0;
  PhaseConvention convention = PhaseConvention::raw;
  int components = 1;
  /// Flat index of the gamma = 0 plane wave, when it is in the basis.
  std::optional<std::size_t> planewave_index;
};

/// Eigenvector of the zero-based `band` as a raw BlochVector.
BlochVector make_bloch_vector(const TruncatedOperator& op, const SpectrumAtT& spectrum, int band);

/// e^{i theta} psi with (psi_ref, result) real and nonnegative.
/// Throws Error(alignment_undefined) when |(psi_ref, psi)| < 1e-12.
BlochVector align_phase_to_reference(const BlochVector& psi, const BlochVector& reference);

/// e^{i theta} psi with the gamma = 0 coefficient real and positive. Scalar
/// problems only. Throws Error(overlap_below_threshold) when |u_0| <= threshold.
BlochVector align_phase_to_planewave(const BlochVector& psi, double threshold);

/// (Psi, e^{i<t,x>}), i.e. the gamma = 0 coefficient u_0. Scalar problems only.
Complex overlap_with_planewave(const BlochVector& psi);

struct OverlapReport {
  std::vector<Vector> ts;
  std::vector<double> values;
  double threshold = 0.0;
  bool pass = false;
};

/// |(Psi_{band,t}, e^{i<t,x>})| at every sample; pass iff all exceed threshold.
OverlapReport planewave_overlap_scan(const OperatorSpec& spec, const Lattice& lattice,
                                     std::span<const Vector> ts, int band, double cutoff,
                                     double threshold);

struct ProjectorScanOptions {
  ClusterTolerance tolerance{};
  /// Minimum node count; raised per sample by quadrature_nodes_for.
  int nodes = kDefaultQuadratureNodes;
  /// Contour radius as a fraction of half the distance to the neighbouring clusters.
  double radius_fraction = 0.5;
};

struct ProjectorScan {
  int cluster = 0;
  int multiplicity = 0;
  Contour contour;
  std::vector<double> abs_dt;
  /// ||P(t_i) - P(t0)||.
  std::vector<double> distance;
  /// ||P_quadrature(t_i) - P_eigen(t_i)||.
  std::vector<double> quadrature_defect;
  std::vector<int> nodes;
};

/// Projector of cluster j of t0 followed along the sequence. Throws
/// Error(counting_violation) when a sample no longer has exactly k_j eigenvalues
/// at the cluster's positions inside the contour.
ProjectorScan projector_continuity_scan(const OperatorSpec& spec, const Lattice& lattice,
                                        const Vector& t0, std::span<const Vector> sequence,
                                        int cluster, double cutoff,
                                        const ProjectorScanOptions& options = {});

inline constexpr double kDefaultOverlapThreshold = 1e-3;

struct BlochScanOptions {
  PhaseConvention convention = PhaseConvention::reference;
  double overlap_threshold = kDefaultOverlapThreshold;
  ClusterTolerance tolerance{};
};

struct BlochScan {
  std::vector<double> abs_dt;
  std::vector<double> difference;
  /// |u_0| per sample (scalar problems only).
  std::vector<double> overlap;
  /// Convention actually applied per sample after the planewave fallback.
  std::vector<PhaseConvention> applied;
};

/// Per-step differences ||Psi_{t_{i+1}} - Psi_{t_i}|| along a path. The
/// reference convention aligns each sample to its predecessor; planewave falls
/// back to that when the overlap is at or below the threshold. A first sample
/// without enough overlap keeps its eigensolver phase.
/// Throws Error(simplicity_violation) if the band is degenerate at a sample.
BlochScan bloch_continuity_scan(const OperatorSpec& spec, const Lattice& lattice,
                                std::span<const Vector> path, int band, double cutoff,
                                const BlochScanOptions& options = {});

/// Distances ||Psi_{t_i} - Psi_{t0}|| along a sequence; the reference
/// convention aligns every sample to Psi_{t0}. Under planewave, a Psi_{t0}
/// without enough overlap keeps its eigensolver phase and samples fall back to it.
BlochScan bloch_deviation_scan(const OperatorSpec& spec, const Lattice& lattice, const Vector& t0,
                               std::span<const Vector> sequence, int band, double cutoff,
                               const BlochScanOptions& options = {});

}  // namespace bloch
