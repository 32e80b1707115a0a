#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bloch/lattice.hpp"
#include "bloch/operator.hpp"
#include "bloch/types.hpp"

namespace bloch {

/// Eigenpairs of one truncated fiber operator, eigenvalues nondecreasing.
struct SpectrumAtT {
  Vector t;
  Vector eigenvalues;
  CMatrix eigenvectors;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  [[nodiscard]] std::span<const double> values() const noexcept {
    return {eigenvalues.data(), size()};
  }
};

SpectrumAtT eigen_decompose(const TruncatedOperator& op);
SpectrumAtT eigen_decompose(const CMatrix& hermitian, const Vector& t);

/// Two eigenvalues belong to one cluster when their spacing is at most
/// absolute + relative * |lambda|.
struct ClusterTolerance {
  double absolute = 1e-8;
  double relative = 1e-8;

  [[nodiscard]] double at(double lambda) const noexcept;

  static ClusterTolerance fixed(double tol) noexcept { return {tol, 0.0}; }
};

/// Distinct values mu_j (strictly increasing), multiplicities k_j and partial
/// sums s_j = k_1 + ... + k_j. Cluster indices are zero-based.
struct ClusterDecomposition {
  std::vector<double> values;
  std::vector<int> multiplicities;
  std::vector<int> partial_sums;
  ClusterTolerance tolerance;

  [[nodiscard]] int count() const noexcept { return static_cast<int>(values.size()); }
  /// Zero-based eigenvalue index of the first member of cluster j.
  [[nodiscard]] int first(int j) const { return j == 0 ? 0 : partial_sums[static_cast<std::size_t>(j) - 1]; }
  /// Zero-based cluster containing the zero-based eigenvalue index n.
  [[nodiscard]] int cluster_of(int n) const;
};

/// Greedy left-to-right: a new cluster starts when lambda_{n+1} - lambda_n
/// exceeds tol.at(lambda_n).
ClusterDecomposition cluster_multiplicities(std::span<const double> eigenvalues, ClusterTolerance tol);
ClusterDecomposition cluster_multiplicities(const SpectrumAtT& spectrum,
                                            ClusterTolerance tol = {});

/// (1/2) min_{j < p_limit} (mu_{j+1} - mu_j). Any radius strictly below this
/// isolates the first p_limit clusters from each other.
double min_cluster_gap(const ClusterDecomposition& clusters, int p_limit);

/// Eigenvalues (with multiplicity) in the open interval (center - r, center + r).
int count_in_interval(std::span<const double> eigenvalues, double center, double r);
int count_in_interval(const SpectrumAtT& spectrum, double center, double r);

struct BandStructure {
  QuasimomentumPath path;
  /// values(i, n) = lambda_{n+1}(t_i).
  Matrix values;

  [[nodiscard]] int band_count() const noexcept { return static_cast<int>(values.cols()); }
};

/// Lowest n_bands eigenvalues at every path sample. Refuses n_bands > N/2.
BandStructure compute_bands(const OperatorSpec& spec, const Lattice& lattice,
                            const QuasimomentumPath& path, double cutoff, int n_bands);

/// CSV: header t_1..t_d,band_1..band_n; 17 significant digits.
void write_band_csv(const BandStructure& bands, std::ostream& out);

/// max_{n < n_bands} |lambda_n(t_i) - lambda_n(t0)| for each t_i.
std::vector<double> band_deltas(const OperatorSpec& spec, const Lattice& lattice, const Vector& t0,
                                std::span<const Vector> sequence, double cutoff, int n_bands);

struct CountingWitness {
  std::size_t sample = 0;
  Vector t;
  int cluster = 0;
  int count = 0;
  int expected = 0;
};

struct RadiusCertificate {
  double radius = 0.0;
  bool pass = false;
  /// First sequence index from which every operator satisfies the count.
  std::size_t first_index = 0;
  /// Last offending sample, if any sample failed.
  std::optional<CountingWitness> witness;
};

struct EigenvalueCountingOptions {
  ClusterTolerance tolerance{};
  /// Number of clusters to certify. When unset it is derived from `band`
  /// (smallest p with band < s_p), or else from the trusted lower half.
  std::optional<int> p_limit;
  std::optional<int> band;
  /// Radii as fractions of min_cluster_gap.
  std::vector<double> radius_fractions{0.25, 0.5, 0.75};
};

struct EigenvalueCountingReport {
  ClusterDecomposition clusters;
  int p_limit = 0;
  double gap_bound = 0.0;
  std::vector<RadiusCertificate> radii;
  bool pass = false;
};

/// Interval-counting certificate along a sequence converging to t0: for each
/// radius r, the first index from which every A_t has exactly k_j eigenvalues
/// in (mu_j - r, mu_j + r), and these are lambda_{s_{j-1}+1}, ..., lambda_{s_j}.
EigenvalueCountingReport eigenvalue_counting_certificate(const OperatorSpec& spec,
                                                         const Lattice& lattice, const Vector& t0,
                                                         std::span<const Vector> sequence,
                                                         double cutoff,
                                                         const EigenvalueCountingOptions& options = {});

}  // namespace bloch
