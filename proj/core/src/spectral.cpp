#include "bloch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "bloch/error.hpp"
#include "bloch/parallel.hpp"

namespace bloch {

namespace {

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<SpectrumAtT> spectra_along(const OperatorSpec& spec, const Lattice& lattice,
                                       std::span<const Vector> ts, double cutoff) {
  std::vector<SpectrumAtT> out(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    try {
      out[i] = eigen_decompose(assemble(spec, lattice, ts[i], cutoff));
    } catch (const Error& e) {
      throw Error(e.code(), "sample " + std::to_string(i) + ": " + e.detail());
    }
  });
  return out;
}

int resolve_p_limit(const ClusterDecomposition& clusters, std::size_t basis_size,
                    const EigenvalueCountingOptions& options) {
  const int available = clusters.count() - 1;
  if (available < 1) {
    throw Error(Errc::undefined_gap, "spectrum at t0 has a single cluster");
  }
  int p = 0;
  if (options.p_limit) {
    p = *options.p_limit;
  } else if (options.band) {
    p = clusters.cluster_of(*options.band) + 1;
  } else {
    const auto trusted = static_cast<int>(basis_size / 2);
    for (int j = 0; j + 1 < clusters.count(); ++j) {
      if (clusters.partial_sums[static_cast<std::size_t>(j) + 1] <= trusted) p = j + 1;
    }
    p = std::max(p, 1);
  }
  if (p < 1 || p > available) {
    throw Error(Errc::invalid_argument, "p_limit " + std::to_string(p) + " outside [1, " +
                                            std::to_string(available) + "]");
  }
  return p;
}

}  // namespace

SpectrumAtT eigen_decompose(const CMatrix& hermitian, const Vector& t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::numerical_failure, "eigenvalue solver did not converge");
  }
  SpectrumAtT spectrum{t, solver.eigenvalues(), solver.eigenvectors()};
  if (!spectrum.eigenvalues.allFinite()) {
    throw Error(Errc::numerical_failure, "eigenvalue solver returned non-finite values");
  }
  return spectrum;
}

SpectrumAtT eigen_decompose(const TruncatedOperator& op) { return eigen_decompose(op.matrix, op.t); }

double ClusterTolerance::at(double lambda) const noexcept {
  return absolute + relative * std::abs(lambda);
}

int ClusterDecomposition::cluster_of(int n) const {
  for (int j = 0; j < count(); ++j) {
    if (n < partial_sums[static_cast<std::size_t>(j)]) return j;
  }
  throw Error(Errc::invalid_argument, "eigenvalue index " + std::to_string(n) + " out of range");
}

ClusterDecomposition cluster_multiplicities(std::span<const double> eigenvalues,
                                            ClusterTolerance tol) {
  if (!(tol.absolute > 0.0) || tol.relative < 0.0) {
    throw Error(Errc::invalid_argument, "cluster tolerance must be positive");
  }
  ClusterDecomposition out;
  out.tolerance = tol;
  for (std::size_t n = 0; n < eigenvalues.size(); ++n) {
    const bool fresh = n == 0 || eigenvalues[n] - eigenvalues[n - 1] > tol.at(eigenvalues[n - 1]);
    if (fresh) {
      out.values.push_back(eigenvalues[n]);
      out.multiplicities.push_back(1);
      out.partial_sums.push_back(out.partial_sums.empty() ? 1 : out.partial_sums.back() + 1);
    } else {
      ++out.multiplicities.back();
      ++out.partial_sums.back();
    }
  }
  return out;
}

ClusterDecomposition cluster_multiplicities(const SpectrumAtT& spectrum, ClusterTolerance tol) {
  return cluster_multiplicities(spectrum.values(), tol);
}

double min_cluster_gap(const ClusterDecomposition& clusters, int p_limit) {
  if (clusters.count() < 2) {
    throw Error(Errc::undefined_gap, "a single cluster has no gap");
  }
  if (p_limit < 1 || p_limit > clusters.count() - 1) {
    throw Error(Errc::invalid_argument, "p_limit must lie in [1, p-1]");
  }
  double gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < p_limit; ++j) {
    const auto k = static_cast<std::size_t>(j);
    gap = std::min(gap, clusters.values[k + 1] - clusters.values[k]);
  }
  return 0.5 * gap;
}

int count_in_interval(std::span<const double> eigenvalues, double center, double r) {
  if (!(r > 0.0)) throw Error(Errc::invalid_argument, "radius must be positive");
  return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double v) {
    return v > center - r && v < center + r;
  }));
}

int count_in_interval(const SpectrumAtT& spectrum, double center, double r) {
  return count_in_interval(spectrum.values(), center, r);
}

BandStructure compute_bands(const OperatorSpec& spec, const Lattice& lattice,
                            const QuasimomentumPath& path, double cutoff, int n_bands) {
  if (n_bands < 1) throw Error(Errc::invalid_argument, "need at least one band");
  const std::size_t basis_size =
      enumerate_dual_points(lattice, cutoff).size() * static_cast<std::size_t>(spec.components);
  if (static_cast<std::size_t>(n_bands) > basis_size / 2) {
    throw Error(Errc::truncation_trust,
                "requested " + std::to_string(n_bands) + " bands but only the lowest " +
                    std::to_string(basis_size / 2) + " of " + std::to_string(basis_size) +
                    " computed eigenvalues are trusted at this cutoff");
  }

  BandStructure bands{path, Matrix(static_cast<Eigen::Index>(path.size()), n_bands)};
  parallel_for(path.size(), [&](std::size_t i) {
    SpectrumAtT spectrum;
    try {
      spectrum = eigen_decompose(assemble(spec, lattice, path.samples[i], cutoff));
    } catch (const Error& e) {
      throw Error(e.code(), "sample " + std::to_string(i) + ": " + e.detail());
    }
    bands.values.row(static_cast<Eigen::Index>(i)) = spectrum.eigenvalues.head(n_bands).transpose();
  });
  return bands;
}

void write_band_csv(const BandStructure& bands, std::ostream& out) {
  const int d = bands.path.samples.empty() ? 0 : static_cast<int>(bands.path.samples.front().size());
  for (int i = 0; i < d; ++i) out << (i ? "," : "") << "t_" << i + 1;
  for (int n = 0; n < bands.band_count(); ++n) out << (d + n ? "," : "") << "band_" << n + 1;
  out << '\n';
  for (std::size_t i = 0; i < bands.path.size(); ++i) {
    const auto& t = bands.path.samples[i];
    for (int k = 0; k < d; ++k) out << (k ? "," : "") << format_double(t[k]);
    for (int n = 0; n < bands.band_count(); ++n) {
      out << (d + n ? "," : "") << format_double(bands.values(static_cast<Eigen::Index>(i), n));
    }
    out << '\n';
  }
}

std::vector<double> band_deltas(const OperatorSpec& spec, const Lattice& lattice, const Vector& t0,
                                std::span<const Vector> sequence, double cutoff, int n_bands) {
  const SpectrumAtT reference = eigen_decompose(assemble(spec, lattice, t0, cutoff));
  if (n_bands < 1 || static_cast<std::size_t>(n_bands) > reference.size() / 2) {
    throw Error(Errc::truncation_trust, "band count must lie in [1, N/2]");
  }
  const auto spectra = spectra_along(spec, lattice, sequence, cutoff);
  std::vector<double> deltas;
  deltas.reserve(spectra.size());
  for (const auto& s : spectra) {
    deltas.push_back(
        (s.eigenvalues.head(n_bands) - reference.eigenvalues.head(n_bands)).cwiseAbs().maxCoeff());
  }
  return deltas;
}

EigenvalueCountingReport eigenvalue_counting_certificate(const OperatorSpec& spec,
                                                         const Lattice& lattice, const Vector& t0,
                                                         std::span<const Vector> sequence,
                                                         double cutoff,
                                                         const EigenvalueCountingOptions& options) {
  if (sequence.empty()) throw Error(Errc::invalid_argument, "sequence is empty");
  const SpectrumAtT base = eigen_decompose(assemble(spec, lattice, t0, cutoff));

  EigenvalueCountingReport report;
  report.clusters = cluster_multiplicities(base, options.tolerance);
  report.p_limit = resolve_p_limit(report.clusters, base.size(), options);
  report.gap_bound = min_cluster_gap(report.clusters, report.p_limit);

  const auto spectra = spectra_along(spec, lattice, sequence, cutoff);

  report.pass = true;
  for (double fraction : options.radius_fractions) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
      throw Error(Errc::invalid_argument, "radius fractions must lie in (0, 1)");
    }
    RadiusCertificate cert;
    cert.radius = fraction * report.gap_bound;
    for (std::size_t i = 0; i < spectra.size(); ++i) {
      const auto values = spectra[i].values();
      for (int j = 0; j < report.p_limit; ++j) {
        const double mu = report.clusters.values[static_cast<std::size_t>(j)];
        const int expected = report.clusters.multiplicities[static_cast<std::size_t>(j)];
        const int count = count_in_interval(values, mu, cert.radius);
        bool ok = count == expected;
        for (int n = report.clusters.first(j); ok && n < report.clusters.first(j) + expected; ++n) {
          const double v = values[static_cast<std::size_t>(n)];
          ok = v > mu - cert.radius && v < mu + cert.radius;
        }
        if (!ok) {
          cert.first_index = i + 1;
          cert.witness = CountingWitness{i, sequence[i], j, count, expected};
          break;
        }
      }
    }
    cert.pass = cert.first_index < spectra.size();
    report.pass = report.pass && cert.pass;
    report.radii.push_back(std::move(cert));
  }
  return report;
}

}  // namespace bloch
