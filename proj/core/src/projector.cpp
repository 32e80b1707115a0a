#include "bloch/projector.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "bloch/error.hpp"
#include "bloch/linalg.hpp"
#include "bloch/parallel.hpp"

namespace bloch {

namespace {

constexpr double kContourClearance = 1e-8;
constexpr double kAlignmentFloor = 1e-12;

struct Sample {
  TruncatedOperator op;
  SpectrumAtT spectrum;
};

std::vector<Sample> decompose_all(const OperatorSpec& spec, const Lattice& lattice,
                                  std::span<const Vector> ts, double cutoff) {
  std::vector<Sample> out(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    try {
      out[i].op = assemble(spec, lattice, ts[i], cutoff);
      out[i].spectrum = eigen_decompose(out[i].op);
    } catch (const Error& e) {
      throw Error(e.code(), "sample " + std::to_string(i) + ": " + e.detail());
    }
  });
  return out;
}

void require_simple(const SpectrumAtT& spectrum, int band, const ClusterTolerance& tol,
                    std::size_t sample) {
  const auto n = static_cast<Eigen::Index>(band);
  if (band < 0 || n >= spectrum.eigenvalues.size()) {
    throw Error(Errc::invalid_argument, "band index out of range");
  }
  const auto& ev = spectrum.eigenvalues;
  const bool below = n > 0 && ev[n] - ev[n - 1] <= tol.at(ev[n - 1]);
  const bool above = n + 1 < ev.size() && ev[n + 1] - ev[n] <= tol.at(ev[n]);
  if (below || above) {
    throw Error(Errc::simplicity_violation, "band " + std::to_string(band + 1) +
                                                " is degenerate at sample " + std::to_string(sample));
  }
}

// Planewave alignment when the overlap allows it, otherwise reference alignment.
BlochVector align_with_fallback(const BlochVector& raw, const BlochVector* fallback,
                                double threshold) {
  if (raw.components == 1 && raw.planewave_index &&
      std::abs(raw.coefficients[static_cast<Eigen::Index>(*raw.planewave_index)]) > threshold) {
    return align_phase_to_planewave(raw, threshold);
  }
  if (fallback == nullptr) {
    // The first sample of a scan is its own reference.
    BlochVector anchor = raw;
    anchor.convention = PhaseConvention::reference;
    return anchor;
  }
  return align_phase_to_reference(raw, *fallback);
}

double planewave_modulus(const BlochVector& v) {
  if (v.components != 1 || !v.planewave_index) return 0.0;
  return std::abs(v.coefficients[static_cast<Eigen::Index>(*v.planewave_index)]);
}

}  // namespace

CMatrix riesz_projector_quadrature(const CMatrix& hermitian, const Contour& contour, int nodes) {
  if (nodes < 16) throw Error(Errc::invalid_argument, "quadrature needs at least 16 nodes");
  if (!(contour.radius > 0.0)) throw Error(Errc::invalid_argument, "contour radius must be positive");
  const Eigen::Index n = hermitian.rows();

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::numerical_failure, "eigenvalue solver did not converge");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double clearance = std::abs(std::abs(solver.eigenvalues()[i] - contour.center) - contour.radius);
    if (clearance < kContourClearance) {
      std::ostringstream os;
      os << "eigenvalue " << solver.eigenvalues()[i] << " lies on the contour";
      throw Error(Errc::contour_collision, os.str());
    }
  }

  CMatrix projector = CMatrix::Zero(n, n);
  const CMatrix identity = CMatrix::Identity(n, n);
  for (int k = 0; k < nodes; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / nodes;
    const Complex direction = std::polar(1.0, theta);
    const Complex z = contour.center + contour.radius * direction;
    const CMatrix shifted = z * identity - hermitian;
    Eigen::PartialPivLU<CMatrix> lu(shifted);
    const CMatrix resolvent = lu.solve(identity);
    if (!resolvent.allFinite()) {
      throw Error(Errc::numerical_failure, "singular resolvent on the contour");
    }
    // dz = i r e^{i theta} d theta; the 1/(2 pi i) cancels to r e^{i theta} / nodes.
    projector += (contour.radius * direction / static_cast<double>(nodes)) * resolvent;
  }
  return projector;
}

int quadrature_nodes_for(std::span<const double> eigenvalues, const Contour& contour, double target,
                         int minimum) {
  constexpr int kMaxNodes = 8192;
  double worst = 0.0;
  for (double lambda : eigenvalues) {
    const double rho = std::abs(lambda - contour.center) / contour.radius;
    worst = std::max(worst, rho < 1.0 ? rho : 1.0 / rho);
  }
  if (worst <= 0.0) return minimum;
  const double needed = std::ceil(std::log(target) / std::log(worst));
  if (!(needed < kMaxNodes)) return kMaxNodes;
  return std::max(minimum, static_cast<int>(needed));
}

CMatrix spectral_projector(const SpectrumAtT& spectrum, int first, int count) {
  if (first < 0 || count < 0 || static_cast<std::size_t>(first + count) > spectrum.size()) {
    throw Error(Errc::invalid_argument, "eigenvalue range out of bounds");
  }
  const auto block = spectrum.eigenvectors.middleCols(first, count);
  return block * block.adjoint();
}

CMatrix riesz_projector_eigen(const SpectrumAtT& spectrum, const ClusterDecomposition& clusters,
                              int cluster) {
  if (cluster < 0 || cluster >= clusters.count()) {
    throw Error(Errc::invalid_argument, "cluster index out of range");
  }
  return spectral_projector(spectrum, clusters.first(cluster),
                            clusters.multiplicities[static_cast<std::size_t>(cluster)]);
}

std::string_view to_string(PhaseConvention convention) noexcept {
  switch (convention) {
    case PhaseConvention::raw: return "raw";
    case PhaseConvention::reference: return "reference";
    case PhaseConvention::planewave: return "planewave";
  }
  return "raw";
}

PhaseConvention parse_phase_convention(std::string_view text) {
  if (text == "raw") return PhaseConvention::raw;
  if (text == "reference") return PhaseConvention::reference;
  if (text == "planewave") return PhaseConvention::planewave;
  throw Error(Errc::invalid_argument, "unknown phase convention '" + std::string(text) + "'");
}

BlochVector make_bloch_vector(const TruncatedOperator& op, const SpectrumAtT& spectrum, int band) {
  if (band < 0 || static_cast<std::size_t>(band) >= spectrum.size()) {
    throw Error(Errc::invalid_argument, "band index out of range");
  }
  BlochVector v;
  v.coefficients = spectrum.eigenvectors.col(band);
  v.coefficients.normalize();
  v.t = spectrum.t;
  v.band = band;
  v.components = op.components;
  if (const auto zero = op.find_point(IntVector(static_cast<std::size_t>(op.t.size()), 0))) {
    v.planewave_index = *zero * static_cast<std::size_t>(op.components);
  }
  return v;
}

BlochVector align_phase_to_reference(const BlochVector& psi, const BlochVector& reference) {
  if (psi.coefficients.size() != reference.coefficients.size()) {
    throw Error(Errc::dimension_mismatch, "Bloch vectors live on different bases");
  }
  // (psi_ref, psi) in the convention linear in the first slot is conj(ref^* psi).
  const Complex overlap = reference.coefficients.dot(psi.coefficients);
  const double modulus = std::abs(overlap);
  if (modulus < kAlignmentFloor) {
    throw Error(Errc::alignment_undefined, "vector is orthogonal to its reference");
  }
  BlochVector out = psi;
  out.coefficients = psi.coefficients * (std::conj(overlap) / modulus);
  out.convention = PhaseConvention::reference;
  return out;
}

Complex overlap_with_planewave(const BlochVector& psi) {
  if (psi.components != 1) {
    throw Error(Errc::invalid_argument, "plane-wave overlap is defined for scalar problems only");
  }
  if (!psi.planewave_index) {
    throw Error(Errc::invalid_argument, "gamma = 0 is not in the basis");
  }
  return psi.coefficients[static_cast<Eigen::Index>(*psi.planewave_index)];
}

BlochVector align_phase_to_planewave(const BlochVector& psi, double threshold) {
  const Complex u0 = overlap_with_planewave(psi);
  const double modulus = std::abs(u0);
  if (modulus <= threshold) {
    std::ostringstream os;
    os << "plane-wave overlap " << modulus << " is not above " << threshold;
    throw Error(Errc::overlap_below_threshold, os.str());
  }
  BlochVector out = psi;
  out.coefficients = psi.coefficients * (std::conj(u0) / modulus);
  out.convention = PhaseConvention::planewave;
  return out;
}

OverlapReport planewave_overlap_scan(const OperatorSpec& spec, const Lattice& lattice,
                                     std::span<const Vector> ts, int band, double cutoff,
                                     double threshold) {
  const auto samples = decompose_all(spec, lattice, ts, cutoff);
  OverlapReport report;
  report.threshold = threshold;
  report.pass = true;
  for (const auto& s : samples) {
    const double value = std::abs(overlap_with_planewave(make_bloch_vector(s.op, s.spectrum, band)));
    report.ts.push_back(s.op.t);
    report.values.push_back(value);
    report.pass = report.pass && value > threshold;
  }
  return report;
}

ProjectorScan projector_continuity_scan(const OperatorSpec& spec, const Lattice& lattice,
                                        const Vector& t0, std::span<const Vector> sequence,
                                        int cluster, double cutoff,
                                        const ProjectorScanOptions& options) {
  const TruncatedOperator base_op = assemble(spec, lattice, t0, cutoff);
  const SpectrumAtT base = eigen_decompose(base_op);
  const auto clusters = cluster_multiplicities(base, options.tolerance);
  if (cluster < 0 || cluster >= clusters.count()) {
    throw Error(Errc::invalid_argument, "cluster index out of range");
  }
  const auto j = static_cast<std::size_t>(cluster);
  double half_gap = std::numeric_limits<double>::infinity();
  if (j > 0) half_gap = std::min(half_gap, 0.5 * (clusters.values[j] - clusters.values[j - 1]));
  if (j + 1 < clusters.values.size()) {
    half_gap = std::min(half_gap, 0.5 * (clusters.values[j + 1] - clusters.values[j]));
  }
  if (!std::isfinite(half_gap)) {
    throw Error(Errc::undefined_gap, "cluster has no neighbour to separate from");
  }

  ProjectorScan scan;
  scan.cluster = cluster;
  scan.multiplicity = clusters.multiplicities[j];
  scan.contour = {clusters.values[j], options.radius_fraction * half_gap};
  const int first = clusters.first(cluster);
  const CMatrix reference = spectral_projector(base, first, scan.multiplicity);

  const auto samples = decompose_all(spec, lattice, sequence, cutoff);
  scan.abs_dt.resize(samples.size());
  scan.distance.resize(samples.size());
  scan.quadrature_defect.resize(samples.size());
  scan.nodes.resize(samples.size());

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto values = samples[i].spectrum.values();
    const int count = count_in_interval(values, scan.contour.center, scan.contour.radius);
    bool ok = count == scan.multiplicity;
    for (int n = first; ok && n < first + scan.multiplicity; ++n) {
      ok = std::abs(values[static_cast<std::size_t>(n)] - scan.contour.center) < scan.contour.radius;
    }
    if (!ok) {
      throw Error(Errc::counting_violation,
                  "sample " + std::to_string(i) + " has " + std::to_string(count) +
                      " eigenvalues inside the contour, expected " +
                      std::to_string(scan.multiplicity));
    }
  }

  parallel_for(samples.size(), [&](std::size_t i) {
    const CMatrix projector = spectral_projector(samples[i].spectrum, first, scan.multiplicity);
    scan.nodes[i] = quadrature_nodes_for(samples[i].spectrum.values(), scan.contour, 1e-14, options.nodes);
    const CMatrix quadrature =
        riesz_projector_quadrature(samples[i].op.matrix, scan.contour, scan.nodes[i]);
    scan.abs_dt[i] = (sequence[i] - t0).norm();
    scan.distance[i] = hermitian_operator_norm(projector - reference);
    scan.quadrature_defect[i] = operator_norm(quadrature - projector);
  });
  return scan;
}

BlochScan bloch_continuity_scan(const OperatorSpec& spec, const Lattice& lattice,
                                std::span<const Vector> path, int band, double cutoff,
                                const BlochScanOptions& options) {
  if (path.size() < 2) throw Error(Errc::invalid_argument, "a scan needs at least two samples");
  const auto samples = decompose_all(spec, lattice, path, cutoff);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require_simple(samples[i].spectrum, band, options.tolerance, i);
  }

  BlochScan scan;
  std::vector<BlochVector> chosen;
  chosen.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    BlochVector raw = make_bloch_vector(samples[i].op, samples[i].spectrum, band);
    const BlochVector* previous = i == 0 ? nullptr : &chosen.back();
    switch (options.convention) {
      case PhaseConvention::raw:
        chosen.push_back(std::move(raw));
        break;
      case PhaseConvention::reference:
        chosen.push_back(previous ? align_phase_to_reference(raw, *previous) : raw);
        break;
      case PhaseConvention::planewave:
        chosen.push_back(align_with_fallback(raw, previous, options.overlap_threshold));
        break;
    }
    scan.applied.push_back(chosen.back().convention);
    if (spec.components == 1) scan.overlap.push_back(planewave_modulus(chosen.back()));
  }
  for (std::size_t i = 0; i + 1 < chosen.size(); ++i) {
    scan.abs_dt.push_back((path[i + 1] - path[i]).norm());
    scan.difference.push_back((chosen[i + 1].coefficients - chosen[i].coefficients).norm());
  }
  return scan;
}

BlochScan bloch_deviation_scan(const OperatorSpec& spec, const Lattice& lattice, const Vector& t0,
                               std::span<const Vector> sequence, int band, double cutoff,
                               const BlochScanOptions& options) {
  const TruncatedOperator base_op = assemble(spec, lattice, t0, cutoff);
  const SpectrumAtT base_spectrum = eigen_decompose(base_op);
  require_simple(base_spectrum, band, options.tolerance, 0);
  BlochVector base = make_bloch_vector(base_op, base_spectrum, band);
  if (options.convention == PhaseConvention::planewave) {
    base = align_with_fallback(base, nullptr, options.overlap_threshold);
  }

  const auto samples = decompose_all(spec, lattice, sequence, cutoff);
  BlochScan scan;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require_simple(samples[i].spectrum, band, options.tolerance, i + 1);
    BlochVector v = make_bloch_vector(samples[i].op, samples[i].spectrum, band);
    switch (options.convention) {
      case PhaseConvention::raw:
        break;
      case PhaseConvention::reference:
        v = align_phase_to_reference(v, base);
        break;
      case PhaseConvention::planewave:
        v = align_with_fallback(v, &base, options.overlap_threshold);
        break;
    }
    scan.abs_dt.push_back((sequence[i] - t0).norm());
    scan.difference.push_back((v.coefficients - base.coefficients).norm());
    scan.applied.push_back(v.convention);
    if (spec.components == 1) scan.overlap.push_back(planewave_modulus(v));
  }
  return scan;
}

}  // namespace bloch
