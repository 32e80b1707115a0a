#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bloch/constants.hpp"
#include "bloch/gapmetric.hpp"
#include "bloch/problem.hpp"
#include "bloch/projector.hpp"
#include "bloch/report.hpp"
#include "bloch/spectral.hpp"

namespace bloch {

struct CertifyOptions {
  Vector t0;
  double cutoff = 16.0;
  int n_bands = 4;
  /// Zero-based band followed by the Bloch-function scans.
  int band = 0;
  double epsilon = kDefaultEpsilon;
  std::uint64_t seed = kDefaultSeed;
  ClusterTolerance tolerance{};
  double overlap_threshold = kDefaultOverlapThreshold;
  /// Conventions whose final deviation is gated. Raw differences are always
  /// reported for the aligned-not-above-raw check.
  std::vector<PhaseConvention> conventions{PhaseConvention::reference, PhaseConvention::planewave};
};

inline constexpr double kContinuityTarget = 1e-6;
inline constexpr double kQuadratureTarget = 1e-8;
inline constexpr double kGapRatioSpread = 2.0;
inline constexpr double kDeltaRatioLow = 0.3;
inline constexpr double kDeltaRatioHigh = 0.7;
inline constexpr int kTrialQuasimomenta = 16;

struct CertifySection {
  std::string name{};
  bool pass = false;
  bool skipped = false;
  std::string message{};
  Json data = Json::object();
};

struct CertifyReport {
  std::vector<CertifySection> sections;
  bool pass = false;
  std::optional<std::string> failing_section;

  [[nodiscard]] Json to_json() const;
};

/// t0 + 2^{-i} e_1 for i = 1..10, then t0 + 1e-7 e_1.
std::vector<Vector> certify_sequence(const Vector& t0);

/// t0 + h0 2^{-i} e_1 for i = 0..halvings.
std::vector<Vector> halving_sequence(const Vector& t0, double h0, int halvings);

/// Seeded uniform samples of the centred cell of the dual lattice.
std::vector<Vector> trial_quasimomenta(const Lattice& lattice, int count, std::uint64_t seed);

/// True when every one of the first n_bands + 1 eigenvalues at t0 is simple
/// and 2 t0 has no integer coordinate in the dual basis.
bool is_generic_point(const SpectrumAtT& spectrum, const Lattice& lattice, int n_bands,
                      const ClusterTolerance& tolerance);

/// Constants chain, eigenvalue counting, band deltas, Bloch and projector
/// continuity and gap ratios at t0. Sections after a failed ellipticity check
/// are skipped.
CertifyReport run_certify(const Problem& problem, const CertifyOptions& options);

struct ConstantsOptions {
  double epsilon = kDefaultEpsilon;
  double enumeration_cap = kDefaultEnumerationCap;
  double cutoff = 16.0;
  std::uint64_t seed = kDefaultSeed;
};

/// The constants chain alone; `pass` reflects every stage.
Json run_constants(const Problem& problem, const ConstantsOptions& options, bool& pass);

}  // namespace bloch
