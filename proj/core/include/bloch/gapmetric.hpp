#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bloch/lattice.hpp"
#include "bloch/operator.hpp"
#include "bloch/types.hpp"

namespace bloch {

/// Orthogonal projection of C^{2N} onto the graph {(u, Au)}.
CMatrix graph_projection(const CMatrix& a);

/// ||(I - P_B) P_A||: the largest distance from a unit vector of G(A) to G(B).
double directed_gap(const CMatrix& a, const CMatrix& b);

struct GapResult {
  double directed_ab = 0.0;
  double directed_ba = 0.0;
  double gap = 0.0;
};

GapResult gap(const CMatrix& a, const CMatrix& b);

struct GapSample {
  double abs_dt = 0.0;
  double gap = 0.0;
  /// gap / abs_dt, or 0 when abs_dt = 0.
  double ratio = 0.0;
};

/// Gaps between the truncated operators at t_i and at t0.
std::vector<GapSample> gap_continuity_scan(const OperatorSpec& spec, const Lattice& lattice,
                                           const Vector& t0, std::span<const Vector> sequence,
                                           double cutoff);

/// CSV with header abs_dt,gap,ratio.
void write_gap_csv(std::ostream& os, std::span<const GapSample> samples);

}  // namespace bloch
