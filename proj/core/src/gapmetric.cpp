#include "bloch/gapmetric.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "bloch/error.hpp"
#include "bloch/linalg.hpp"
#include "bloch/parallel.hpp"

namespace bloch {

namespace {

// Orthonormal basis of the column space of [I; A].
CMatrix graph_basis(const CMatrix& a) {
  if (a.rows() != a.cols()) throw Error(Errc::dimension_mismatch, "operator matrix is not square");
  const Eigen::Index n = a.rows();
  CMatrix stacked(2 * n, n);
  stacked.topRows(n).setIdentity();
  stacked.bottomRows(n) = a;
  Eigen::HouseholderQR<CMatrix> qr(stacked);
  return qr.householderQ() * CMatrix::Identity(2 * n, n);
}

double directed_from_bases(const CMatrix& qa, const CMatrix& qb) {
  // (I - Q_B Q_B^*) Q_A has the same nonzero singular values as (I - P_B) P_A.
  const CMatrix residual = qa - qb * (qb.adjoint() * qa);
  return std::clamp(operator_norm(residual), 0.0, 1.0);
}

void require_same_size(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::dimension_mismatch, "operators act on spaces of different dimension");
  }
}

}  // namespace

CMatrix graph_projection(const CMatrix& a) {
  const CMatrix q = graph_basis(a);
  return q * q.adjoint();
}

double directed_gap(const CMatrix& a, const CMatrix& b) {
  require_same_size(a, b);
  return directed_from_bases(graph_basis(a), graph_basis(b));
}

GapResult gap(const CMatrix& a, const CMatrix& b) {
  require_same_size(a, b);
  const CMatrix qa = graph_basis(a);
  const CMatrix qb = graph_basis(b);
  GapResult r;
  r.directed_ab = directed_from_bases(qa, qb);
  r.directed_ba = directed_from_bases(qb, qa);
  r.gap = std::max(r.directed_ab, r.directed_ba);
  return r;
}

std::vector<GapSample> gap_continuity_scan(const OperatorSpec& spec, const Lattice& lattice,
                                           const Vector& t0, std::span<const Vector> sequence,
                                           double cutoff) {
  const TruncatedOperator base = assemble(spec, lattice, t0, cutoff);
  const CMatrix qbase = graph_basis(base.matrix);
  std::vector<GapSample> out(sequence.size());
  parallel_for(sequence.size(), [&](std::size_t i) {
    try {
      const TruncatedOperator op = assemble(spec, lattice, sequence[i], cutoff);
      const CMatrix q = graph_basis(op.matrix);
      GapSample& s = out[i];
      s.abs_dt = (sequence[i] - t0).norm();
      s.gap = std::max(directed_from_bases(q, qbase), directed_from_bases(qbase, q));
      s.ratio = s.abs_dt > 0.0 ? s.gap / s.abs_dt : 0.0;
    } catch (const Error& e) {
      throw Error(e.code(), "sample " + std::to_string(i) + ": " + e.detail());
    }
  });
  return out;
}

void write_gap_csv(std::ostream& os, std::span<const GapSample> samples) {
  os << "abs_dt,gap,ratio\n";
  char buf[96];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.abs_dt, s.gap, s.ratio);
    os << buf;
  }
}

}  // namespace bloch
