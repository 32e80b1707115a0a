#include "bloch/operator.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "bloch/error.hpp"
#include "bloch/linalg.hpp"

namespace bloch {

namespace {

using PointIndex = std::map<IntVector, std::size_t>;

PointIndex index_points(std::span<const DualPoint> points) {
  PointIndex index;
  for (std::size_t i = 0; i < points.size(); ++i) index.emplace(points[i].coords, i);
  return index;
}

IntVector add(const IntVector& a, const IntVector& b) {
  IntVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

std::map<IntVector, CMatrix> sum_by_frequency(const std::vector<FourierCoefficient>& modes) {
  std::map<IntVector, CMatrix> out;
  for (const auto& mode : modes) {
    auto [it, inserted] = out.emplace(mode.frequency, mode.matrix);
    if (!inserted) it->second += mode.matrix;
  }
  return out;
}

std::string describe(const IntVector& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

void check_modes(const std::vector<FourierCoefficient>& modes, int d, int m,
                 const std::string& where) {
  for (const auto& mode : modes) {
    if (static_cast<int>(mode.frequency.size()) != d) {
      throw Error(Errc::validation_error, where + ": frequency " + describe(mode.frequency) +
                                              " has wrong dimension");
    }
    if (mode.matrix.rows() != m || mode.matrix.cols() != m) {
      throw Error(Errc::validation_error,
                  where + ": coefficient at " + describe(mode.frequency) + " is not m x m");
    }
    if (!mode.matrix.allFinite()) {
      throw Error(Errc::validation_error,
                  where + ": coefficient at " + describe(mode.frequency) + " is not finite");
    }
  }
}

}  // namespace

void OperatorSpec::validate() const {
  if (dimension < 1) throw Error(Errc::validation_error, "dimension must be >= 1");
  if (components < 1) throw Error(Errc::validation_error, "m must be >= 1");
  if (order_s < 1) throw Error(Errc::validation_error, "order_s must be >= 1");
  if (principal.empty()) throw Error(Errc::validation_error, "principal part is empty");
  for (std::size_t i = 0; i < principal.size(); ++i) {
    const auto& term = principal[i];
    if (term.alpha.dimension() != dimension || term.alpha.order() != 2 * order_s) {
      throw Error(Errc::validation_error, "principal[" + std::to_string(i) +
                                              "]: multi-index must have order 2s = " +
                                              std::to_string(2 * order_s));
    }
    if (!std::isfinite(term.q)) {
      throw Error(Errc::validation_error, "principal[" + std::to_string(i) + "]: q is not finite");
    }
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const auto& term = lower[i];
    const std::string where = "lower[" + std::to_string(i) + "]";
    if (term.alpha.dimension() != dimension || term.alpha.order() > 2 * order_s - 1) {
      throw Error(Errc::validation_error,
                  where + ": multi-index must have order <= 2s-1 = " + std::to_string(2 * order_s - 1));
    }
    for (int c : term.alpha.components) {
      if (c < 0) throw Error(Errc::validation_error, where + ": negative multi-index component");
    }
    check_modes(term.coefficients, dimension, components, where);
  }
  check_modes(multiplier, dimension, components, "multiplier");
}

double principal_symbol(const OperatorSpec& spec, const Vector& xi) {
  double value = 0.0;
  for (const auto& term : spec.principal) value += term.q * monomial(term.alpha, xi);
  return value;
}

std::optional<std::size_t> TruncatedOperator::find_point(const IntVector& coords) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].coords == coords) return i;
  }
  return std::nullopt;
}

CMatrix OperatorParts::differential() const {
  CMatrix out = lower;
  out.diagonal() += principal.cast<Complex>();
  return out;
}

CMatrix OperatorParts::total() const {
  CMatrix out = differential();
  out += multiplier;
  return out;
}

OperatorParts assemble_parts(const OperatorSpec& spec, const Lattice& lattice, const Vector& t,
                             std::span<const DualPoint> points) {
  if (t.size() != lattice.dimension() || spec.dimension != lattice.dimension()) {
    throw Error(Errc::dimension_mismatch, "spec, lattice and quasimomentum dimensions differ");
  }
  const auto m = static_cast<Eigen::Index>(spec.components);
  const auto n = static_cast<Eigen::Index>(points.size()) * m;
  const PointIndex index = index_points(points);

  OperatorParts parts{Vector::Zero(n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};

  std::vector<Vector> kappa;
  kappa.reserve(points.size());
  for (const auto& p : points) kappa.push_back(p.cartesian + t);

  for (std::size_t p = 0; p < points.size(); ++p) {
    const double symbol = principal_symbol(spec, kappa[p]);
    parts.principal.segment(static_cast<Eigen::Index>(p) * m, m).setConstant(symbol);
  }

  // Column (gamma', k') receives Qhat_a(gamma - gamma') (gamma' + t)^a in row gamma.
  for (const auto& term : spec.lower) {
    const auto modes = sum_by_frequency(term.coefficients);
    for (std::size_t col = 0; col < points.size(); ++col) {
      const double mono = monomial(term.alpha, kappa[col]);
      if (mono == 0.0) continue;
      for (const auto& [freq, coeff] : modes) {
        const auto row = index.find(add(points[col].coords, freq));
        if (row == index.end()) continue;
        parts.lower.block(static_cast<Eigen::Index>(row->second) * m,
                          static_cast<Eigen::Index>(col) * m, m, m) += coeff * mono;
      }
    }
  }

  const auto multiplier = sum_by_frequency(spec.multiplier);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto it = multiplier.find(points[p].coords);
    if (it == multiplier.end()) continue;
    const auto offset = static_cast<Eigen::Index>(p) * m;
    parts.multiplier.block(offset, offset, m, m) = it->second;
  }
  return parts;
}

TruncatedOperator assemble(const OperatorSpec& spec, const Lattice& lattice, const Vector& t,
                           double cutoff) {
  for (const auto& term : spec.lower) {
    for (const auto& mode : term.coefficients) {
      if (lattice.dual_point(mode.frequency).norm() > 2.0 * cutoff) {
        throw Error(Errc::invalid_argument, "cutoff too small for coefficient frequency " +
                                                describe(mode.frequency));
      }
    }
  }
  TruncatedOperator op;
  op.t = t;
  op.cutoff = cutoff;
  op.components = spec.components;
  op.points = enumerate_dual_points(lattice, cutoff);

  CMatrix matrix = assemble_parts(spec, lattice, t, op.points).total();
  const double defect = hermiticity_defect(matrix);
  if (defect > kHermiticityTolerance) {
    std::ostringstream os;
    os << "assembled matrix has Hermiticity defect " << defect;
    throw Error(Errc::non_self_adjoint, os.str());
  }
  op.matrix = 0.5 * (matrix + matrix.adjoint());
  return op;
}

SelfAdjointnessReport check_self_adjointness(const OperatorSpec& spec, const Lattice& lattice,
                                             std::span<const Vector> trial_ts, double cutoff) {
  if (trial_ts.empty()) throw Error(Errc::invalid_argument, "need at least one trial t");
  const auto points = enumerate_dual_points(lattice, cutoff);
  SelfAdjointnessReport report;
  report.worst_t = trial_ts.front();
  for (const auto& t : trial_ts) {
    const double defect = hermiticity_defect(assemble_parts(spec, lattice, t, points).total());
    if (defect > report.max_defect) {
      report.max_defect = defect;
      report.worst_t = t;
    }
  }
  report.pass = report.max_defect <= kHermiticityTolerance;
  return report;
}

double verify_modulation_identity(const OperatorSpec& spec, const Lattice& lattice,
                                  const Vector& t0, const IntVector& shift, const CVector& u,
                                  double cutoff) {
  if (static_cast<int>(shift.size()) != lattice.dimension()) {
    throw Error(Errc::dimension_mismatch, "shift dimension differs from lattice dimension");
  }
  const auto points = enumerate_dual_points(lattice, cutoff);
  const auto m = static_cast<Eigen::Index>(spec.components);
  if (u.size() != static_cast<Eigen::Index>(points.size()) * m) {
    throw Error(Errc::dimension_mismatch, "coefficient array does not match the truncated basis");
  }
  const Vector shift_cart = lattice.dual_point(shift);
  const double shift_norm = shift_cart.norm();

  for (std::size_t p = 0; p < points.size(); ++p) {
    if (u.segment(static_cast<Eigen::Index>(p) * m, m).isZero(0.0)) continue;
    if (points[p].cartesian.norm() + shift_norm > cutoff * (1.0 + 1e-12)) {
      throw Error(Errc::unsupported_shift, "support point " + describe(points[p].coords) +
                                               " is within |shift| of the cutoff sphere");
    }
  }

  const PointIndex index = index_points(points);
  CVector shifted = CVector::Zero(u.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto src = index.find(add(points[p].coords, shift));
    if (src == index.end()) continue;
    shifted.segment(static_cast<Eigen::Index>(p) * m, m) =
        u.segment(static_cast<Eigen::Index>(src->second) * m, m);
  }
  const CVector lhs =
      assemble_parts(spec, lattice, t0 + shift_cart, points).differential() * shifted;

  // A_{t0} u evaluated on a basis large enough to hold every shifted row.
  const auto wide = enumerate_dual_points(lattice, cutoff + shift_norm + 1e-9 * (1.0 + cutoff));
  const PointIndex wide_index = index_points(wide);
  CVector embedded = CVector::Zero(static_cast<Eigen::Index>(wide.size()) * m);
  for (std::size_t p = 0; p < points.size(); ++p) {
    embedded.segment(static_cast<Eigen::Index>(wide_index.at(points[p].coords)) * m, m) =
        u.segment(static_cast<Eigen::Index>(p) * m, m);
  }
  const CVector image = assemble_parts(spec, lattice, t0, wide).differential() * embedded;

  CVector rhs(u.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto row = wide_index.at(add(points[p].coords, shift));
    rhs.segment(static_cast<Eigen::Index>(p) * m, m) =
        image.segment(static_cast<Eigen::Index>(row) * m, m);
  }
  return (lhs - rhs).norm();
}

double operator_lipschitz_constant(const OperatorSpec& spec, const Lattice& lattice,
                                   std::span<const std::pair<Vector, Vector>> pairs,
                                   double cutoff) {
  if (pairs.empty()) throw Error(Errc::invalid_argument, "need at least one pair of points");
  double constant = 0.0;
  for (const auto& [a, b] : pairs) {
    const double distance = (a - b).norm();
    if (distance == 0.0) continue;
    const auto ma = assemble(spec, lattice, a, cutoff);
    const auto mb = assemble(spec, lattice, b, cutoff);
    constant = std::max(constant, hermitian_operator_norm(ma.matrix - mb.matrix) / distance);
  }
  return constant;
}

}  // namespace bloch
