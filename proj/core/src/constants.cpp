#include "bloch/constants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

#include "bloch/error.hpp"
#include "bloch/linalg.hpp"
#include "bloch/parallel.hpp"

namespace bloch {

namespace {

constexpr std::array<int, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t i, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (i > 0) {
    result += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

double homogeneous_ratio(const OperatorSpec& spec, const Vector& xi) {
  return principal_symbol(spec, xi) / std::pow(xi.squaredNorm(), spec.order_s);
}

std::vector<Vector> sphere_samples(int d, int n) {
  std::vector<Vector> out;
  if (d == 1) {
    out.push_back(Vector::Constant(1, 1.0));
    out.push_back(Vector::Constant(1, -1.0));
    return out;
  }
  if (d == 2) {
    for (int k = 0; k < n; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / n;
      Vector xi(2);
      xi << std::cos(theta), std::sin(theta);
      out.push_back(xi);
    }
    return out;
  }
  for (int i = 0; i < d; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector xi = Vector::Zero(d);
      xi[i] = sign;
      out.push_back(xi);
    }
  }
  if (d <= 10) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vector xi(d);
      for (int i = 0; i < d; ++i) xi[i] = (mask >> i) & 1 ? -1.0 : 1.0;
      out.push_back(xi);
    }
  }
  // Halton points of the cube [-1, 1]^d projected radially.
  for (std::uint64_t i = 1; static_cast<int>(out.size()) < n + 4 * d; ++i) {
    Vector xi(d);
    for (int k = 0; k < d; ++k) {
      xi[k] = 2.0 * radical_inverse(i, kPrimes[static_cast<std::size_t>(k) % kPrimes.size()]) - 1.0;
    }
    if (xi.norm() > 1e-6) out.push_back(xi);
  }
  return out;
}

// Coordinate pattern search on the sphere, starting from a unit vector.
std::pair<double, Vector> refine_minimum(const OperatorSpec& spec, Vector xi, double value) {
  double step = 0.05;
  for (int iter = 0; iter < 10000 && step > 1e-13; ++iter) {
    bool improved = false;
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector trial = xi;
        trial[i] += sign * step;
        trial.normalize();
        const double v = homogeneous_ratio(spec, trial);
        if (v < value) {
          value = v;
          xi = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {value, xi};
}

// Largest root of f on (0, inf), f(0) < 0 and f eventually positive with one sign change.
double positive_root(const std::function<double(double)>& f) {
  double hi = 1.0;
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw Error(Errc::numerical_failure, "root bracketing diverged");
  }
  double lo = 0.0;
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi;
}

// sup of a smooth function on [0, r_max]: dense grid, then golden section around the best node.
double interval_sup(const std::function<double(double)>& f, double r_max) {
  if (r_max <= 0.0) return f(0.0);
  constexpr int kGrid = 4096;
  int best = 0;
  double best_value = f(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = f(r_max * i / kGrid);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = r_max * std::max(best - 1, 0) / kGrid;
  double b = r_max * std::min(best + 1, kGrid) / kGrid;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, r_max); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return std::max({best_value, f1, f2});
}

std::vector<CVector> battery(const std::vector<DualPoint>& points, int m, double cutoff,
                             std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(points.size()) * m;
  std::vector<CVector> out;
  const Eigen::Index basis_count = std::min<Eigen::Index>(n, 512);
  for (Eigen::Index i = 0; i < basis_count; ++i) out.push_back(CVector::Unit(n, i));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 32; ++k) {
    CVector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = Complex(normal(rng), normal(rng));
    out.push_back(u.normalized());
  }

  auto profile = [&](const std::function<double(double)>& weight, bool random_phase) {
    CVector u(n);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double w = weight(points[p].cartesian.norm());
      for (int k = 0; k < m; ++k) {
        const Complex phase = random_phase ? std::polar(1.0, angle(rng)) : Complex(1.0);
        u[static_cast<Eigen::Index>(p) * m + k] = w * phase;
      }
    }
    if (u.norm() > 0.0) out.push_back(u.normalized());
  };
  for (double width : {0.125, 0.25, 0.5, 1.0}) {
    const double sigma = width * cutoff;
    for (bool phase : {false, true}) {
      profile([sigma](double r) { return std::exp(-0.5 * r * r / (sigma * sigma)); }, phase);
    }
  }
  for (int power : {2, 4, 8}) {
    profile([cutoff, power](double r) { return std::pow(r / cutoff, power); }, true);
  }
  return out;
}

struct SampleResult {
  double battery_margin = std::numeric_limits<double>::infinity();
  double chain_margin = std::numeric_limits<double>::infinity();
  double resolvent = 0.0;
  double relative = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  std::optional<RelativeBoundWitness> witness;
};

}  // namespace

EllipticityReport check_ellipticity(const OperatorSpec& spec, int n_samples) {
  spec.validate();
  if (std::all_of(spec.principal.begin(), spec.principal.end(),
                  [](const PrincipalTerm& t) { return t.q == 0.0; })) {
    throw Error(Errc::degenerate_symbol, "principal symbol is identically zero");
  }
  const auto samples = sphere_samples(spec.dimension, std::max(n_samples, 8));
  EllipticityReport report;
  report.samples = static_cast<int>(samples.size());
  report.c2 = std::numeric_limits<double>::infinity();
  for (const auto& xi : samples) {
    const double v = homogeneous_ratio(spec, xi);
    if (v < report.c2) {
      report.c2 = v;
      report.min_direction = xi.normalized();
    }
  }
  if (spec.dimension > 1) {
    std::tie(report.c2, report.min_direction) =
        refine_minimum(spec, report.min_direction, report.c2);
  }
  report.pass = report.c2 > kEllipticityFloor;
  return report;
}

LowerOrderBound bound_lower_order(const OperatorSpec& spec) {
  std::map<std::pair<MultiIndex, IntVector>, CMatrix> lower;
  for (const auto& term : spec.lower) {
    for (const auto& c : term.coefficients) {
      auto [it, inserted] = lower.try_emplace({term.alpha, c.frequency}, c.matrix);
      if (!inserted) it->second += c.matrix;
    }
  }
  std::map<IntVector, CMatrix> multiplier;
  for (const auto& c : spec.multiplier) {
    auto [it, inserted] = multiplier.try_emplace(c.frequency, c.matrix);
    if (!inserted) it->second += c.matrix;
  }
  LowerOrderBound bound;
  for (const auto& [key, matrix] : lower) bound.c1 += operator_norm(matrix);
  for (const auto& [key, matrix] : multiplier) {
    bound.multiplier_bound = std::max(bound.multiplier_bound, operator_norm(matrix));
  }
  return bound;
}

double lower_order_weight(int dimension, int order_s, double r) {
  double sum = 0.0;
  double power = 1.0;
  for (int k = 0; k < 2 * order_s; ++k) {
    sum += static_cast<double>(multi_index_count(dimension, k)) * power;
    power *= r;
  }
  return sum;
}

double cauchy_schwarz_count(int dimension, int order_s) {
  return lower_order_weight(dimension, order_s, 1.0);
}

CoercivityReport coercivity_shift(const CoercivityInputs& in, const Lattice& lattice,
                                  double enumeration_cap) {
  if (!(in.epsilon > 0.0)) throw Error(Errc::invalid_argument, "epsilon must be positive");
  if (!(in.c2 > 0.0)) throw Error(Errc::degenerate_symbol, "c2 must be positive");
  if (in.dimension != lattice.dimension()) {
    throw Error(Errc::dimension_mismatch, "lattice dimension differs from the operator's");
  }
  CoercivityReport r;
  r.c1 = in.c1;
  r.c2 = in.c2;
  r.c3 = cauchy_schwarz_count(in.dimension, in.order_s);
  r.epsilon = in.epsilon;
  r.dimension = in.dimension;
  r.order_s = in.order_s;

  const double k = std::sqrt(r.c3) * (in.c1 + in.epsilon);
  const int s2 = 2 * in.order_s;
  auto deficit = [&](double radius) {
    return k * lower_order_weight(in.dimension, in.order_s, radius) - in.c2 * std::pow(radius, s2);
  };

  r.c4 = positive_root([&](double radius) { return -deficit(radius); });
  if (enumeration_cap < r.c4) {
    std::ostringstream os;
    os << "enumeration cap " << enumeration_cap << " is below c4 = " << r.c4;
    throw Error(Errc::insufficient_enumeration, os.str());
  }

  const auto points = enumerate_dual_points(lattice, r.c4);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) worst = std::max(worst, deficit(p.cartesian.norm()));
  r.lattice_points_checked = points.size();
  r.c_lattice = std::max(worst, 0.0) + kCoercivityMargin;
  r.radial_sup = interval_sup(deficit, r.c4);
  r.c = std::max({worst, r.radial_sup, 0.0}) + kCoercivityMargin;
  r.verified_range = r.c4;

  r.symbol_certified = std::all_of(points.begin(), points.end(), [&](const DualPoint& p) {
    return deficit(p.cartesian.norm()) < r.c;
  });
  return r;
}

CoercivityReport compute_coercivity_shift(const OperatorSpec& spec, const Lattice& lattice,
                                          double epsilon, double enumeration_cap) {
  const auto ellipticity = check_ellipticity(spec);
  if (!ellipticity.pass) {
    std::ostringstream os;
    os << "principal symbol is not elliptic: minimum " << ellipticity.c2;
    throw Error(Errc::degenerate_symbol, os.str());
  }
  const auto bound = bound_lower_order(spec);
  return coercivity_shift({spec.dimension, spec.order_s, bound.c1, ellipticity.c2, epsilon},
                          lattice, enumeration_cap);
}

RelativeBoundReport check_relative_bound(const OperatorSpec& spec, const Lattice& lattice,
                                         const CoercivityReport& co, double cutoff,
                                         std::span<const Vector> trial_ts, std::uint64_t seed) {
  if (trial_ts.empty()) throw Error(Errc::invalid_argument, "no trial quasimomenta");
  const auto bound = bound_lower_order(spec);
  const double sqrt_c3 = std::sqrt(co.c3);
  const int s2 = 2 * co.order_s;

  RelativeBoundReport r;
  r.multiplier_bound = bound.multiplier_bound;
  double core = 0.0;
  if (co.c1 > 0.0) {
    auto excess = [&](double radius) {
      return co.c1 * sqrt_c3 * lower_order_weight(co.dimension, co.order_s, radius) -
             0.5 * (co.c2 * std::pow(radius, s2) + co.c);
    };
    const double reach = positive_root([&](double radius) {
      return 0.5 * co.c2 * std::pow(radius, s2) -
             co.c1 * sqrt_c3 * lower_order_weight(co.dimension, co.order_s, radius);
    });
    core = std::max(0.0, interval_sup(excess, reach));
  }
  r.c5 = core + bound.multiplier_bound;
  r.c6 = 2.0 * r.c5 + 1.0;
  r.condition_value = r.c5 / r.c6 + 0.5;

  const auto points = enumerate_dual_points(lattice, cutoff);
  const auto vectors = battery(points, spec.components, cutoff, seed);
  const auto alphas = multi_indices_up_to(spec.dimension, s2 - 1);
  const auto m = static_cast<Eigen::Index>(spec.components);

  std::vector<SampleResult> results(trial_ts.size());
  parallel_for(trial_ts.size(), [&](std::size_t ti) {
    const Vector& t = trial_ts[ti];
    const OperatorParts parts = assemble_parts(spec, lattice, t, points);
    const Vector h = parts.principal.array() + co.c;
    const CMatrix perturbation = parts.lower + parts.multiplier;
    const auto n = h.size();

    std::vector<Vector> derivative(alphas.size(), Vector(n));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      for (std::size_t p = 0; p < points.size(); ++p) {
        const double mono = monomial(alphas[a], points[p].cartesian + t);
        derivative[a].segment(static_cast<Eigen::Index>(p) * m, m).setConstant(mono);
      }
    }

    SampleResult& out = results[ti];
    for (const auto& u : vectors) {
      const double lhs = (perturbation * u).norm();
      const double shifted = (h.cast<Complex>().asDiagonal() * u).norm();
      const double rhs = r.c5 * u.norm() + 0.5 * shifted;
      const double margin = (rhs - lhs) / std::max(1.0, rhs);
      if (margin < out.battery_margin) {
        out.battery_margin = margin;
        if (margin < -1e-9) out.witness = RelativeBoundWitness{t, u, lhs, rhs};
      }
      double derivatives = 0.0;
      for (const auto& w : derivative) derivatives += (w.cast<Complex>().asDiagonal() * u).norm();
      const double chain = (shifted - (co.c1 + co.epsilon) * derivatives) / std::max(1.0, shifted);
      out.chain_margin = std::min(out.chain_margin, chain);
    }

    for (Eigen::Index j = 0; j < n; ++j) {
      const double modulus = std::hypot(h[j], r.c6);
      out.resolvent = std::max(out.resolvent, 1.0 / modulus);
      out.relative = std::max(out.relative, std::abs(h[j]) / modulus);
    }

    CMatrix total = parts.total();
    total.diagonal().array() += co.c;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (total + total.adjoint()),
                                                  Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw Error(Errc::numerical_failure, "eigenvalue solver did not converge");
    }
    out.min_eigenvalue = solver.eigenvalues()[0];
  });

  r.battery_size = vectors.size() * trial_ts.size();
  r.battery_margin = std::numeric_limits<double>::infinity();
  r.chain_margin = std::numeric_limits<double>::infinity();
  r.min_shifted_eigenvalue = std::numeric_limits<double>::infinity();
  double resolvent = 0.0;
  double relative = 0.0;
  for (const auto& s : results) {
    r.battery_margin = std::min(r.battery_margin, s.battery_margin);
    r.chain_margin = std::min(r.chain_margin, s.chain_margin);
    r.min_shifted_eigenvalue = std::min(r.min_shifted_eigenvalue, s.min_eigenvalue);
    resolvent = std::max(resolvent, s.resolvent);
    relative = std::max(relative, s.relative);
    if (!r.witness && s.witness) r.witness = s.witness;
  }
  r.condition_value_truncated = r.c5 * resolvent + 0.5 * relative;
  r.battery_pass = r.battery_margin >= -1e-9;
  r.chain_pass = r.chain_margin >= -1e-9;
  r.below_bounded = r.min_shifted_eigenvalue >= -1e-6 * std::max(1.0, co.c1);
  r.pass = r.battery_pass && r.chain_pass && r.c6 > 2.0 * r.c5 && r.condition_value < 1.0;
  return r;
}

}  // namespace bloch
