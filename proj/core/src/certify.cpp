#include "bloch/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bloch/error.hpp"
#include "bloch/projector.hpp"

namespace bloch {

namespace {

constexpr double kGapRange = 1.0 / 8.0;
constexpr double kDeltaStep = 0.1;
constexpr int kDeltaHalvings = 5;

Vector unit_step(const Vector& t0, double h) {
  Vector t = t0;
  t[0] += h;
  return t;
}

// Runs scan(tail) on the longest tail of the sequence on which it succeeds.
// Only counting and simplicity failures move the start; these hold from some
// index on when the certificates apply.
template <typename Scan>
auto on_longest_tail(const std::vector<Vector>& sequence, Scan&& scan, std::size_t& start) {
  for (start = 0;; ++start) {
    try {
      return scan(std::span<const Vector>(sequence).subspan(start));
    } catch (const Error& e) {
      const bool recoverable =
          e.code() == Errc::counting_violation || e.code() == Errc::simplicity_violation;
      if (!recoverable || start + 1 >= sequence.size()) throw;
    }
  }
}

template <typename Body>
void run_section(CertifySection& section, Body&& body) {
  try {
    body(section);
  } catch (const Error& e) {
    section.pass = false;
    section.message = e.what();
  }
}

struct ConstantsOutcome {
  bool elliptic = false;
  bool pass = false;
  Json data = Json::object();
  std::string message;
};

ConstantsOutcome constants_chain(const Problem& problem, double epsilon, double cap, double cutoff,
                                 std::uint64_t seed) {
  ConstantsOutcome out;
  const auto ellipticity = check_ellipticity(problem.spec);
  out.data["ellipticity"] = to_json(ellipticity);
  out.elliptic = ellipticity.pass;
  if (!ellipticity.pass) {
    out.message = "principal symbol is not elliptic";
    return out;
  }
  const auto bound = bound_lower_order(problem.spec);
  out.data["lower_order"] = to_json(bound);
  const auto coercivity = coercivity_shift(
      {problem.spec.dimension, problem.spec.order_s, bound.c1, ellipticity.c2, epsilon},
      problem.lattice, cap);
  out.data["coercivity"] = to_json(coercivity);
  const auto ts = trial_quasimomenta(problem.lattice, kTrialQuasimomenta, seed);
  const auto relative =
      check_relative_bound(problem.spec, problem.lattice, coercivity, cutoff, ts, seed);
  out.data["relative_bound"] = to_json(relative);
  out.pass = coercivity.symbol_certified && relative.pass && relative.below_bounded;
  if (!out.pass) out.message = "constants chain not certified";
  return out;
}

}  // namespace

std::vector<Vector> certify_sequence(const Vector& t0) {
  std::vector<Vector> out;
  for (int i = 1; i <= 10; ++i) out.push_back(unit_step(t0, std::ldexp(1.0, -i)));
  out.push_back(unit_step(t0, 1e-7));
  return out;
}

std::vector<Vector> halving_sequence(const Vector& t0, double h0, int halvings) {
  std::vector<Vector> out;
  for (int i = 0; i <= halvings; ++i) out.push_back(unit_step(t0, std::ldexp(h0, -i)));
  return out;
}

std::vector<Vector> trial_quasimomenta(const Lattice& lattice, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::vector<Vector> out;
  for (int i = 0; i < count; ++i) {
    Vector c(lattice.dimension());
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = unit(rng);
    out.push_back(lattice.dual_basis().transpose() * c);
  }
  return out;
}

bool is_generic_point(const SpectrumAtT& spectrum, const Lattice& lattice, int n_bands,
                      const ClusterTolerance& tolerance) {
  const auto& ev = spectrum.eigenvalues;
  const Eigen::Index last = std::min<Eigen::Index>(n_bands + 1, ev.size());
  for (Eigen::Index i = 0; i + 1 < last; ++i) {
    if (ev[i + 1] - ev[i] <= tolerance.at(ev[i])) return false;
  }
  const Vector doubled = 2.0 * lattice.dual_coordinates(spectrum.t);
  for (Eigen::Index i = 0; i < doubled.size(); ++i) {
    if (std::abs(doubled[i] - std::round(doubled[i])) < 1e-9) return false;
  }
  return true;
}

Json CertifyReport::to_json() const {
  Json sections_json = Json::object();
  for (const auto& s : sections) {
    Json entry{{"pass", s.pass}, {"skipped", s.skipped}};
    if (!s.message.empty()) entry["message"] = s.message;
    entry["data"] = s.data;
    sections_json[s.name] = std::move(entry);
  }
  Json out{{"pass", pass}};
  out["failing_section"] = failing_section ? Json(*failing_section) : Json(nullptr);
  out["sections"] = std::move(sections_json);
  return out;
}

CertifyReport run_certify(const Problem& problem, const CertifyOptions& options) {
  const auto& spec = problem.spec;
  const auto& lattice = problem.lattice;
  const Vector& t0 = options.t0;
  if (t0.size() != spec.dimension) {
    throw Error(Errc::dimension_mismatch, "t0 has the wrong dimension");
  }
  const auto sequence = certify_sequence(t0);

  CertifyReport report;
  auto& constants = report.sections.emplace_back(CertifySection{.name = "constants"});
  bool elliptic = true;
  run_section(constants, [&](CertifySection& s) {
    auto outcome = constants_chain(problem, options.epsilon, kDefaultEnumerationCap,
                                   options.cutoff, options.seed);
    elliptic = outcome.elliptic;
    s.pass = outcome.pass;
    s.message = outcome.message;
    s.data = std::move(outcome.data);
  });

  const char* names[] = {"eigenvalue_counting", "band_deltas", "bloch_continuity",
                         "projector_continuity", "gap_continuity"};
  if (!elliptic) {
    for (const char* name : names) {
      report.sections.push_back(CertifySection{.name = name, .skipped = true, .message = "skipped: ellipticity failed"});
    }
  } else {
    const TruncatedOperator base_op = assemble(spec, lattice, t0, options.cutoff);
    const SpectrumAtT base = eigen_decompose(base_op);
    if (options.n_bands < 1 || static_cast<std::size_t>(options.n_bands) > base.size() / 2) {
      throw Error(Errc::truncation_trust, "band count must lie in [1, N/2]");
    }
    const auto clusters = cluster_multiplicities(base, options.tolerance);
    const int p_limit = clusters.cluster_of(options.n_bands - 1) + 1;

    auto& counting = report.sections.emplace_back(CertifySection{.name = names[0]});
    run_section(counting, [&](CertifySection& s) {
      EigenvalueCountingOptions opts;
      opts.tolerance = options.tolerance;
      opts.p_limit = p_limit;
      const auto r = eigenvalue_counting_certificate(spec, lattice, t0, sequence, options.cutoff, opts);
      s.pass = r.pass;
      s.data = bloch::to_json(r);
    });

    auto& deltas = report.sections.emplace_back(CertifySection{.name = names[1]});
    run_section(deltas, [&](CertifySection& s) {
      const auto seq = halving_sequence(t0, kDeltaStep, kDeltaHalvings);
      const auto d = band_deltas(spec, lattice, t0, seq, options.cutoff, options.n_bands);
      const bool generic = is_generic_point(base, lattice, options.n_bands, options.tolerance);
      std::vector<double> ratios;
      bool ok = true;
      for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        const double ratio = d[i] > 0.0 ? d[i + 1] / d[i] : 0.0;
        ratios.push_back(ratio);
        ok = ok && (generic ? ratio >= kDeltaRatioLow && ratio <= kDeltaRatioHigh : d[i + 1] < d[i]);
      }
      s.pass = ok;
      s.data = Json{{"generic", generic}, {"h0", kDeltaStep}, {"deltas", d}, {"ratios", ratios}};
    });

    auto& bloch = report.sections.emplace_back(CertifySection{.name = names[2]});
    run_section(bloch, [&](CertifySection& s) {
      const auto& ev = base.eigenvalues;
      const auto n = static_cast<Eigen::Index>(options.band);
      const bool simple = n >= 0 && n < ev.size() &&
                          (n == 0 || ev[n] - ev[n - 1] > options.tolerance.at(ev[n - 1])) &&
                          (n + 1 >= ev.size() || ev[n + 1] - ev[n] > options.tolerance.at(ev[n]));
      s.data["band"] = options.band;
      if (!simple) {
        s.skipped = true;
        s.pass = true;
        s.message = "skipped: band is degenerate at t0";
        return;
      }
      BlochScanOptions opts;
      opts.tolerance = options.tolerance;
      opts.overlap_threshold = options.overlap_threshold;
      opts.convention = PhaseConvention::raw;
      std::size_t start = 0;
      const auto raw = on_longest_tail(sequence, [&](std::span<const Vector> tail) {
        return bloch_deviation_scan(spec, lattice, t0, tail, options.band, options.cutoff, opts);
      }, start);
      const auto tail = std::span<const Vector>(sequence).subspan(start);
      s.data["first_index"] = start;
      opts.convention = PhaseConvention::reference;
      const auto ref = bloch_deviation_scan(spec, lattice, t0, tail, options.band, options.cutoff, opts);
      bool aligned_below_raw = true;
      for (std::size_t i = 0; i < raw.difference.size(); ++i) {
        aligned_below_raw = aligned_below_raw && ref.difference[i] <= raw.difference[i] + 1e-12;
      }
      s.data["raw"] = bloch::to_json(raw);
      s.data["reference"] = bloch::to_json(ref);
      bool ok = true;
      for (auto convention : options.conventions) {
        if (convention == PhaseConvention::planewave && spec.components != 1) continue;
        opts.convention = convention;
        const auto scan = convention == PhaseConvention::reference ? ref
                          : convention == PhaseConvention::raw
                              ? raw
                              : bloch_deviation_scan(spec, lattice, t0, tail, options.band,
                                                     options.cutoff, opts);
        ok = ok && scan.difference.back() < kContinuityTarget;
        s.data[std::string(to_string(convention))] = bloch::to_json(scan);
      }
      s.data["aligned_not_above_raw"] = aligned_below_raw;
      s.pass = ok && aligned_below_raw;
    });

    auto& projector = report.sections.emplace_back(CertifySection{.name = names[3]});
    run_section(projector, [&](CertifySection& s) {
      ProjectorScanOptions opts;
      opts.tolerance = options.tolerance;
      Json scans = Json::array();
      bool ok = true;
      for (int j = 0; j < p_limit; ++j) {
        std::size_t start = 0;
        const auto scan = on_longest_tail(sequence, [&](std::span<const Vector> tail) {
          return projector_continuity_scan(spec, lattice, t0, tail, j, options.cutoff, opts);
        }, start);
        ok = ok && scan.distance.back() < kContinuityTarget;
        for (double defect : scan.quadrature_defect) ok = ok && defect <= kQuadratureTarget;
        Json entry = bloch::to_json(scan);
        entry["first_index"] = start;
        scans.push_back(std::move(entry));
      }
      s.pass = ok;
      s.data["scans"] = std::move(scans);
    });

    auto& gap_section = report.sections.emplace_back(CertifySection{.name = names[4]});
    run_section(gap_section, [&](CertifySection& s) {
      const auto samples = gap_continuity_scan(spec, lattice, t0, sequence, options.cutoff);
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (const auto& g : samples) {
        if (g.abs_dt > kGapRange * (1.0 + 1e-12)) continue;
        lo = std::min(lo, g.ratio);
        hi = std::max(hi, g.ratio);
      }
      const double spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
      s.pass = spread <= kGapRatioSpread;
      s.data = Json{{"samples", bloch::to_json(std::span<const GapSample>(samples))},
                    {"ratio_min", lo},
                    {"ratio_max", hi},
                    {"ratio_spread", std::isfinite(spread) ? Json(spread) : Json(nullptr)}};
    });
  }

  report.pass = true;
  for (const auto& s : report.sections) {
    if (!s.pass && !report.failing_section) report.failing_section = s.name;
    report.pass = report.pass && s.pass;
  }
  return report;
}

Json run_constants(const Problem& problem, const ConstantsOptions& options, bool& pass) {
  auto outcome = constants_chain(problem, options.epsilon, options.enumeration_cap, options.cutoff,
                                 options.seed);
  pass = outcome.pass;
  Json out{{"pass", outcome.pass}};
  if (!outcome.message.empty()) out["message"] = outcome.message;
  for (auto& [key, value] : outcome.data.items()) out[key] = value;
  return out;
}

}  // namespace bloch
