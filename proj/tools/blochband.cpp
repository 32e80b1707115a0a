#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bloch/certify.hpp"
#include "bloch/gapmetric.hpp"
#include "bloch/problem.hpp"
#include "bloch/report.hpp"
#include "bloch/spectral.hpp"
#include "cli.hpp"

namespace {

using namespace bloch;

struct Options {
  std::string spec;
  double cutoff = 16.0;
  std::string path;
  int samples = 65;
  int bands = 4;
  int band = 1;
  std::string t0;
  std::string out;
  std::vector<std::string> conventions;
  double epsilon = kDefaultEpsilon;
  std::uint64_t seed = kDefaultSeed;
};

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::invalid_argument, "cannot write " + path);
  file << contents;
  if (!file) throw Error(Errc::invalid_argument, "failed writing " + path);
}

// Data goes to --out (plus a manifest sidecar) or to stdout.
void emit(const Options& o, const std::string& contents, RunManifest manifest,
          std::chrono::steady_clock::time_point start) {
  if (o.out.empty()) {
    std::cout << contents;
    return;
  }
  write_file(o.out, contents);
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(o.out + ".manifest.json", dump(to_json(manifest)));
}

RunManifest manifest_for(const std::string& verb, const Options& o, const Problem& problem) {
  RunManifest m;
  m.verb = verb;
  m.spec_path = o.spec;
  m.spec_hash = problem.hash;
  m.lattice_generators = problem.lattice.basis();
  m.cutoff = o.cutoff;
  m.tool_version = std::string(library_version());
  const ClusterTolerance tol{};
  m.settings["cluster_tolerance"] = Json{{"absolute", tol.absolute}, {"relative", tol.relative}};
  return m;
}

Vector t0_or_origin(const Options& o, int dimension) {
  return o.t0.empty() ? Vector(Vector::Zero(dimension)) : cli::parse_point(o.t0, dimension);
}

int run_bands_verb(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = load_problem(o.spec);
  const int d = problem.spec.dimension;
  const std::string path_text = o.path.empty() ? (d == 1 ? "-0.5;0.5" : "") : o.path;
  if (path_text.empty()) throw Error(Errc::invalid_argument, "--path is required when d > 1");
  const auto waypoints = cli::parse_waypoints(path_text, d);
  const int steps = cli::steps_per_segment(o.samples, static_cast<int>(waypoints.points.size()) - 1);
  const auto path = sample_path(problem.lattice, waypoints.points, steps, false, waypoints.labels);
  const auto bands = compute_bands(problem.spec, problem.lattice, path, o.cutoff, o.bands);
  std::ostringstream csv;
  write_band_csv(bands, csv);

  auto manifest = manifest_for("bands", o, problem);
  manifest.path = path_text;
  manifest.settings["samples"] = o.samples;
  manifest.settings["bands"] = o.bands;
  emit(o, csv.str(), std::move(manifest), start);
  return cli::kOk;
}

int run_certify_verb(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = load_problem(o.spec);
  CertifyOptions opts;
  opts.t0 = t0_or_origin(o, problem.spec.dimension);
  opts.cutoff = o.cutoff;
  opts.n_bands = o.bands;
  opts.band = o.band - 1;
  opts.epsilon = o.epsilon;
  opts.seed = o.seed;
  if (!o.conventions.empty()) {
    opts.conventions.clear();
    for (const auto& c : o.conventions) opts.conventions.push_back(parse_phase_convention(c));
  }
  const auto report = run_certify(problem, opts);

  Json doc{{"spec_sha256", problem.hash},
           {"t0", to_json(opts.t0)},
           {"cutoff", opts.cutoff},
           {"bands", opts.n_bands},
           {"band", o.band},
           {"epsilon", opts.epsilon},
           {"seed", opts.seed}};
  const Json body = report.to_json();
  for (const auto& [key, value] : body.items()) doc[key] = value;

  auto manifest = manifest_for("certify", o, problem);
  manifest.path = "t0 + 2^-i e1 (i = 1..10), t0 + 1e-7 e1";
  Json conventions = Json::array();
  for (auto c : opts.conventions) conventions.push_back(std::string(to_string(c)));
  manifest.settings["conventions"] = std::move(conventions);
  manifest.settings["overlap_threshold"] = opts.overlap_threshold;
  manifest.settings["epsilon"] = opts.epsilon;
  manifest.settings["seed"] = opts.seed;
  emit(o, dump(doc), std::move(manifest), start);
  if (!report.pass) {
    std::cerr << "certification failed in section " << report.failing_section.value_or("?") << "\n";
    return cli::kCertification;
  }
  return cli::kOk;
}

int run_gap_scan_verb(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = load_problem(o.spec);
  const Vector t0 = t0_or_origin(o, problem.spec.dimension);
  const auto sequence = certify_sequence(t0);
  const auto samples = gap_continuity_scan(problem.spec, problem.lattice, t0, sequence, o.cutoff);
  std::ostringstream csv;
  write_gap_csv(csv, samples);
  auto manifest = manifest_for("gap-scan", o, problem);
  manifest.path = "t0 + 2^-i e1 (i = 1..10), t0 + 1e-7 e1";
  manifest.settings["t0"] = to_json(t0);
  emit(o, csv.str(), std::move(manifest), start);
  return cli::kOk;
}

int run_constants_verb(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = load_problem(o.spec);
  ConstantsOptions opts;
  opts.epsilon = o.epsilon;
  opts.cutoff = o.cutoff;
  opts.seed = o.seed;
  bool pass = false;
  const Json report = run_constants(problem, opts, pass);
  auto manifest = manifest_for("constants", o, problem);
  manifest.settings["epsilon"] = opts.epsilon;
  manifest.settings["seed"] = opts.seed;
  manifest.settings["enumeration_cap"] = opts.enumeration_cap;
  emit(o, dump(report), std::move(manifest), start);
  return pass ? cli::kOk : cli::kCertification;
}

int run_validate_verb(const Options& o) {
  const Problem problem = load_problem(o.spec);
  std::cout << "ok " << problem.hash << " d=" << problem.spec.dimension
            << " m=" << problem.spec.components << " s=" << problem.spec.order_s << "\n";
  return cli::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structures and continuity certificates for periodic elliptic operators",
               "blochband"};
  app.set_version_flag("--version", std::string(bloch::library_version()));
  app.require_subcommand(1);
  Options o;

  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--spec", o.spec, "Problem file (JSON)")->required()->check(CLI::ExistingFile);
  };
  auto add_common = [&](CLI::App* sub) {
    add_spec(sub);
    sub->add_option("--cutoff", o.cutoff, "Plane-wave cutoff radius")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "Output file; a .manifest.json sidecar is written next to it");
  };

  auto* bands = app.add_subcommand("bands", "Lowest bands along a quasimomentum path (CSV)");
  add_common(bands);
  bands->add_option("--path", o.path, "Waypoints, e.g. \"0;0.5\" or \"G=0,0;X=0.5,0\"");
  bands->add_option("--samples", o.samples, "Total samples along the path")->check(CLI::PositiveNumber);
  bands->add_option("--bands", o.bands, "Number of bands")->check(CLI::PositiveNumber);

  auto* certify = app.add_subcommand("certify", "Continuity certificates at t0 (JSON)");
  add_common(certify);
  certify->add_option("--t0", o.t0, "Base quasimomentum, e.g. \"0.25\"");
  certify->add_option("--bands", o.bands, "Bands covered by counting and projector checks")
      ->check(CLI::PositiveNumber);
  certify->add_option("--band", o.band, "One-based band for the Bloch-function scans")
      ->check(CLI::PositiveNumber);
  certify->add_option("--convention", o.conventions, "Gated phase conventions (repeatable)")
      ->check(CLI::IsMember({"raw", "reference", "planewave"}));
  certify->add_option("--epsilon", o.epsilon, "Coercivity margin")->check(CLI::PositiveNumber);
  certify->add_option("--seed", o.seed, "Seed of the trial-vector battery");

  auto* gap_scan = app.add_subcommand("gap-scan", "Gap metric along t0 + 2^-i e1 (CSV)");
  add_common(gap_scan);
  gap_scan->add_option("--t0", o.t0, "Base quasimomentum");

  auto* constants = app.add_subcommand("constants", "Ellipticity and coercivity constants (JSON)");
  add_common(constants);
  constants->add_option("--epsilon", o.epsilon, "Coercivity margin")->check(CLI::PositiveNumber);
  constants->add_option("--seed", o.seed, "Seed of the trial-vector battery");

  auto* validate = app.add_subcommand("validate", "Parse and check a problem file");
  add_spec(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? bloch::cli::kOk : bloch::cli::kUsage;
  }

  try {
    if (*bands) return run_bands_verb(o);
    if (*certify) return run_certify_verb(o);
    if (*gap_scan) return run_gap_scan_verb(o);
    if (*constants) return run_constants_verb(o);
    return run_validate_verb(o);
  } catch (const bloch::Error& e) {
    std::cerr << "error [" << bloch::to_string(e.code()) << "]: " << e.what() << "\n";
    return bloch::cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bloch::cli::kNumerical;
  }
}
