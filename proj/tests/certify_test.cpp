#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "bloch/certify.hpp"
#include "support.hpp"

namespace bloch {
namespace {

using testing::spec_path;
using testing::vec;

CertifyOptions options_at(Vector t0, double cutoff) {
  CertifyOptions options;
  options.t0 = std::move(t0);
  options.cutoff = cutoff;
  return options;
}

const CertifySection* section(const CertifyReport& report, const std::string& name) {
  for (const auto& s : report.sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

TEST(Sequences, Shapes) {
  const auto seq = certify_sequence(vec({0.25}));
  ASSERT_EQ(seq.size(), 11u);
  EXPECT_DOUBLE_EQ(seq[0][0], 0.75);
  EXPECT_DOUBLE_EQ(seq[9][0], 0.25 + std::pow(2.0, -10));
  EXPECT_DOUBLE_EQ(seq[10][0], 0.25 + 1e-7);

  const auto halving = halving_sequence(vec({0.0, 0.0}), 0.1, 3);
  ASSERT_EQ(halving.size(), 4u);
  EXPECT_DOUBLE_EQ(halving[3][0], 0.0125);
  EXPECT_EQ(halving[3][1], 0.0);
}

TEST(Sequences, TrialQuasimomentaInCellAndSeeded) {
  const Lattice lattice = testing::square_lattice(2);
  const auto a = trial_quasimomenta(lattice, 16, 1);
  const auto b = trial_quasimomenta(lattice, 16, 1);
  const auto c = trial_quasimomenta(lattice, 16, 2);
  ASSERT_EQ(a.size(), 16u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& t : a) {
    EXPECT_GE(t.minCoeff(), -0.5);
    EXPECT_LT(t.maxCoeff(), 0.5);
  }
}

TEST(GenericPoint, Classification) {
  const auto problem = load_problem(spec_path("mathieu_q1.json"));
  const auto at = [&](double t) {
    return eigen_decompose(assemble(problem.spec, problem.lattice, vec({t}), 8.0));
  };
  EXPECT_TRUE(is_generic_point(at(0.25), problem.lattice, 4, {}));
  EXPECT_FALSE(is_generic_point(at(0.0), problem.lattice, 4, {}));
  EXPECT_FALSE(is_generic_point(at(0.5), problem.lattice, 4, {}));
}

TEST(Certify, FreeLaplacianAtOrigin) {
  const auto problem = load_problem(spec_path("free_1d.json"));
  const auto report = run_certify(problem, options_at(vec({0.0}), 8.0));
  EXPECT_TRUE(report.pass) << report.to_json().dump(2);
  EXPECT_FALSE(report.failing_section.has_value());
  // Band 1 is simple at the origin, band 2 is not.
  ASSERT_NE(section(report, "bloch_continuity"), nullptr);
  EXPECT_FALSE(section(report, "bloch_continuity")->skipped);
}

TEST(Certify, MathieuGenericPoint) {
  const auto problem = load_problem(spec_path("mathieu_q1.json"));
  const auto report = run_certify(problem, options_at(vec({0.25}), 16.0));
  EXPECT_TRUE(report.pass) << report.to_json().dump(2);
  for (const char* name : {"constants", "eigenvalue_counting", "band_deltas", "bloch_continuity",
                           "projector_continuity", "gap_continuity"}) {
    const auto* s = section(report, name);
    ASSERT_NE(s, nullptr) << name;
    EXPECT_TRUE(s->pass) << name;
  }
}

TEST(Certify, IndefiniteSymbolFailsAtConstants) {
  const auto problem = load_problem(spec_path("indefinite_2d.json"));
  const auto report = run_certify(problem, options_at(vec({0.1, 0.2}), 4.0));
  EXPECT_FALSE(report.pass);
  ASSERT_TRUE(report.failing_section.has_value());
  EXPECT_EQ(*report.failing_section, "constants");
  for (const auto& s : report.sections) {
    if (s.name != "constants") {
      EXPECT_TRUE(s.skipped) << s.name;
    }
  }
}

TEST(Certify, Deterministic) {
  const auto problem = load_problem(spec_path("mathieu_q01.json"));
  const auto options = options_at(vec({0.25}), 8.0);
  EXPECT_EQ(run_certify(problem, options).to_json().dump(),
            run_certify(problem, options).to_json().dump());
}

TEST(Constants, ChainReport) {
  bool pass = false;
  const auto json = run_constants(load_problem(spec_path("mathieu_q1.json")), {}, pass);
  EXPECT_TRUE(pass);
  EXPECT_TRUE(json.at("pass").get<bool>());
  run_constants(load_problem(spec_path("indefinite_2d.json")), {}, pass);
  EXPECT_FALSE(pass);
}

}  // namespace
}  // namespace bloch
