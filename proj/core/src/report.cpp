#include "bloch/report.hpp"

namespace bloch {

namespace {

template <typename T>
Json array_of(const std::vector<T>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(v);
  return out;
}

Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

}  // namespace

std::string_view library_version() noexcept { return BLOCH_VERSION; }

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json to_json(const ClusterDecomposition& c) {
  return Json{{"values", array_of(c.values)},
              {"multiplicities", array_of(c.multiplicities)},
              {"partial_sums", array_of(c.partial_sums)},
              {"tolerance", {{"absolute", c.tolerance.absolute}, {"relative", c.tolerance.relative}}}};
}

Json to_json(const EigenvalueCountingReport& r) {
  Json radii = Json::array();
  for (const auto& cert : r.radii) {
    Json entry{{"radius", cert.radius}, {"pass", cert.pass}, {"first_index", cert.first_index}};
    if (cert.witness) {
      entry["witness"] = Json{{"sample", cert.witness->sample},
                              {"t", to_json(cert.witness->t)},
                              {"cluster", cert.witness->cluster},
                              {"count", cert.witness->count},
                              {"expected", cert.witness->expected}};
    }
    radii.push_back(std::move(entry));
  }
  return Json{{"pass", r.pass},
              {"p_limit", r.p_limit},
              {"gap_bound", r.gap_bound},
              {"clusters", to_json(r.clusters)},
              {"radii", std::move(radii)}};
}

Json to_json(const ProjectorScan& s) {
  return Json{{"cluster", s.cluster},
              {"multiplicity", s.multiplicity},
              {"contour", {{"center", s.contour.center}, {"radius", s.contour.radius}}},
              {"abs_dt", array_of(s.abs_dt)},
              {"distance", array_of(s.distance)},
              {"quadrature_defect", array_of(s.quadrature_defect)},
              {"nodes", array_of(s.nodes)}};
}

Json to_json(const BlochScan& s) {
  Json applied = Json::array();
  for (auto c : s.applied) applied.push_back(std::string(to_string(c)));
  Json out{{"abs_dt", array_of(s.abs_dt)}, {"difference", array_of(s.difference)}};
  if (!s.overlap.empty()) out["overlap"] = array_of(s.overlap);
  out["applied"] = std::move(applied);
  return out;
}

Json to_json(std::span<const GapSample> samples) {
  Json out = Json::array();
  for (const auto& s : samples) out.push_back(Json{{"abs_dt", s.abs_dt}, {"gap", s.gap}, {"ratio", s.ratio}});
  return out;
}

Json to_json(const EllipticityReport& r) {
  return Json{{"c2", r.c2}, {"min_direction", to_json(r.min_direction)}, {"samples", r.samples}, {"pass", r.pass}};
}

Json to_json(const LowerOrderBound& b) {
  return Json{{"c1", b.c1}, {"multiplier_bound", b.multiplier_bound}};
}

Json to_json(const CoercivityReport& r) {
  return Json{{"c1", r.c1},
              {"c2", r.c2},
              {"c3", r.c3},
              {"epsilon", r.epsilon},
              {"c4", r.c4},
              {"c", r.c},
              {"c_lattice", r.c_lattice},
              {"radial_sup", r.radial_sup},
              {"verified_range", r.verified_range},
              {"lattice_points_checked", r.lattice_points_checked},
              {"symbol_certified", r.symbol_certified}};
}

Json to_json(const RelativeBoundReport& r) {
  Json out{{"c5", r.c5},
           {"c6", r.c6},
           {"multiplier_bound", r.multiplier_bound},
           {"condition_value", r.condition_value},
           {"condition_value_truncated", r.condition_value_truncated},
           {"battery_size", r.battery_size},
           {"battery_margin", r.battery_margin},
           {"battery_pass", r.battery_pass},
           {"chain_margin", r.chain_margin},
           {"chain_pass", r.chain_pass},
           {"min_shifted_eigenvalue", r.min_shifted_eigenvalue},
           {"below_bounded", r.below_bounded},
           {"pass", r.pass}};
  if (r.witness) {
    Json u = Json::array();
    for (Eigen::Index i = 0; i < r.witness->u.size(); ++i) {
      u.push_back(Json::array({r.witness->u[i].real(), r.witness->u[i].imag()}));
    }
    out["witness"] = Json{{"t", to_json(r.witness->t)}, {"lhs", r.witness->lhs}, {"rhs", r.witness->rhs}, {"u", std::move(u)}};
  }
  return out;
}

Json to_json(const RunManifest& m) {
  return Json{{"verb", m.verb},
              {"spec_path", m.spec_path},
              {"spec_sha256", m.spec_hash},
              {"lattice_generators", matrix_json(m.lattice_generators)},
              {"cutoff", m.cutoff},
              {"path", m.path},
              {"settings", m.settings},
              {"tool_version", m.tool_version},
              {"wall_clock_seconds", m.wall_clock_seconds}};
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

}  // namespace bloch
