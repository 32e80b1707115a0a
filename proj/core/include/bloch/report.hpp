#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bloch/constants.hpp"
#include "bloch/gapmetric.hpp"
#include "bloch/lattice.hpp"
#include "bloch/projector.hpp"
#include "bloch/spectral.hpp"
#include "bloch/types.hpp"

namespace bloch {

using Json = nlohmann::ordered_json;

std::string_view library_version() noexcept;

Json to_json(const Vector& v);
Json to_json(const ClusterDecomposition& clusters);
Json to_json(const EigenvalueCountingReport& report);
Json to_json(const ProjectorScan& scan);
Json to_json(const BlochScan& scan);
Json to_json(std::span<const GapSample> samples);
Json to_json(const EllipticityReport& report);
Json to_json(const LowerOrderBound& bound);
Json to_json(const CoercivityReport& report);
Json to_json(const RelativeBoundReport& report);

/// Inputs that determine a run's outputs, plus the elapsed time. Only this
/// sidecar carries wall-clock data.
struct RunManifest {
  std::string verb;
  std::string spec_path;
  std::string spec_hash;
  Matrix lattice_generators;
  double cutoff = 0.0;
  std::string path;
  Json settings = Json::object();
  std::string tool_version;
  double wall_clock_seconds = 0.0;
};

Json to_json(const RunManifest& manifest);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& json);

}  // namespace bloch
