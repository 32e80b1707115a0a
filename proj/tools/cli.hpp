#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bloch/error.hpp"
#include "bloch/lattice.hpp"
#include "bloch/types.hpp"

namespace bloch::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kValidation = 3,
  kNumerical = 4,
  kCertification = 5,
};

int exit_code_for(Errc code) noexcept;

struct Waypoints {
  std::vector<Vector> points;
  std::vector<std::string> labels;
};

/// "0;0.5" or "G=0,0;X=0.5,0;M=0.5,0.5": waypoints separated by ';',
/// coordinates by ','. Throws Error(invalid_argument).
Waypoints parse_waypoints(std::string_view text, int dimension);

/// One point, "0.25" or "0.25,0".
Vector parse_point(std::string_view text, int dimension);

/// Splits a total sample count over the path segments. Throws
/// Error(invalid_argument) unless (samples - 1) is a positive multiple of segments.
int steps_per_segment(int samples, int segments);

}  // namespace bloch::cli
