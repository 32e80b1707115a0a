#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bloch/lattice.hpp"
#include "bloch/operator.hpp"

namespace bloch {

/// A parsed and validated problem file.
struct Problem {
  OperatorSpec spec;
  Lattice lattice;
  /// Lowercase hex SHA-256 of the file contents.
  std::string hash;
};

/// Parses a JSON problem description. `origin` prefixes error messages.
/// Throws Error(parse_error) for malformed JSON (with line and column),
/// Error(validation_error) naming the offending field, Error(degenerate_lattice)
/// and Error(non_self_adjoint) from the eager checks.
Problem parse_problem(std::string_view text, std::string_view origin = "<input>");

Problem load_problem(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

}  // namespace bloch
