#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bloch {

/// Failure categories raised by the library. Each maps onto one CLI exit code
/// family (see tools/blochband.cpp).
enum class Errc {
  invalid_argument,
  degenerate_lattice,
  non_self_adjoint,
  unsupported_shift,
  numerical_failure,
  undefined_gap,
  truncation_trust,
  contour_collision,
  alignment_undefined,
  overlap_below_threshold,
  simplicity_violation,
  counting_violation,
  dimension_mismatch,
  degenerate_symbol,
  insufficient_enumeration,
  parse_error,
  validation_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  [[nodiscard]] Errc code() const noexcept { return code_; }
  /// The message without the category prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace bloch
