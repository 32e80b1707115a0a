#include "bloch/error.hpp"

namespace bloch {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::degenerate_lattice: return "degenerate-lattice";
    case Errc::non_self_adjoint: return "non-self-adjoint-spec";
    case Errc::unsupported_shift: return "unsupported-shift";
    case Errc::numerical_failure: return "numerical-failure";
    case Errc::undefined_gap: return "undefined-gap";
    case Errc::truncation_trust: return "truncation-trust";
    case Errc::contour_collision: return "contour-collision";
    case Errc::alignment_undefined: return "alignment-undefined";
    case Errc::overlap_below_threshold: return "overlap-below-threshold";
    case Errc::simplicity_violation: return "simplicity-violation";
    case Errc::counting_violation: return "counting-violation";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::degenerate_symbol: return "degenerate-symbol";
    case Errc::insufficient_enumeration: return "insufficient-enumeration";
    case Errc::parse_error: return "parse-error";
    case Errc::validation_error: return "validation-error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

}  // namespace bloch
