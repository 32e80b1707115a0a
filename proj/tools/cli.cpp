#include "cli.hpp"

#include <charconv>
#include <cmath>

namespace bloch::cli {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(Errc::invalid_argument, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::parse_error:
      return kParse;
    case Errc::validation_error:
    case Errc::non_self_adjoint:
    case Errc::degenerate_lattice:
    case Errc::degenerate_symbol:
    case Errc::truncation_trust:
    case Errc::invalid_argument:
    case Errc::dimension_mismatch:
    case Errc::insufficient_enumeration:
    case Errc::unsupported_shift:
      return kValidation;
    case Errc::numerical_failure:
    case Errc::undefined_gap:
    case Errc::contour_collision:
    case Errc::alignment_undefined:
    case Errc::overlap_below_threshold:
    case Errc::simplicity_violation:
    case Errc::counting_violation:
      return kNumerical;
  }
  return kNumerical;
}

Vector parse_point(std::string_view text, int dimension) {
  const auto parts = split(text, ',');
  if (static_cast<int>(parts.size()) != dimension) {
    throw Error(Errc::invalid_argument, "point '" + std::string(text) + "' needs " +
                                            std::to_string(dimension) + " coordinates");
  }
  Vector v(dimension);
  for (int i = 0; i < dimension; ++i) v[i] = parse_number(parts[static_cast<std::size_t>(i)]);
  return v;
}

Waypoints parse_waypoints(std::string_view text, int dimension) {
  Waypoints out;
  for (auto item : split(text, ';')) {
    item = trim(item);
    std::string label;
    if (const auto eq = item.find('='); eq != std::string_view::npos) {
      label = std::string(trim(item.substr(0, eq)));
      item = item.substr(eq + 1);
    }
    out.points.push_back(parse_point(item, dimension));
    out.labels.push_back(std::move(label));
  }
  if (out.points.size() < 2) throw Error(Errc::invalid_argument, "a path needs at least two waypoints");
  return out;
}

int steps_per_segment(int samples, int segments) {
  if (segments < 1 || samples < 2 || (samples - 1) % segments != 0) {
    throw Error(Errc::invalid_argument, "samples - 1 = " + std::to_string(samples - 1) +
                                            " must be a positive multiple of the " +
                                            std::to_string(segments) + " path segments");
  }
  return (samples - 1) / segments;
}

}  // namespace bloch::cli
