#include "bloch/problem.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bloch/error.hpp"

namespace bloch {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSelfAdjointSeed = 0x5eedULL;
constexpr int kSelfAdjointTrials = 3;

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw Error(Errc::validation_error, where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) invalid(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

int to_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) invalid(where, "expected an integer");
  return j.get<int>();
}

double to_double(const json& j, const std::string& where) {
  if (!j.is_number()) invalid(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(where, "not finite");
  return v;
}

IntVector to_int_vector(const json& j, int dimension, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dimension) {
    invalid(where, "expected an array of " + std::to_string(dimension) + " integers");
  }
  IntVector out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(to_int(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

MultiIndex to_multi_index(const json& j, int dimension, const std::string& where) {
  MultiIndex alpha{to_int_vector(j, dimension, where)};
  for (int c : alpha.components) {
    if (c < 0) invalid(where, "multi-index components must be nonnegative");
  }
  return alpha;
}

// A scalar for m = 1, otherwise an m x m array of rows.
Matrix to_real_matrix(const json& j, int m, const std::string& where) {
  if (j.is_number()) {
    if (m != 1) invalid(where, "expected a " + std::to_string(m) + "x" + std::to_string(m) + " matrix");
    return Matrix::Constant(1, 1, to_double(j, where));
  }
  if (!j.is_array() || static_cast<int>(j.size()) != m) {
    invalid(where, "expected a " + std::to_string(m) + "x" + std::to_string(m) + " matrix");
  }
  Matrix out(m, m);
  for (int r = 0; r < m; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != m) {
      invalid(rw, "expected a row of " + std::to_string(m) + " numbers");
    }
    for (int c = 0; c < m; ++c) {
      out(r, c) = to_double(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
    }
  }
  return out;
}

FourierCoefficient to_coefficient(const json& j, int dimension, int m, const std::string& where) {
  if (!j.is_object()) invalid(where, "expected an object with gamma, re and optional im");
  FourierCoefficient c;
  c.frequency = to_int_vector(require(j, "gamma", where), dimension, where + ".gamma");
  const Matrix re = to_real_matrix(require(j, "re", where), m, where + ".re");
  Matrix im = Matrix::Zero(m, m);
  if (const auto it = j.find("im"); it != j.end()) im = to_real_matrix(*it, m, where + ".im");
  c.matrix = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
  return c;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Small basis containing every listed frequency difference.
double self_adjointness_cutoff(const OperatorSpec& spec, const Lattice& lattice) {
  double reach = 0.0;
  auto visit = [&](const std::vector<FourierCoefficient>& modes) {
    for (const auto& c : modes) reach = std::max(reach, lattice.dual_point(c.frequency).norm());
  };
  for (const auto& term : spec.lower) visit(term.coefficients);
  visit(spec.multiplier);
  double shortest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < lattice.dimension(); ++i) {
    shortest = std::min(shortest, lattice.dual_basis().row(i).norm());
  }
  return std::max(reach, 2.0 * shortest) * 1.0000001;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw Error(Errc::numerical_failure, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

Problem parse_problem(std::string_view text, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << origin << ":" << line << ":" << column << ": malformed JSON (" << e.what() << ")";
    throw Error(Errc::parse_error, os.str());
  }

  try {
    if (!doc.is_object()) invalid("<root>", "expected a JSON object");
    OperatorSpec spec;
    spec.dimension = to_int(require(doc, "dimension", ""), "dimension");
    if (spec.dimension < 1) invalid("dimension", "must be >= 1");
    spec.components = doc.contains("m") ? to_int(doc["m"], "m") : 1;
    if (spec.components < 1) invalid("m", "must be >= 1");
    spec.order_s = to_int(require(doc, "order_s", ""), "order_s");
    if (spec.order_s < 1) invalid("order_s", "must be >= 1");
    const int d = spec.dimension;

    const json& gens = require(doc, "lattice_generators", "");
    if (!gens.is_array() || static_cast<int>(gens.size()) != d) {
      invalid("lattice_generators", "expected " + std::to_string(d) + " generators");
    }
    Matrix generators(d, d);
    for (int i = 0; i < d; ++i) {
      const auto& row = gens[static_cast<std::size_t>(i)];
      const std::string where = "lattice_generators[" + std::to_string(i) + "]";
      if (!row.is_array() || static_cast<int>(row.size()) != d) {
        invalid(where, "expected " + std::to_string(d) + " coordinates");
      }
      for (int k = 0; k < d; ++k) {
        generators(i, k) = to_double(row[static_cast<std::size_t>(k)], where + "[" + std::to_string(k) + "]");
      }
    }

    const json& principal = require(doc, "principal", "");
    if (!principal.is_array()) invalid("principal", "expected an array");
    for (std::size_t i = 0; i < principal.size(); ++i) {
      const std::string where = "principal[" + std::to_string(i) + "]";
      const auto& term = principal[i];
      if (!term.is_object()) invalid(where, "expected an object with alpha and q");
      spec.principal.push_back({to_multi_index(require(term, "alpha", where), d, where + ".alpha"),
                                to_double(require(term, "q", where), where + ".q")});
    }

    if (const auto it = doc.find("lower"); it != doc.end()) {
      if (!it->is_array()) invalid("lower", "expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string where = "lower[" + std::to_string(i) + "]";
        const auto& term = (*it)[i];
        if (!term.is_object()) invalid(where, "expected an object with alpha and terms");
        LowerOrderTerm lt;
        lt.alpha = to_multi_index(require(term, "alpha", where), d, where + ".alpha");
        const json& modes = require(term, "terms", where);
        if (!modes.is_array()) invalid(where + ".terms", "expected an array");
        for (std::size_t k = 0; k < modes.size(); ++k) {
          lt.coefficients.push_back(to_coefficient(modes[k], d, spec.components,
                                                   where + ".terms[" + std::to_string(k) + "]"));
        }
        spec.lower.push_back(std::move(lt));
      }
    }

    if (const auto it = doc.find("multiplier"); it != doc.end()) {
      if (!it->is_array()) invalid("multiplier", "expected an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        spec.multiplier.push_back(
            to_coefficient((*it)[k], d, spec.components, "multiplier[" + std::to_string(k) + "]"));
      }
    }

    spec.validate();
    Lattice lattice(generators);

    std::mt19937_64 rng(kSelfAdjointSeed);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    std::vector<Vector> ts;
    for (int i = 0; i < kSelfAdjointTrials; ++i) {
      Vector c(d);
      for (int k = 0; k < d; ++k) c[k] = unit(rng);
      ts.push_back(lattice.dual_basis().transpose() * c);
    }
    const auto report =
        check_self_adjointness(spec, lattice, ts, self_adjointness_cutoff(spec, lattice));
    if (!report.pass) {
      std::ostringstream os;
      os << "operator is not formally self-adjoint: Hermiticity defect " << report.max_defect;
      throw Error(Errc::non_self_adjoint, os.str());
    }
    return Problem{std::move(spec), std::move(lattice), sha256_hex(text)};
  } catch (const Error& e) {
    throw Error(e.code(), std::string(origin) + ": " + e.detail());
  } catch (const json::exception& e) {
    throw Error(Errc::validation_error, std::string(origin) + ": " + e.what());
  }
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::parse_error, path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem(buffer.str(), path.string());
}

}  // namespace bloch
