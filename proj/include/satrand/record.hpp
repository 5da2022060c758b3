#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "satrand/cnf.hpp"
#include "satrand/matrix_randomizer.hpp"
#include "satrand/objective.hpp"
#include "satrand/permute_flip.hpp"
#include "satrand/solution_set.hpp"

namespace satrand {

/// FNV-1a 64, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Digest of the canonical DIMACS text.
inline std::string instance_digest(const CnfInstance& inst) { return fnv1a_hex(emit_dimacs(inst)); }

enum class Method { kIso, kMatrix, kSolutionSet, kMincost, kMax3Sat };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kIso: return "iso";
    case Method::kMatrix: return "matrix";
    case Method::kSolutionSet: return "gf2";
    case Method::kMincost: return "mincost";
    case Method::kMax3Sat: return "max3sat";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "iso") return Method::kIso;
  if (s == "matrix") return Method::kMatrix;
  if (s == "gf2" || s == "solution_set") return Method::kSolutionSet;
  if (s == "mincost") return Method::kMincost;
  if (s == "max3sat") return Method::kMax3Sat;
  throw InvalidInput("unknown method '" + std::string(s) + "'");
}

/// Everything the client keeps to map answers back.
struct RandomizationRecord {
  Method method = Method::kIso;
  std::variant<IsoSecret, MatrixSecret, GfSecret, MincostSecret> secret;
  std::string original_digest;
  std::uint64_t seed = 0;
  std::uint64_t offset = 0;  // max3sat: max satisfied = offset - min cost
};

// ---------------------------------------------------------------------------
// JSON key files. Matrices are stored as dimensions plus row bit strings.

namespace detail {

using nlohmann::json;

inline json matrix_json(const BitMatrix& m) { return {{"rows", m.rows()}, {"cols", m.cols()}, {"bits", m.to_strings()}}; }

inline BitMatrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  auto bits = j.at("bits").get<std::vector<std::string>>();
  if (bits.size() != rows) throw ParseError("key: matrix row count does not match its bits");
  for (const auto& r : bits)
    if (r.size() != cols) throw ParseError("key: matrix row length does not match its column count");
  return rows == 0 ? BitMatrix() : BitMatrix::from_strings(bits);
}

inline json secret_json(const IsoSecret& s) {
  return {{"permutation", s.permutation}, {"flips", s.flips}, {"seed", s.seed}};
}
inline json secret_json(const MatrixSecret& s) {
  return {{"r", matrix_json(s.r)},
          {"original_n", s.original_n},
          {"dummy_offset", s.dummy_offset},
          {"negation_constants", s.negation_constants},
          {"seed", s.seed}};
}
inline json secret_json(const GfSecret& s) {
  return {{"r", matrix_json(s.r)},
          {"r_inv", matrix_json(s.r_inv)},
          {"original_n", s.original_n},
          {"seed", s.seed},
          {"row_weight", s.row_weight}};
}
inline json secret_json(const MincostSecret& s) {
  json inner = std::visit([](const auto& x) { return secret_json(x); }, s.inner);
  return {{"objective_method", s.method == ObjectiveMethod::kMatrix ? "matrix" : "gf2"},
          {"circuit",
           {{"output_bits", s.circuit.output_bits},
            {"width", s.circuit.width},
            {"beta", s.circuit.beta},
            {"first_internal_var", s.circuit.first_internal_var},
            {"last_internal_var", s.circuit.last_internal_var}}},
          {"compiled_vars", s.compiled_vars},
          {"inner", inner}};
}

inline IsoSecret iso_from_json(const json& j) {
  IsoSecret s;
  s.permutation = j.at("permutation").get<std::vector<Var>>();
  s.flips = j.at("flips").get<std::vector<std::uint8_t>>();
  s.seed = j.at("seed").get<std::uint64_t>();
  if (!s.is_bijection()) throw ParseError("key: permutation is not a bijection");
  return s;
}
inline MatrixSecret matrix_secret_from_json(const json& j) {
  MatrixSecret s;
  s.r = matrix_from_json(j.at("r"));
  s.original_n = j.at("original_n").get<Var>();
  s.dummy_offset = j.at("dummy_offset").get<Var>();
  s.negation_constants = j.at("negation_constants").get<std::vector<int>>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}
inline GfSecret gf_from_json(const json& j) {
  GfSecret s;
  s.r = matrix_from_json(j.at("r"));
  s.r_inv = matrix_from_json(j.at("r_inv"));
  s.original_n = j.at("original_n").get<Var>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.row_weight = j.at("row_weight").get<std::size_t>();
  return s;
}
inline MincostSecret mincost_from_json(const json& j) {
  MincostSecret s;
  const auto m = j.at("objective_method").get<std::string>();
  if (m != "matrix" && m != "gf2") throw ParseError("key: unknown objective method '" + m + "'");
  s.method = m == "matrix" ? ObjectiveMethod::kMatrix : ObjectiveMethod::kSolutionSet;
  const json& c = j.at("circuit");
  s.circuit.output_bits = c.at("output_bits").get<std::vector<Var>>();
  s.circuit.width = c.at("width").get<unsigned>();
  s.circuit.beta = c.at("beta").get<unsigned>();
  s.circuit.first_internal_var = c.at("first_internal_var").get<Var>();
  s.circuit.last_internal_var = c.at("last_internal_var").get<Var>();
  s.compiled_vars = j.at("compiled_vars").get<Var>();
  if (s.method == ObjectiveMethod::kMatrix)
    s.inner = matrix_secret_from_json(j.at("inner"));
  else
    s.inner = gf_from_json(j.at("inner"));
  return s;
}

}  // namespace detail

inline std::string emit_record(const RandomizationRecord& r) {
  nlohmann::json j;
  j["method"] = std::string(to_string(r.method));
  j["original_digest"] = r.original_digest;
  j["seed"] = r.seed;
  if (r.method == Method::kMax3Sat) j["offset"] = r.offset;
  j["secret"] = std::visit([](const auto& s) { return detail::secret_json(s); }, r.secret);
  return j.dump(2) + "\n";
}

inline RandomizationRecord parse_record(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RandomizationRecord r;
    r.method = parse_method(j.at("method").get<std::string>());
    r.original_digest = j.at("original_digest").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.offset = j.value("offset", std::uint64_t{0});
    const auto& s = j.at("secret");
    switch (r.method) {
      case Method::kIso: r.secret = detail::iso_from_json(s); break;
      case Method::kMatrix: r.secret = detail::matrix_secret_from_json(s); break;
      case Method::kSolutionSet: r.secret = detail::gf_from_json(s); break;
      case Method::kMincost:
      case Method::kMax3Sat: r.secret = detail::mincost_from_json(s); break;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("key: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("key: ") + e.what());
  }
}

/// Maps a provider solution back to `original` (the instance the record was
/// made for) and checks it. DigestMismatch if the record belongs to another
/// instance, FraudDetected if the result does not satisfy `original`.
///
/// For max3sat records `original` is the 3CNF whose clauses are maximized;
/// the result is an assignment to its variables (no clause check applies).
inline Assignment derandomize(const Assignment& sol, const RandomizationRecord& rec, const CnfInstance& original) {
  if (instance_digest(original) != rec.original_digest)
    throw DigestMismatch("secret was made for instance " + rec.original_digest + ", got " +
                         instance_digest(original));
  switch (rec.method) {
    case Method::kIso: {
      Assignment x = iso_derandomize(sol, std::get<IsoSecret>(rec.secret));
      if (!satisfies(original, x)) throw FraudDetected("derandomized solution falsifies the original instance");
      return x;
    }
    case Method::kMatrix: return derandomize_solution(sol, std::get<MatrixSecret>(rec.secret), original);
    case Method::kSolutionSet: return gf_derandomize(sol, std::get<GfSecret>(rec.secret), original);
    case Method::kMincost: return derandomize_mincost(sol, std::get<MincostSecret>(rec.secret), original);
    case Method::kMax3Sat: {
      const auto red = max3sat_to_mincost(Max3SatInstance{original});
      return derandomize_mincost(sol, std::get<MincostSecret>(rec.secret), red.mincost.cnf)
          .prefix(original.num_variables());
    }
  }
  throw InvalidInput("unknown method");
}

}  // namespace satrand
