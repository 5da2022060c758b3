#pragma once

#include <cstdint>
#include <istream>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "satrand/cnf.hpp"
#include "satrand/error.hpp"

namespace satrand {

/// One equality row: sum_j coeffs[j] * x_{j+1} = rhs.
struct LinearConstraint {
  std::vector<std::int64_t> coeffs;
  std::int64_t rhs = 0;

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (auto c : coeffs) n += c != 0;
    return n;
  }
  bool operator==(const LinearConstraint&) const = default;
};

/// 0/1 linear equality system.
class LinearSystem {
 public:
  LinearSystem() = default;
  explicit LinearSystem(Var num_vars) : num_vars_(num_vars) {}

  Var num_vars() const { return num_vars_; }
  std::size_t num_constraints() const { return rows_.size(); }
  const std::vector<LinearConstraint>& constraints() const { return rows_; }
  const LinearConstraint& operator[](std::size_t i) const { return rows_[i]; }

  void add(LinearConstraint row) {
    if (row.coeffs.size() != num_vars_)
      throw InvalidInput("constraint has " + std::to_string(row.coeffs.size()) + " coefficients, system has " +
                         std::to_string(num_vars_) + " variables");
    rows_.push_back(std::move(row));
  }

  /// Does the 0/1 vector (x_1..x_n) satisfy every row?
  bool satisfied_by(const Assignment& x) const {
    if (x.size() != num_vars_) return false;
    for (const auto& row : rows_) {
      std::int64_t s = 0;
      for (Var j = 0; j < num_vars_; ++j)
        if (x[j + 1]) s += row.coeffs[j];
      if (s != row.rhs) return false;
    }
    return true;
  }

  bool operator==(const LinearSystem&) const = default;

 private:
  Var num_vars_ = 0;
  std::vector<LinearConstraint> rows_;
};

/// Pseudo-Boolean OPB text: a `* #variable= V #constraint= C` header and
/// one `+k xi ... = rhs ;` line per row. Zero coefficients are omitted.
inline std::string emit_opb(const LinearSystem& sys) {
  std::string out = "* #variable= " + std::to_string(sys.num_vars()) + " #constraint= " +
                    std::to_string(sys.num_constraints()) + "\n";
  for (const auto& row : sys.constraints()) {
    for (Var j = 0; j < sys.num_vars(); ++j) {
      const std::int64_t c = row.coeffs[j];
      if (c == 0) continue;
      out += c > 0 ? "+" : "-";
      out += std::to_string(c > 0 ? c : -c);
      out += " x" + std::to_string(j + 1) + " ";
    }
    out += "= " + std::to_string(row.rhs) + " ;\n";
  }
  return out;
}

inline LinearSystem parse_opb(std::istream& in) {
  static const std::regex header(R"(\*\s*#variable=\s*(\d+)\s+#constraint=\s*(\d+).*)");
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::size_t declared_rows = 0;
  LinearSystem sys;
  while (std::getline(in, line)) {
    ++lineno;
    const auto where = [&] { return "line " + std::to_string(lineno) + ": "; };
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t")] == '*') {
      std::smatch m;
      if (!have_header && std::regex_match(line, m, header)) {
        sys = LinearSystem(static_cast<Var>(std::stoul(m[1])));
        declared_rows = std::stoul(m[2]);
        have_header = true;
      }
      continue;
    }
    if (!have_header) throw ParseError(where() + "constraint before '* #variable= ... #constraint= ...' header");
    std::istringstream ls(line);
    LinearConstraint row{std::vector<std::int64_t>(sys.num_vars(), 0), 0};
    std::string tok;
    bool closed = false;
    while (ls >> tok) {
      if (tok == "=") {
        std::string rhs, semi;
        if (!(ls >> rhs >> semi) || semi != ";" || !detail::parse_int(rhs, row.rhs))
          throw ParseError(where() + "expected '= <rhs> ;'");
        closed = true;
        break;
      }
      if (tok == ">=" || tok == "<=" || tok == ">" || tok == "<")
        throw ParseError(where() + "only equality constraints are supported");
      std::int64_t coeff;
      std::string var;
      if (!detail::parse_int(tok, coeff) || !(ls >> var) || var.size() < 2 || var[0] != 'x')
        throw ParseError(where() + "malformed term near '" + tok + "'");
      std::int64_t idx;
      if (!detail::parse_int(std::string_view(var).substr(1), idx) || idx < 1 || idx > sys.num_vars())
        throw ParseError(where() + "variable '" + var + "' out of range");
      row.coeffs[static_cast<std::size_t>(idx - 1)] += coeff;
    }
    if (!closed) throw ParseError(where() + "constraint is not terminated by '= <rhs> ;'");
    if (ls >> tok) throw ParseError(where() + "trailing text after ';'");
    sys.add(std::move(row));
  }
  if (!have_header) throw ParseError("missing OPB header");
  if (sys.num_constraints() != declared_rows)
    throw ParseError("header declares " + std::to_string(declared_rows) + " constraints, found " +
                     std::to_string(sys.num_constraints()));
  return sys;
}

inline LinearSystem parse_opb(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_opb(in);
}

}  // namespace satrand
