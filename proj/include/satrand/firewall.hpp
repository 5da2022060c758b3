#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "satrand/cnf.hpp"
#include "satrand/formula.hpp"
#include "satrand/rng.hpp"

namespace satrand::firewall {

enum class Action { kAccept, kDeny };

inline std::string_view to_string(Action a) { return a == Action::kAccept ? "accept" : "deny"; }

/// Bit widths of the header fields. IP addresses are split into blocks
/// (octets in the standard layout) so that wildcards apply per block.
/// Bit order: src_ip, src_port, dst_ip, dst_port; most significant bit first
/// within each field; header bit i is CNF variable i + 1.
struct HeaderLayout {
  unsigned ip_blocks = 4;
  unsigned block_bits = 8;
  unsigned port_bits = 16;

  static HeaderLayout standard() { return {}; }

  unsigned ip_bits() const { return ip_blocks * block_bits; }
  unsigned total_bits() const { return 2 * ip_bits() + 2 * port_bits; }
  std::uint32_t block_values() const { return std::uint32_t{1} << block_bits; }
  std::uint32_t port_values() const { return std::uint32_t{1} << port_bits; }

  unsigned src_ip_offset() const { return 0; }
  unsigned src_port_offset() const { return ip_bits(); }
  unsigned dst_ip_offset() const { return ip_bits() + port_bits; }
  unsigned dst_port_offset() const { return 2 * ip_bits() + port_bits; }

  /// "<blocks>x<block_bits>,<port_bits>", e.g. "4x8,16".
  static HeaderLayout parse(std::string_view spec) {
    HeaderLayout l;
    unsigned a = 0, b = 0, c = 0;
    char x = 0, comma = 0;
    std::istringstream in{std::string(spec)};
    if (!(in >> a >> x >> b >> comma >> c) || x != 'x' || comma != ',' || !(in >> std::ws).eof())
      throw InvalidInput("layout '" + std::string(spec) + "' is not of the form <blocks>x<bits>,<port_bits>");
    l.ip_blocks = a;
    l.block_bits = b;
    l.port_bits = c;
    l.validate();
    return l;
  }
  std::string to_string() const {
    return std::to_string(ip_blocks) + "x" + std::to_string(block_bits) + "," + std::to_string(port_bits);
  }

  void validate() const {
    if (ip_blocks == 0 || block_bits == 0 || block_bits > 16 || port_bits > 20 || total_bits() == 0)
      throw InvalidInput("unsupported header layout " + to_string());
  }

  bool operator==(const HeaderLayout&) const = default;
};

using FieldValue = std::optional<std::uint32_t>;  // nullopt = wildcard

struct FirewallRule {
  std::vector<FieldValue> src_ip;  // one entry per block
  FieldValue src_port;
  std::vector<FieldValue> dst_ip;
  FieldValue dst_port;
  Action action = Action::kAccept;

  bool operator==(const FirewallRule&) const = default;
};

/// Ordered rule list with first-match semantics.
struct FirewallPolicy {
  std::vector<FirewallRule> rules;
  Action default_action = Action::kDeny;

  bool operator==(const FirewallPolicy&) const = default;
};

struct PacketHeader {
  std::vector<std::uint32_t> src_ip;
  std::uint32_t src_port = 0;
  std::vector<std::uint32_t> dst_ip;
  std::uint32_t dst_port = 0;

  bool operator==(const PacketHeader&) const = default;
};

inline void validate(const FirewallRule& r, const HeaderLayout& layout) {
  auto check = [](const FieldValue& v, std::uint32_t limit, const char* what) {
    if (v && *v >= limit)
      throw InvalidInput(std::string(what) + " value " + std::to_string(*v) + " exceeds field width");
  };
  if (r.src_ip.size() != layout.ip_blocks || r.dst_ip.size() != layout.ip_blocks)
    throw InvalidInput("rule IP has " + std::to_string(r.src_ip.size()) + " blocks, layout expects " +
                       std::to_string(layout.ip_blocks));
  for (const auto& b : r.src_ip) check(b, layout.block_values(), "source IP block");
  for (const auto& b : r.dst_ip) check(b, layout.block_values(), "destination IP block");
  check(r.src_port, layout.port_values(), "source port");
  check(r.dst_port, layout.port_values(), "destination port");
}

inline void validate(const FirewallPolicy& p, const HeaderLayout& layout) {
  for (const auto& r : p.rules) validate(r, layout);
}

// ---------------------------------------------------------------------------
// Direct simulation

inline bool matches(const FirewallRule& r, const PacketHeader& h) {
  auto eq = [](const FieldValue& f, std::uint32_t v) { return !f || *f == v; };
  for (std::size_t i = 0; i < r.src_ip.size(); ++i)
    if (!eq(r.src_ip[i], h.src_ip[i]) || !eq(r.dst_ip[i], h.dst_ip[i])) return false;
  return eq(r.src_port, h.src_port) && eq(r.dst_port, h.dst_port);
}

/// First-match evaluation.
inline Action evaluate(const FirewallPolicy& p, const PacketHeader& h) {
  for (const auto& r : p.rules)
    if (matches(r, h)) return r.action;
  return p.default_action;
}

/// Can some header match both rules?
inline bool rules_overlap(const FirewallRule& a, const FirewallRule& b) {
  auto compatible = [](const FieldValue& x, const FieldValue& y) { return !x || !y || *x == *y; };
  for (std::size_t i = 0; i < a.src_ip.size(); ++i)
    if (!compatible(a.src_ip[i], b.src_ip[i]) || !compatible(a.dst_ip[i], b.dst_ip[i])) return false;
  return compatible(a.src_port, b.src_port) && compatible(a.dst_port, b.dst_port);
}

// ---------------------------------------------------------------------------
// Bit encoding

namespace detail {

inline void put_bits(std::vector<std::uint8_t>& bits, unsigned offset, unsigned width, std::uint32_t value) {
  for (unsigned i = 0; i < width; ++i) bits[offset + i] = (value >> (width - 1 - i)) & 1U;
}

inline std::uint32_t get_bits(const std::vector<std::uint8_t>& bits, unsigned offset, unsigned width) {
  std::uint32_t v = 0;
  for (unsigned i = 0; i < width; ++i) v = (v << 1) | (bits[offset + i] ? 1U : 0U);
  return v;
}

inline void field_literals(std::vector<Formula>& out, unsigned offset, unsigned width, std::uint32_t value) {
  for (unsigned i = 0; i < width; ++i) {
    const bool one = (value >> (width - 1 - i)) & 1U;
    const Formula b = Formula::var(offset + i + 1);
    out.push_back(one ? b : Formula::negate(b));
  }
}

}  // namespace detail

inline Assignment header_to_assignment(const PacketHeader& h, const HeaderLayout& layout) {
  std::vector<std::uint8_t> bits(layout.total_bits(), 0);
  for (unsigned i = 0; i < layout.ip_blocks; ++i) {
    detail::put_bits(bits, layout.src_ip_offset() + i * layout.block_bits, layout.block_bits, h.src_ip[i]);
    detail::put_bits(bits, layout.dst_ip_offset() + i * layout.block_bits, layout.block_bits, h.dst_ip[i]);
  }
  detail::put_bits(bits, layout.src_port_offset(), layout.port_bits, h.src_port);
  detail::put_bits(bits, layout.dst_port_offset(), layout.port_bits, h.dst_port);
  return Assignment(std::move(bits));
}

/// Positional decode of header bits x_1..x_k (extra variables are ignored).
inline PacketHeader decode_header(const Assignment& sol, const HeaderLayout& layout) {
  if (sol.size() < layout.total_bits()) throw InvalidInput("assignment shorter than the header layout");
  const auto& bits = sol.bits();
  PacketHeader h;
  for (unsigned i = 0; i < layout.ip_blocks; ++i) {
    h.src_ip.push_back(detail::get_bits(bits, layout.src_ip_offset() + i * layout.block_bits, layout.block_bits));
    h.dst_ip.push_back(detail::get_bits(bits, layout.dst_ip_offset() + i * layout.block_bits, layout.block_bits));
  }
  h.src_port = detail::get_bits(bits, layout.src_port_offset(), layout.port_bits);
  h.dst_port = detail::get_bits(bits, layout.dst_port_offset(), layout.port_bits);
  return h;
}

/// Header number `index` in the natural order of the bit vector
/// (header bit 1 most significant). Used for exhaustive enumeration.
inline PacketHeader header_from_index(std::uint64_t index, const HeaderLayout& layout) {
  const unsigned k = layout.total_bits();
  std::vector<std::uint8_t> bits(k);
  for (unsigned i = 0; i < k; ++i) bits[i] = (index >> (k - 1 - i)) & 1U;
  return decode_header(Assignment(std::move(bits)), layout);
}

/// Conjunction over the bits of every concrete field; wildcards add nothing.
inline Formula match_predicate(const FirewallRule& r, const HeaderLayout& layout) {
  validate(r, layout);
  std::vector<Formula> lits;
  for (unsigned i = 0; i < layout.ip_blocks; ++i) {
    if (r.src_ip[i])
      detail::field_literals(lits, layout.src_ip_offset() + i * layout.block_bits, layout.block_bits, *r.src_ip[i]);
  }
  if (r.src_port) detail::field_literals(lits, layout.src_port_offset(), layout.port_bits, *r.src_port);
  for (unsigned i = 0; i < layout.ip_blocks; ++i) {
    if (r.dst_ip[i])
      detail::field_literals(lits, layout.dst_ip_offset() + i * layout.block_bits, layout.block_bits, *r.dst_ip[i]);
  }
  if (r.dst_port) detail::field_literals(lits, layout.dst_port_offset(), layout.port_bits, *r.dst_port);
  return Formula::conj(std::move(lits));
}

namespace detail {

/// sum over accept rules i of (M_i & ~M_1 & ... & ~M_{i-1}), plus the
/// all-miss term when the default is accept.
inline Formula first_match_chain(const std::vector<const FirewallRule*>& rules, Action default_action,
                                 const HeaderLayout& layout) {
  std::vector<Formula> miss;  // shared ~M_j nodes
  std::vector<Formula> terms;
  for (const FirewallRule* r : rules) {
    Formula m = match_predicate(*r, layout);
    if (r->action == Action::kAccept) {
      std::vector<Formula> t = miss;
      t.push_back(m);
      terms.push_back(Formula::conj(std::move(t)));
    }
    miss.push_back(Formula::negate(m));
  }
  if (default_action == Action::kAccept) terms.push_back(Formula::conj(miss));
  return Formula::disj(std::move(terms));
}

}  // namespace detail

/// Formula true exactly on the headers the policy accepts.
///
/// With hoist_independent, rules that overlap no other rule are pulled out
/// of the first-match chain: accepted-by-independent | (no independent
/// deny matches & chain over the remaining rules).
inline Formula encode_policy(const FirewallPolicy& p, const HeaderLayout& layout, bool hoist_independent = false) {
  validate(p, layout);
  std::vector<const FirewallRule*> dependent;
  std::vector<Formula> accept_any, deny_none;
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    bool independent = hoist_independent;
    for (std::size_t j = 0; independent && j < p.rules.size(); ++j)
      if (j != i && rules_overlap(p.rules[i], p.rules[j])) independent = false;
    if (!independent) {
      dependent.push_back(&p.rules[i]);
      continue;
    }
    Formula m = match_predicate(p.rules[i], layout);
    if (p.rules[i].action == Action::kAccept)
      accept_any.push_back(m);
    else
      deny_none.push_back(Formula::negate(m));
  }
  Formula chain = detail::first_match_chain(dependent, p.default_action, layout);
  if (accept_any.empty() && deny_none.empty()) return chain;
  deny_none.push_back(chain);
  accept_any.push_back(Formula::conj(std::move(deny_none)));
  return Formula::disj(std::move(accept_any));
}

/// Tseitin CNF of (F1 | F2) & (~F1 | ~F2): satisfiable iff the policies
/// disagree on some header. Variables 1..k are the header bits.
inline CnfInstance equivalence_cnf(const FirewallPolicy& p1, const FirewallPolicy& p2, const HeaderLayout& layout,
                                   bool hoist_independent = false) {
  Formula f1 = encode_policy(p1, layout, hoist_independent);
  Formula f2 = encode_policy(p2, layout, hoist_independent);
  Formula differ = Formula::conj({Formula::disj({f1, f2}), Formula::disj({Formula::negate(f1), Formula::negate(f2)})});
  return tseitin_assert(differ, layout.total_bits()).cnf;
}

/// Decodes a model of equivalence_cnf and confirms that the two policies
/// really disagree on it; FraudDetected otherwise.
inline PacketHeader decode_witness(const Assignment& sol, const HeaderLayout& layout, const FirewallPolicy& p1,
                                   const FirewallPolicy& p2) {
  PacketHeader h = decode_header(sol, layout);
  if (evaluate(p1, h) == evaluate(p2, h))
    throw FraudDetected("decoded header does not distinguish the two policies");
  return h;
}

// ---------------------------------------------------------------------------
// Per-field value mapping

/// One bijection per IP block position (shared by source and destination)
/// and one for ports (shared by source and destination).
struct FieldMappingSecret {
  std::vector<std::vector<std::uint32_t>> block_maps;
  std::vector<std::uint32_t> port_map;
  std::uint64_t seed = 0;

  static FieldMappingSecret identity(const HeaderLayout& layout) {
    FieldMappingSecret s;
    std::vector<std::uint32_t> id(layout.block_values());
    for (std::uint32_t i = 0; i < id.size(); ++i) id[i] = i;
    s.block_maps.assign(layout.ip_blocks, id);
    s.port_map.resize(layout.port_values());
    for (std::uint32_t i = 0; i < s.port_map.size(); ++i) s.port_map[i] = i;
    return s;
  }

  static FieldMappingSecret random(const HeaderLayout& layout, std::uint64_t seed) {
    FieldMappingSecret s = identity(layout);
    s.seed = seed;
    Rng rng(seed);
    for (auto& m : s.block_maps) rng.shuffle(std::span<std::uint32_t>(m));
    rng.shuffle(std::span<std::uint32_t>(s.port_map));
    return s;
  }

  using Pairs = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

  /// Extends partial maps to bijections: unmentioned inputs take the unused
  /// outputs in ascending order.
  static FieldMappingSecret from_pairs(const HeaderLayout& layout, const std::vector<Pairs>& block_pairs,
                                       const Pairs& port_pairs) {
    FieldMappingSecret s;
    for (unsigned b = 0; b < layout.ip_blocks; ++b)
      s.block_maps.push_back(complete(layout.block_values(), b < block_pairs.size() ? block_pairs[b] : Pairs{}));
    s.port_map = complete(layout.port_values(), port_pairs);
    return s;
  }

  bool is_bijection() const {
    auto ok = [](const std::vector<std::uint32_t>& m) {
      std::vector<std::uint8_t> seen(m.size(), 0);
      for (auto v : m) {
        if (v >= m.size() || seen[v]) return false;
        seen[v] = 1;
      }
      return true;
    };
    return std::all_of(block_maps.begin(), block_maps.end(), ok) && ok(port_map);
  }

 private:
  static std::vector<std::uint32_t> complete(std::uint32_t size, const Pairs& pairs) {
    constexpr std::uint32_t kUnset = UINT32_MAX;
    std::vector<std::uint32_t> m(size, kUnset);
    std::vector<std::uint8_t> used(size, 0);
    for (auto [from, to] : pairs) {
      if (from >= size || to >= size || m[from] != kUnset || used[to])
        throw InvalidInput("field mapping pairs are not a partial bijection");
      m[from] = to;
      used[to] = 1;
    }
    std::uint32_t next = 0;
    for (auto& v : m) {
      if (v != kUnset) continue;
      while (used[next]) ++next;
      v = next;
      used[next] = 1;
    }
    return m;
  }
};

inline FirewallRule map_rule(const FirewallRule& r, const FieldMappingSecret& s) {
  FirewallRule out = r;
  for (std::size_t i = 0; i < r.src_ip.size(); ++i) {
    if (r.src_ip[i]) out.src_ip[i] = s.block_maps[i][*r.src_ip[i]];
    if (r.dst_ip[i]) out.dst_ip[i] = s.block_maps[i][*r.dst_ip[i]];
  }
  if (r.src_port) out.src_port = s.port_map[*r.src_port];
  if (r.dst_port) out.dst_port = s.port_map[*r.dst_port];
  return out;
}

inline FirewallPolicy map_fields(const FirewallPolicy& p, const FieldMappingSecret& s) {
  FirewallPolicy out{{}, p.default_action};
  for (const auto& r : p.rules) out.rules.push_back(map_rule(r, s));
  return out;
}

/// Random per-block and port bijections applied uniformly to every rule.
inline std::pair<FirewallPolicy, FieldMappingSecret> map_fields(const FirewallPolicy& p, const HeaderLayout& layout,
                                                                std::uint64_t seed) {
  validate(p, layout);
  FieldMappingSecret s = FieldMappingSecret::random(layout, seed);
  return {map_fields(p, s), std::move(s)};
}

inline PacketHeader map_header(const PacketHeader& h, const FieldMappingSecret& s) {
  PacketHeader out = h;
  for (std::size_t i = 0; i < h.src_ip.size(); ++i) {
    out.src_ip[i] = s.block_maps[i][h.src_ip[i]];
    out.dst_ip[i] = s.block_maps[i][h.dst_ip[i]];
  }
  out.src_port = s.port_map[h.src_port];
  out.dst_port = s.port_map[h.dst_port];
  return out;
}

/// Occurrence count of every concrete port value (source and destination).
inline std::map<std::uint32_t, std::size_t> port_histogram(const FirewallPolicy& p) {
  std::map<std::uint32_t, std::size_t> h;
  for (const auto& r : p.rules) {
    if (r.src_port) ++h[*r.src_port];
    if (r.dst_port) ++h[*r.dst_port];
  }
  return h;
}

// ---------------------------------------------------------------------------
// Policy files: `<src_ip> <src_port> <dst_ip> <dst_port> <accept|deny>` per
// rule, `*` wildcards per block or port, one `default <accept|deny>` line,
// `#` comments.

namespace detail {

inline FieldValue parse_field(const std::string& tok, std::uint32_t limit, const std::string& where) {
  if (tok == "*") return std::nullopt;
  std::int64_t v;
  if (!satrand::detail::parse_int(tok, v) || v < 0 || v >= static_cast<std::int64_t>(limit))
    throw ParseError(where + "value '" + tok + "' out of range");
  return static_cast<std::uint32_t>(v);
}

inline std::vector<FieldValue> parse_ip(const std::string& tok, const HeaderLayout& layout, const std::string& where) {
  std::vector<FieldValue> out;
  std::string part;
  std::istringstream in(tok);
  while (std::getline(in, part, '.')) out.push_back(parse_field(part, layout.block_values(), where));
  if (out.size() != layout.ip_blocks)
    throw ParseError(where + "address '" + tok + "' needs " + std::to_string(layout.ip_blocks) + " blocks");
  return out;
}

inline Action parse_action(const std::string& tok, const std::string& where) {
  if (tok == "accept") return Action::kAccept;
  if (tok == "deny") return Action::kDeny;
  throw ParseError(where + "unknown action '" + tok + "'");
}

inline std::string format_field(const FieldValue& v) { return v ? std::to_string(*v) : "*"; }

inline std::string format_ip(const std::vector<FieldValue>& ip) {
  std::string s;
  for (std::size_t i = 0; i < ip.size(); ++i) s += (i ? "." : "") + format_field(ip[i]);
  return s;
}

}  // namespace detail

inline FirewallPolicy parse_policy(std::istream& in, const HeaderLayout& layout) {
  FirewallPolicy p;
  bool have_default = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "default") {
      if (tok.size() != 2 || have_default) throw ParseError(where + "expected a single 'default <accept|deny>'");
      p.default_action = detail::parse_action(tok[1], where);
      have_default = true;
      continue;
    }
    if (tok.size() != 5) throw ParseError(where + "expected '<src_ip> <src_port> <dst_ip> <dst_port> <action>'");
    FirewallRule r;
    r.src_ip = detail::parse_ip(tok[0], layout, where);
    r.src_port = detail::parse_field(tok[1], layout.port_values(), where);
    r.dst_ip = detail::parse_ip(tok[2], layout, where);
    r.dst_port = detail::parse_field(tok[3], layout.port_values(), where);
    r.action = detail::parse_action(tok[4], where);
    p.rules.push_back(std::move(r));
  }
  if (!have_default) throw ParseError("policy has no 'default <accept|deny>' line");
  return p;
}

inline FirewallPolicy parse_policy(std::string_view text, const HeaderLayout& layout) {
  std::istringstream in{std::string(text)};
  return parse_policy(in, layout);
}

inline std::string emit_policy(const FirewallPolicy& p) {
  std::string out;
  for (const auto& r : p.rules)
    out += detail::format_ip(r.src_ip) + " " + detail::format_field(r.src_port) + " " + detail::format_ip(r.dst_ip) +
           " " + detail::format_field(r.dst_port) + " " + std::string(to_string(r.action)) + "\n";
  out += "default " + std::string(to_string(p.default_action)) + "\n";
  return out;
}

}  // namespace satrand::firewall
