#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "satrand/satrand.hpp"

namespace satrand::cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
}

/// Errors from a named input file carry the file name.
template <class F>
auto with_file(const std::string& path, F&& parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

CnfInstance load_cnf(const std::string& path) {
  return with_file(path, [](const std::string& t) { return parse_dimacs(t); });
}

std::vector<CostTerm> load_costs(const std::string& path) {
  return with_file(path, [](const std::string& t) { return parse_cost_terms(t); });
}

bool looks_like_opb(const std::string& path, const std::string& text) {
  if (fs::path(path).extension() == ".opb") return true;
  const auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && text.compare(first, 11, "* #variable") == 0;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

firewall::FirewallPolicy load_policy(const std::string& path, const firewall::HeaderLayout& layout) {
  return with_file(path, [&](const std::string& t) { return firewall::parse_policy(t, layout); });
}

// ---------------------------------------------------------------------------

struct Context {
  std::ostream& out;
  std::ostream& err;
};

int cmd_randomize(Context& ctx, const std::string& method_name, std::uint64_t seed, const std::string& in_path,
                  std::string out_path, std::string secret_path, std::optional<std::size_t> row_weight) {
  const Method method = parse_method(method_name);
  if (method != Method::kIso && method != Method::kMatrix && method != Method::kSolutionSet)
    throw InvalidInput("--method must be iso, matrix or gf2");
  const CnfInstance inst = load_cnf(in_path);
  OutsourcedJob job = randomize_instance(inst, method, seed, row_weight);
  if (out_path.empty()) out_path = with_suffix(in_path, method == Method::kMatrix ? ".opb" : ".rand.cnf");
  if (secret_path.empty()) secret_path = with_suffix(in_path, ".key");
  write_file(out_path, outsourced_text(job.instance));
  write_file(secret_path, emit_record(job.record));
  ctx.out << "wrote " << out_path << " and " << secret_path << "\n";
  return kOk;
}

int cmd_derandomize(Context& ctx, const std::string& secret_path, const std::string& sol_path,
                    const std::string& original_path, const std::string& out_path) {
  const RandomizationRecord rec = with_file(secret_path, [](const std::string& t) { return parse_record(t); });
  const Assignment sol = with_file(sol_path, [](const std::string& t) { return parse_solution(t); });
  const CnfInstance original = load_cnf(original_path);
  const Assignment x = derandomize(sol, rec, original);
  const std::string text = emit_solution(x);
  if (out_path.empty())
    ctx.out << text;
  else
    write_file(out_path, text);
  return kOk;
}

int cmd_to3cnf(Context& ctx, const std::string& in_path, const std::string& out_path) {
  const ThreeCnf t = to_three_cnf(load_cnf(in_path));
  const std::string text = "c originals 1.." + std::to_string(t.original_variables) + "\n" + emit_dimacs(t.cnf);
  if (out_path.empty())
    ctx.out << text;
  else
    write_file(out_path, text);
  return kOk;
}

int cmd_mincost_randomize(Context& ctx, const std::string& in_path, const std::string& costs_path,
                          const std::string& method_name, std::uint64_t seed, std::optional<unsigned> beta,
                          std::optional<std::size_t> row_weight, std::string out_path, std::string cost_out,
                          std::string secret_path) {
  const CnfInstance cnf = load_cnf(in_path);
  const MincostInstance inst = make_mincost(cnf, load_costs(costs_path));
  const ObjectiveMethod om = method_name == "matrix" ? ObjectiveMethod::kMatrix : ObjectiveMethod::kSolutionSet;
  if (method_name != "matrix" && method_name != "gf2") throw InvalidInput("--method must be matrix or gf2");
  RandomizedMincost r = randomize_mincost(inst, seed, om, beta, row_weight);
  RandomizationRecord rec{Method::kMincost, r.secret, instance_digest(cnf), seed, 0};
  if (out_path.empty()) out_path = with_suffix(in_path, om == ObjectiveMethod::kMatrix ? ".opb" : ".rand.cnf");
  if (cost_out.empty()) cost_out = with_suffix(in_path, ".rand.w");
  if (secret_path.empty()) secret_path = with_suffix(in_path, ".key");
  write_file(out_path, std::visit(
                           [](const auto& i) {
                             if constexpr (std::is_same_v<std::decay_t<decltype(i)>, CnfInstance>)
                               return emit_dimacs(i);
                             else
                               return emit_opb(i);
                           },
                           r.instance));
  write_file(cost_out, emit_cost_terms(r.cost));
  write_file(secret_path, emit_record(rec));
  ctx.out << "wrote " << out_path << ", " << cost_out << " and " << secret_path << "\n";
  return kOk;
}

int cmd_max3sat_reduce(Context& ctx, const std::string& in_path, std::string out_path, std::string cost_out,
                       const std::string& randomize_method, std::uint64_t seed, std::string secret_path) {
  const CnfInstance cnf = load_cnf(in_path);
  const Max3SatReduction red = max3sat_to_mincost(Max3SatInstance{cnf});
  if (out_path.empty()) out_path = with_suffix(in_path, ".mincost.cnf");
  if (cost_out.empty()) cost_out = with_suffix(in_path, ".mincost.w");
  if (randomize_method.empty()) {
    write_file(out_path, emit_dimacs(red.mincost.cnf));
    write_file(cost_out, emit_cost_terms(cost_terms(red.mincost)));
  } else {
    if (randomize_method != "matrix" && randomize_method != "gf2")
      throw InvalidInput("--randomize must be matrix or gf2");
    const auto om = randomize_method == "matrix" ? ObjectiveMethod::kMatrix : ObjectiveMethod::kSolutionSet;
    RandomizedMincost r = randomize_mincost(red.mincost, seed, om);
    RandomizationRecord rec{Method::kMax3Sat, r.secret, instance_digest(cnf), seed, red.offset};
    if (secret_path.empty()) secret_path = with_suffix(in_path, ".key");
    if (const auto* c = std::get_if<CnfInstance>(&r.instance))
      write_file(out_path, emit_dimacs(*c));
    else
      write_file(out_path, emit_opb(std::get<LinearSystem>(r.instance)));
    write_file(cost_out, emit_cost_terms(r.cost));
    write_file(secret_path, emit_record(rec));
  }
  ctx.out << "offset " << red.offset << "\n";
  ctx.out << "max satisfied = " << red.offset << " - min cost\n";
  return kOk;
}

int cmd_fw_encode(Context& ctx, const std::string& p1_path, const std::string& p2_path, const std::string& layout_spec,
                  bool hoist, const std::string& out_path) {
  const auto layout = firewall::HeaderLayout::parse(layout_spec);
  const auto p1 = load_policy(p1_path, layout);
  const auto p2 = load_policy(p2_path, layout);
  const CnfInstance cnf = firewall::equivalence_cnf(p1, p2, layout, hoist);
  const std::string text = "c header bits 1.." + std::to_string(layout.total_bits()) + " layout " + layout.to_string() +
                           "\n" + emit_dimacs(cnf);
  if (out_path.empty())
    ctx.out << text;
  else
    write_file(out_path, text);
  return kOk;
}

int cmd_fw_decode(Context& ctx, const std::string& p1_path, const std::string& p2_path, const std::string& layout_spec,
                  const std::string& sol_path) {
  const auto layout = firewall::HeaderLayout::parse(layout_spec);
  const auto p1 = load_policy(p1_path, layout);
  const auto p2 = load_policy(p2_path, layout);
  const Assignment sol = with_file(sol_path, [](const std::string& t) { return parse_solution(t); });
  const auto h = firewall::decode_witness(sol, layout, p1, p2);
  auto ip = [](const std::vector<std::uint32_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "." : "") + std::to_string(v[i]);
    return s;
  };
  ctx.out << ip(h.src_ip) << " " << h.src_port << " " << ip(h.dst_ip) << " " << h.dst_port << "\n";
  ctx.out << "p1 " << firewall::to_string(firewall::evaluate(p1, h)) << ", p2 "
          << firewall::to_string(firewall::evaluate(p2, h)) << "\n";
  return kOk;
}

firewall::FieldMappingSecret::Pairs pairs_from_json(const nlohmann::json& j) {
  firewall::FieldMappingSecret::Pairs out;
  for (const auto& p : j) out.emplace_back(p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>());
  return out;
}

int cmd_fw_map(Context& ctx, const std::string& in_path, const std::string& layout_spec, std::uint64_t seed,
               const std::string& pairs_path, const std::string& out_path, const std::string& secret_path) {
  const auto layout = firewall::HeaderLayout::parse(layout_spec);
  const auto policy = load_policy(in_path, layout);
  firewall::FieldMappingSecret secret;
  if (pairs_path.empty()) {
    secret = firewall::FieldMappingSecret::random(layout, seed);
  } else {
    secret = with_file(pairs_path, [&](const std::string& t) {
      try {
        const auto j = nlohmann::json::parse(t);
        std::vector<firewall::FieldMappingSecret::Pairs> blocks;
        for (const auto& b : j.at("blocks")) blocks.push_back(pairs_from_json(b));
        return firewall::FieldMappingSecret::from_pairs(layout, blocks, pairs_from_json(j.at("ports")));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
      }
    });
  }
  firewall::validate(policy, layout);
  const std::string text = firewall::emit_policy(firewall::map_fields(policy, secret));
  if (out_path.empty())
    ctx.out << text;
  else
    write_file(out_path, text);
  if (!secret_path.empty()) {
    nlohmann::json j{{"layout", layout.to_string()},
                     {"seed", secret.seed},
                     {"block_maps", secret.block_maps},
                     {"port_map", secret.port_map}};
    write_file(secret_path, j.dump() + "\n");
  }
  return kOk;
}

int cmd_solve_brute(Context& ctx, const std::string& in_path, const std::string& costs_path, Var var_limit,
                    const std::string& out_path) {
  const std::string text = read_file(in_path);
  std::optional<Assignment> witness;
  std::optional<std::uint64_t> optimum;
  bool sat = false;
  std::uint64_t count = 0;
  if (looks_like_opb(in_path, text)) {
    const LinearSystem sys = with_file(in_path, [](const std::string& t) { return parse_opb(t); });
    const Var limit = var_limit ? var_limit : kDefaultLinearVarLimit;
    if (!costs_path.empty()) {
      MinResult r = brute_linear_min(sys, load_costs(costs_path), limit);
      sat = r.feasible;
      witness = r.argmin;
      if (sat) optimum = r.cost;
    } else {
      LinearOracleResult r = brute_linear(sys, limit);
      sat = r.feasible;
      witness = r.witness;
      count = r.count;
    }
  } else {
    const CnfInstance cnf = load_cnf(in_path);
    const Var limit = var_limit ? var_limit : kDefaultSatVarLimit;
    if (!costs_path.empty()) {
      MinResult r = brute_mincost(make_mincost(cnf, load_costs(costs_path)), limit);
      sat = r.feasible;
      witness = r.argmin;
      if (sat) optimum = r.cost;
    } else {
      SatOracleResult r = brute_sat(cnf, limit);
      sat = r.satisfiable;
      witness = r.witness;
      count = r.count;
    }
  }
  ctx.out << (sat ? "SAT" : "UNSAT") << "\n";
  if (optimum) ctx.out << "optimum " << *optimum << "\n";
  if (!optimum) ctx.out << "solutions " << count << "\n";
  if (witness) {
    if (out_path.empty())
      ctx.out << "v " << emit_solution(*witness);
    else
      write_file(out_path, emit_solution(*witness));
  }
  return kOk;
}

int cmd_outsource(Context& ctx, const std::string& in_path, const std::string& method_name,
                  const std::string& providers, std::uint64_t seed, std::optional<std::size_t> row_weight,
                  bool timings) {
  const CnfInstance inst = load_cnf(in_path);
  const OutsourceReport rep =
      outsource(inst, parse_method(method_name), parse_provider_mix(providers), seed, SolverLimits{}, row_weight);
  ctx.out << rep.to_text(timings);
  return kOk;
}

int cmd_verify(Context& ctx, const std::string& in_path, const std::string& sol_path) {
  const std::string text = read_file(in_path);
  const Assignment sol = with_file(sol_path, [](const std::string& t) { return parse_solution(t); });
  bool ok;
  if (looks_like_opb(in_path, text)) {
    const LinearSystem sys = with_file(in_path, [](const std::string& t) { return parse_opb(t); });
    if (sol.size() != sys.num_vars()) throw InvalidInput(sol_path + ": solution does not cover the system's variables");
    ok = sys.satisfied_by(sol);
  } else {
    const CnfInstance cnf = load_cnf(in_path);
    if (sol.size() < cnf.num_variables())
      throw InvalidInput(sol_path + ": solution does not cover the instance's variables");
    ok = satisfies(cnf, sol);
  }
  ctx.out << (ok ? "valid" : "invalid") << "\n";
  return ok ? kOk : kInvalid;
}

}  // namespace

Assignment parse_solution(const std::string& text) {
  std::vector<std::int64_t> lits;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == "v" || tok == "s") continue;
    if (tok == "c") {
      std::getline(in, tok);
      continue;
    }
    std::int64_t v;
    if (!satrand::detail::parse_int(tok, v)) throw ParseError("solution: '" + tok + "' is not a literal");
    if (v != 0) lits.push_back(v);
  }
  Var n = 0;
  for (auto l : lits) n = std::max<Var>(n, static_cast<Var>(l < 0 ? -l : l));
  std::vector<std::uint8_t> bits(n, 0), seen(n, 0);
  for (auto l : lits) {
    const Var v = static_cast<Var>(l < 0 ? -l : l);
    if (seen[v - 1]) throw ParseError("solution: variable " + std::to_string(v) + " appears twice");
    seen[v - 1] = 1;
    bits[v - 1] = l > 0;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ParseError("solution: every variable up to the largest one must be given");
  return Assignment(std::move(bits));
}

std::string emit_solution(const Assignment& a) {
  std::string s;
  for (Var v = 1; v <= a.size(); ++v) s += (a[v] ? "" : "-") + std::to_string(v) + " ";
  return s + "0\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"satrand: randomize SAT instances for outsourcing and map answers back"};
  app.require_subcommand(1);
  Context ctx{out, err};

  std::string method, in, out_path, secret, solution, original, costs, cost_out, p1, p2, layout = "4x8,16", pairs,
      providers = "honest", randomize_with;
  std::uint64_t seed = 0;
  std::optional<std::size_t> row_weight;
  std::optional<unsigned> beta;
  Var var_limit = 0;
  bool hoist = false, no_timings = false;
  std::function<int()> action;

  auto* randomize = app.add_subcommand("randomize", "randomize a CNF (iso, matrix or gf2)");
  randomize->add_option("--method", method, "iso | matrix | gf2")->required();
  randomize->add_option("--seed", seed, "secret seed");
  randomize->add_option("--in", in, "input DIMACS")->required();
  randomize->add_option("--out", out_path, "randomized instance (.opb for matrix, DIMACS otherwise)");
  randomize->add_option("--secret", secret, "key file");
  randomize->add_option("--row-weight", row_weight, "gf2: ones per row of the sparse substitution matrix");
  randomize->callback([&] { action = [&] { return cmd_randomize(ctx, method, seed, in, out_path, secret, row_weight); }; });

  auto* derand = app.add_subcommand("derandomize", "map a provider solution back to the original");
  derand->add_option("--secret", secret, "key file")->required();
  derand->add_option("--solution", solution, "provider .sol")->required();
  derand->add_option("--original", original, "original DIMACS")->required();
  derand->add_option("--out", out_path, "write the original solution here");
  derand->callback([&] { action = [&] { return cmd_derandomize(ctx, secret, solution, original, out_path); }; });

  auto* to3 = app.add_subcommand("to3cnf", "convert to exactly-3 CNF");
  to3->add_option("--in", in, "input DIMACS")->required();
  to3->add_option("--out", out_path, "output DIMACS");
  to3->callback([&] { action = [&] { return cmd_to3cnf(ctx, in, out_path); }; });

  auto* mincost = app.add_subcommand("mincost-randomize", "compile the cost into a circuit and randomize");
  mincost->add_option("--in", in, "input DIMACS")->required();
  mincost->add_option("--costs", costs, "cost sidecar (w <var> <cost>)")->required();
  mincost->add_option("--method", method, "matrix | gf2")->default_val("matrix");
  mincost->add_option("--seed", seed, "secret seed");
  mincost->add_option("--beta", beta, "cost bit width");
  mincost->add_option("--row-weight", row_weight, "gf2: sparse substitution row weight");
  mincost->add_option("--out", out_path, "randomized instance");
  mincost->add_option("--cost-out", cost_out, "randomized cost sidecar");
  mincost->add_option("--secret", secret, "key file");
  mincost->callback([&] {
    action = [&] {
      return cmd_mincost_randomize(ctx, in, costs, method, seed, beta, row_weight, out_path, cost_out, secret);
    };
  });

  auto* max3 = app.add_subcommand("max3sat-reduce", "reduce MAX3SAT to Mincost SAT");
  max3->add_option("--in", in, "3CNF whose satisfied clauses are maximized")->required();
  max3->add_option("--out", out_path, "Mincost DIMACS (randomized if --randomize)");
  max3->add_option("--cost-out", cost_out, "cost sidecar");
  max3->add_option("--randomize", randomize_with, "also randomize: matrix | gf2");
  max3->add_option("--seed", seed, "secret seed");
  max3->add_option("--secret", secret, "key file");
  max3->callback([&] {
    action = [&] { return cmd_max3sat_reduce(ctx, in, out_path, cost_out, randomize_with, seed, secret); };
  });

  auto* fw_enc = app.add_subcommand("fw-encode", "CNF satisfiable iff two policies differ");
  fw_enc->add_option("--p1", p1, "first policy")->required();
  fw_enc->add_option("--p2", p2, "second policy")->required();
  fw_enc->add_option("--layout", layout, "<blocks>x<bits>,<port bits>")->capture_default_str();
  fw_enc->add_flag("--hoist", hoist, "pull rules that overlap no other rule out of the first-match chain");
  fw_enc->add_option("--out", out_path, "output DIMACS");
  fw_enc->callback([&] { action = [&] { return cmd_fw_encode(ctx, p1, p2, layout, hoist, out_path); }; });

  auto* fw_dec = app.add_subcommand("fw-decode", "decode and check a witness header");
  fw_dec->add_option("--p1", p1, "first policy")->required();
  fw_dec->add_option("--p2", p2, "second policy")->required();
  fw_dec->add_option("--layout", layout, "<blocks>x<bits>,<port bits>")->capture_default_str();
  fw_dec->add_option("--solution", solution, "model of the fw-encode CNF")->required();
  fw_dec->callback([&] { action = [&] { return cmd_fw_decode(ctx, p1, p2, layout, solution); }; });

  auto* fw_map = app.add_subcommand("fw-map", "replace field values through per-block bijections");
  fw_map->add_option("--in", in, "policy")->required();
  fw_map->add_option("--layout", layout, "<blocks>x<bits>,<port bits>")->capture_default_str();
  fw_map->add_option("--seed", seed, "secret seed");
  fw_map->add_option("--pairs", pairs, "JSON {\"blocks\": [[[from,to],...],...], \"ports\": [[from,to],...]}");
  fw_map->add_option("--out", out_path, "mapped policy");
  fw_map->add_option("--secret", secret, "write the mappings here");
  fw_map->callback([&] { action = [&] { return cmd_fw_map(ctx, in, layout, seed, pairs, out_path, secret); }; });

  auto* solve = app.add_subcommand("solve-brute", "exhaustive solver for DIMACS or OPB");
  solve->add_option("--in", in, "DIMACS or OPB")->required();
  solve->add_option("--costs", costs, "minimize this cost sidecar");
  solve->add_option("--var-limit", var_limit, "refuse larger instances");
  solve->add_option("--out", out_path, "write the witness .sol here");
  solve->callback([&] { action = [&] { return cmd_solve_brute(ctx, in, costs, var_limit, out_path); }; });

  auto* outs = app.add_subcommand("outsource", "simulate providers and cross-check their answers");
  outs->add_option("--in", in, "original DIMACS")->required();
  outs->add_option("--method", method, "iso | matrix | gf2")->default_val("matrix");
  outs->add_option("--providers", providers, "comma list of honest, lazy, malicious-unsat, malicious-corrupt")
      ->capture_default_str();
  outs->add_option("--seed", seed, "secret seed");
  outs->add_option("--row-weight", row_weight, "gf2: sparse substitution row weight");
  outs->add_flag("--no-timings", no_timings, "omit elapsed times from the report");
  outs->callback([&] {
    action = [&] { return cmd_outsource(ctx, in, method, providers, seed, row_weight, !no_timings); };
  });

  auto* verify = app.add_subcommand("verify-solution", "check a .sol against DIMACS or OPB");
  verify->add_option("--in", in, "DIMACS or OPB")->required();
  verify->add_option("--solution", solution, ".sol file")->required();
  verify->callback([&] { action = [&] { return cmd_verify(ctx, in, solution); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const FraudDetected& e) {
    err << "validation failed: " << e.what() << "\n";
    return kInvalid;
  } catch (const DigestMismatch& e) {
    err << "digest mismatch: " << e.what() << "\n";
    return kInvalid;
  } catch (const satrand::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace satrand::cli
