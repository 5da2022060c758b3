// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "satrand/satrand.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace satrand;
namespace fw = satrand::firewall;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 and 2 share their instances.
struct MatrixRun {
  int instances = 0, agree = 0, feasible = 0;
  std::uint64_t solutions = 0, round_trip_failures = 0;
  double secs = 0;
};

MatrixRun run_matrix_instances() {
  MatrixRun r;
  Rng rng(1001);
  const auto t0 = Clock::now();
  for (; r.instances < 240; ++r.instances) {
    // every third instance is dense enough to be unsatisfiable now and then
    const bool dense = r.instances % 3 == 0;
    const Var n = dense ? 3 + static_cast<Var>(rng.below(3)) : 3 + static_cast<Var>(rng.below(8));
    const std::size_t m = dense ? 10 + rng.below(5) : 1 + rng.below(14);
    const CnfInstance f = testsupport::random_3cnf(rng, n, m);
    const auto p = matrix_randomize_cnf(f, mix_seed(1001, r.instances));
    const bool sat = brute_sat(f).satisfiable;
    const auto lin = brute_linear(p.randomized.system);
    r.agree += sat == lin.feasible && sat == (testsupport::naive_count(f) > 0);
    if (!lin.feasible) continue;
    ++r.feasible;
    for_each_linear_solution(p.randomized.system, [&](const Assignment& sol) {
      ++r.solutions;
      try {
        const Assignment x = derandomize_solution(sol, p.randomized.secret, f);
        if (!testsupport::cnf_true(f, x.bits())) ++r.round_trip_failures;
      } catch (const Error&) {
        ++r.round_trip_failures;
      }
      return true;
    });
  }
  r.secs = seconds_since(t0);
  return r;
}

Outcome criterion1(const MatrixRun& r) {
  const bool pass = r.instances >= 200 && r.agree == r.instances && r.secs < 120;
  return {pass, fmt("%d/%d instances agree on satisfiability (%d feasible), %.1f s", r.agree, r.instances, r.feasible,
                    r.secs)};
}

Outcome criterion2(const MatrixRun& r) {
  return {r.feasible > 0 && r.round_trip_failures == 0,
          fmt("%llu enumerated solutions over %d feasible systems, %llu failed to derandomize to a model",
              static_cast<unsigned long long>(r.solutions), r.feasible,
              static_cast<unsigned long long>(r.round_trip_failures))};
}

Outcome criterion3() {
  Rng rng(1003);
  int instances = 0, count_ok = 0;
  std::uint64_t derandomized = 0, bad = 0;
  for (; instances < 120; ++instances) {
    const Var n = 2 + static_cast<Var>(rng.below(7));
    const CnfInstance f = testsupport::random_cnf(rng, n, 1 + rng.below(4 * n), 1, std::min<Var>(n, 3));
    const auto g = gf_randomize(f, mix_seed(1003, instances));
    std::uint64_t projected = for_each_model(
        g.instance,
        [&](const Assignment& y) {
          ++derandomized;
          try {
            if (!testsupport::cnf_true(f, gf_derandomize(y, g.secret, f).bits())) ++bad;
          } catch (const Error&) {
            ++bad;
          }
          return true;
        },
        1 << 16, n);
    count_ok += projected == testsupport::naive_count(f) && projected == brute_sat(f).count;
  }
  return {count_ok == instances && bad == 0,
          fmt("%d/%d projected counts equal, %llu derandomized solutions, %llu falsify the original", count_ok,
              instances, static_cast<unsigned long long>(derandomized), static_cast<unsigned long long>(bad))};
}

Outcome criterion4() {
  const LinearSystem sys = encode_linear(parse_dimacs("p cnf 3 2\n1 2 3 0\n-1 2 -3 0"));
  const std::vector<LinearConstraint> want{{{1, 1, 1, 1, 1, 0, 0}, 3}, {{-1, 1, -1, 0, 0, 1, 1}, 1}};
  bool pass = sys.num_vars() == 7 && sys.constraints().size() == want.size();
  for (std::size_t i = 0; pass && i < want.size(); ++i)
    pass = sys.constraints()[i].coeffs == want[i].coeffs && sys.constraints()[i].rhs == want[i].rhs;
  std::string text;
  for (const auto& row : sys.constraints()) {
    std::string lhs;
    for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
      if (row.coeffs[j] == 0) continue;
      lhs += (row.coeffs[j] < 0 ? "-" : (lhs.empty() ? "" : "+"));
      if (std::abs(row.coeffs[j]) != 1) lhs += std::to_string(std::abs(row.coeffs[j]));
      lhs += "x" + std::to_string(j + 1);
    }
    text += (text.empty() ? "" : ", ") + lhs + "=" + std::to_string(row.rhs);
  }
  return {pass, text};
}

Outcome criterion5() {
  Rng rng(1005);
  int instances = 0, matrix_ok = 0, gf_ok = 0, feasible = 0;
  const auto t0 = Clock::now();
  for (; instances < 60; ++instances) {
    const Var n = 3 + static_cast<Var>(rng.below(4));
    const unsigned beta = 1 + static_cast<unsigned>(rng.below(3));
    const std::size_t m = instances % 4 == 0 ? 5 * n + rng.below(3 * n) : 1 + rng.below(3 * n);
    MincostInstance inst{testsupport::random_3cnf(rng, n, m), {}};
    for (Var v = 0; v < n; ++v) inst.costs.push_back(rng.below(std::uint64_t{1} << beta));
    const auto want = brute_mincost(inst);
    const auto naive = testsupport::naive_min_cost(inst.cnf, inst.costs);
    const bool oracles_agree = want.feasible == naive.has_value() && (!naive || want.cost == *naive);
    feasible += want.feasible;
    auto is_original_argmin = [&](const Assignment& x) {
      return satisfies(inst.cnf, x) && inst.cost(x) == want.cost;
    };

    const auto seed = mix_seed(1005, instances);
    const auto mr = randomize_mincost(inst, seed, ObjectiveMethod::kMatrix);
    const auto mbest = brute_linear_min(std::get<LinearSystem>(mr.instance), mr.cost, 4096);
    if (oracles_agree && mbest.feasible == want.feasible &&
        (!want.feasible ||
         (mbest.cost == want.cost && is_original_argmin(derandomize_mincost(*mbest.argmin, mr.secret, inst.cnf)))))
      ++matrix_ok;

    const auto gr = randomize_mincost(inst, seed, ObjectiveMethod::kSolutionSet, std::nullopt, 3);
    const auto gbest =
        brute_mincost(make_mincost(std::get<CnfInstance>(gr.instance), gr.cost), 1 << 16, gr.secret.compiled_vars);
    if (oracles_agree && gbest.feasible == want.feasible &&
        (!want.feasible ||
         (gbest.cost == want.cost && is_original_argmin(derandomize_mincost(*gbest.argmin, gr.secret, inst.cnf)))))
      ++gf_ok;
  }
  return {matrix_ok == instances && gf_ok == instances,
          fmt("%d instances (%d feasible): optimum and argmin preserved %d/%d matrix, %d/%d solution-set "
              "(sparse), %.1f s",
              instances, feasible, matrix_ok, instances, gf_ok, instances, seconds_since(t0))};
}

Outcome criterion6() {
  Rng rng(1006);
  int instances = 0, ok = 0;
  for (; instances < 80; ++instances) {
    const Var n = 3 + static_cast<Var>(rng.below(6));
    const Max3SatInstance inst{testsupport::random_3cnf(rng, n, 1 + rng.below(10))};
    const auto red = max3sat_to_mincost(inst);
    const auto best = brute_mincost(red.mincost);
    const std::uint64_t m = inst.cnf.num_clauses();
    ok += best.feasible && red.offset == m && m - best.cost == brute_max3sat(inst).max_satisfied &&
          m - best.cost == testsupport::naive_max_sat(inst.cnf);
  }
  return {ok == instances, fmt("%d/%d instances satisfy m - mincost = max satisfied", ok, instances)};
}

fw::FirewallPolicy two_rule_policy() {
  const auto L = fw::HeaderLayout::standard();
  return fw::parse_policy(
      "10.11.12.* 100 10.14.15.* 80 accept\n"
      "152.15.10.* 99 152.15.*.* 80 accept\n"
      "default deny\n",
      L);
}

Outcome criterion7() {
  const auto L = fw::HeaderLayout::standard();
  const auto secret = fw::FieldMappingSecret::from_pairs(L,
                                                         {{{10, 23}, {152, 163}, {100, 41}},
                                                          {{11, 170}, {14, 76}, {15, 201}},
                                                          {{12, 55}, {15, 142}, {10, 97}}},
                                                         {{100, 471}, {99, 15717}, {80, 2313}});
  const auto original = two_rule_policy();
  const auto mapped = fw::map_fields(original, secret);
  const std::string want =
      "23.170.55.* 471 23.76.142.* 2313 accept\n"
      "163.201.97.* 15717 163.201.*.* 2313 accept\n"
      "default deny\n";
  auto freq = [](const fw::FirewallPolicy& p) {
    std::multiset<std::size_t> out;
    for (const auto& kv : fw::port_histogram(p)) out.insert(kv.second);
    return out;
  };
  const bool tables = fw::emit_policy(mapped) == want;
  const bool leak = freq(mapped) == freq(original) && fw::port_histogram(mapped).at(2313) == 2;
  return {tables && leak && secret.is_bijection(),
          fmt("mapped rules %s the expected policy, port frequency multiset %s", tables ? "match" : "differ from",
              leak ? "preserved" : "changed")};
}

Outcome criterion8() {
  const auto L = fw::HeaderLayout::parse("1x2,2");
  Rng rng(1008);
  int pairs = 0, ok = 0, equal_pairs = 0, swapped_pairs = 0, differing = 0;
  auto check = [&](const fw::FirewallPolicy& a, const fw::FirewallPolicy& b, bool expect_equivalent) {
    ++pairs;
    bool differ = false;
    for (std::uint64_t i = 0; i < 256 && !differ; ++i) {
      const auto h = fw::header_from_index(i, L);
      differ = fw::evaluate(a, h) != fw::evaluate(b, h);
    }
    differing += differ;
    bool good = !(expect_equivalent && differ);
    for (bool hoist : {false, true}) {
      const auto res = brute_sat(fw::equivalence_cnf(a, b, L, hoist), 4096);
      good = good && res.satisfiable == differ;
      if (res.satisfiable) {
        const auto h = fw::decode_header(*res.witness, L);
        good = good && fw::evaluate(a, h) != fw::evaluate(b, h);
      }
    }
    ok += good;
  };
  for (int t = 0; t < 60; ++t)
    check(testsupport::random_policy(rng, L, rng.below(6)), testsupport::random_policy(rng, L, rng.below(6)), false);
  for (int t = 0; t < 25; ++t) {
    auto p = testsupport::random_policy(rng, L, rng.below(6));
    check(p, p, true);
    ++equal_pairs;
  }
  for (int t = 0; t < 25; ++t) {
    // Two groups pinned to different source values never match the same
    // header, so their order is irrelevant.
    const std::uint32_t ga = static_cast<std::uint32_t>(rng.below(4));
    const std::uint32_t gb = (ga + 1 + static_cast<std::uint32_t>(rng.below(3))) % 4;
    auto group = [&](std::uint32_t src) {
      std::vector<fw::FirewallRule> g;
      for (std::size_t i = 0, k = 1 + rng.below(3); i < k; ++i) {
        auto r = testsupport::random_rule(rng, L);
        r.src_ip = {src};
        g.push_back(r);
      }
      return g;
    };
    auto a = group(ga), b = group(gb);
    fw::FirewallPolicy p, q;
    p.default_action = q.default_action = rng.coin() ? fw::Action::kAccept : fw::Action::kDeny;
    p.rules = a;
    p.rules.insert(p.rules.end(), b.begin(), b.end());
    q.rules = b;
    q.rules.insert(q.rules.end(), a.begin(), a.end());
    check(p, q, true);
    ++swapped_pairs;
  }
  return {ok == pairs && pairs >= 100,
          fmt("%d/%d pairs match 256-header simulation (%d equal, %d swapped groups, %d differing)", ok, pairs,
              equal_pairs, swapped_pairs, differing)};
}

Outcome criterion9() {
  Rng rng(1009);
  const std::array<Method, 3> methods{Method::kIso, Method::kMatrix, Method::kSolutionSet};
  int runs = 0, caught = 0, cheaters = 0, honest = 0, honest_flagged = 0;
  for (; runs < 100; ++runs) {
    std::vector<ProviderKind> mix;
    for (std::size_t i = 0, k = 1 + rng.below(2); i < k; ++i) mix.push_back(ProviderKind::kHonest);
    for (std::size_t i = 0, k = 1 + rng.below(2); i < k; ++i) mix.push_back(ProviderKind::kLazy);
    for (std::size_t i = 0, k = 1 + rng.below(2); i < k; ++i) mix.push_back(ProviderKind::kMaliciousUnsat);
    for (std::size_t i = mix.size(); i > 1; --i) std::swap(mix[i - 1], mix[rng.below(i)]);
    const Var n = 4 + static_cast<Var>(rng.below(7));
    const auto f = testsupport::random_satisfiable_3cnf(rng, n, 1 + rng.below(4 * n));
    const auto rep = outsource(f, methods[runs % 3], mix, mix_seed(1009, runs));
    bool all_caught = rep.verdict == Consensus::kSatisfiable;
    for (std::size_t i = 0; i < mix.size(); ++i) {
      if (mix[i] == ProviderKind::kHonest) {
        ++honest;
        honest_flagged += rep.providers[i].flagged;
      } else {
        ++cheaters;
        all_caught = all_caught && rep.providers[i].flagged;
      }
    }
    caught += all_caught;
  }
  return {caught == runs && honest_flagged == 0,
          fmt("%d/%d runs flag every lazy and malicious-unsat provider (%d cheaters), %d of %d honest providers "
              "flagged",
              caught, runs, cheaters, honest_flagged, honest)};
}

/// Least-squares fit of y against (u^2, ku, 1); returns the largest relative residual.
double fit_residual(const std::vector<double>& u, double k, const std::vector<double>& y) {
  std::array<std::array<double, 4>, 3> a{};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::array<double, 3> x{u[i] * u[i], k * u[i], 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += x[r] * x[c];
      a[r][3] += x[r] * y[i];
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[r][j] -= f * a[c][j];
    }
  }
  double worst = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double fit = a[0][3] / a[0][0] * u[i] * u[i] + a[1][3] / a[1][1] * k * u[i] + a[2][3] / a[2][2];
    worst = std::max(worst, std::abs(fit - y[i]) / y[i]);
  }
  return worst;
}

Outcome criterion10() {
  const auto L = fw::HeaderLayout::standard();
  const double k = L.total_bits();
  Rng rng(1010);
  const std::vector<double> us{4, 8, 16, 32};
  std::vector<double> vars, clauses;
  for (double u : us) {
    std::size_t v = 0, c = 0;
    for (int t = 0; t < 5; ++t) {
      const auto p = testsupport::random_policy(rng, L, static_cast<std::size_t>(u), 10);
      const auto q = testsupport::random_policy(rng, L, static_cast<std::size_t>(u), 10);
      const auto cnf = fw::equivalence_cnf(p, q, L);
      v = std::max<std::size_t>(v, cnf.num_variables());
      c = std::max(c, cnf.num_clauses());
    }
    vars.push_back(static_cast<double>(v));
    clauses.push_back(static_cast<double>(c));
  }
  bool bounded = true;
  std::string ratios;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double scale = us[i] * us[i] + k * us[i];
    const double rv = vars[i] / scale, rc = clauses[i] / scale;
    bounded = bounded && rv <= 1.25 * vars[0] / (us[0] * us[0] + k * us[0]) &&
              rc <= 1.25 * clauses[0] / (us[0] * us[0] + k * us[0]);
    ratios += fmt("%s u=%g: %g vars, %g clauses", i ? ";" : "", us[i], vars[i], clauses[i]);
  }
  const double worst = std::max(fit_residual(us, k, vars), fit_residual(us, k, clauses));

  Rng mrng(1011);
  int systems = 0, exact = 0;
  for (; systems < 100; ++systems) {
    const Var n = 3 + static_cast<Var>(mrng.below(20));
    const std::size_t m = 1 + mrng.below(40);
    const auto f = testsupport::random_3cnf(mrng, n, m);
    const auto& sys = matrix_randomize_cnf(f, systems).randomized.system;
    exact += sys.constraints().size() == m && sys.num_vars() == n + 2 * m;
  }
  return {bounded && worst <= 0.05 && exact == systems,
          fmt("firewall (k=%g)%s; fit residual %.1f%%; %d/%d matrix systems have m rows over n+2m vars", k,
              ratios.c_str(), 100 * worst, exact, systems)};
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const MatrixRun matrix = run_matrix_instances();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"satisfiability equivalence (matrix)", [&] { return criterion1(matrix); }},
      {"solution round trip (matrix)", [&] { return criterion2(matrix); }},
      {"solution-set bijection (GF(2))", criterion3},
      {"worked-example encoding", criterion4},
      {"mincost preservation", criterion5},
      {"MAX3SAT reduction", criterion6},
      {"firewall field mapping", criterion7},
      {"firewall equivalence at 8 bits", criterion8},
      {"cheat detection", criterion9},
      {"size bounds", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed in %.1f s\n", criteria.size() - failed, criteria.size(), seconds_since(t0));
  return failed ? 1 : 0;
}
