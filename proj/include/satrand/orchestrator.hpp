#pragma once

#include <chrono>
#include <cstdint>
#include <future>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "satrand/linear_system.hpp"
#include "satrand/oracle.hpp"
#include "satrand/record.hpp"

namespace satrand {

// ---------------------------------------------------------------------------
// Randomization for outsourcing

/// What a provider receives: a CNF (iso, gf2) or a 0/1 linear system (matrix).
using OutsourcedInstance = std::variant<CnfInstance, LinearSystem>;

inline std::string outsourced_text(const OutsourcedInstance& inst) {
  if (const auto* c = std::get_if<CnfInstance>(&inst)) return emit_dimacs(*c);
  return emit_opb(std::get<LinearSystem>(inst));
}

struct OutsourcedJob {
  OutsourcedInstance instance;
  RandomizationRecord record;
};

/// Randomizes a satisfiability instance with one of the three
/// structure-hiding methods. Objective methods have their own entry points.
inline OutsourcedJob randomize_instance(const CnfInstance& inst, Method method, std::uint64_t seed,
                                        std::optional<std::size_t> row_weight = std::nullopt) {
  OutsourcedJob job;
  job.record.method = method;
  job.record.seed = seed;
  job.record.original_digest = instance_digest(inst);
  switch (method) {
    case Method::kIso: {
      auto r = iso_randomize(inst, seed);
      job.instance = std::move(r.instance);
      job.record.secret = std::move(r.secret);
      return job;
    }
    case Method::kMatrix: {
      auto p = matrix_randomize_cnf(inst, seed);
      job.instance = std::move(p.randomized.system);
      job.record.secret = std::move(p.randomized.secret);
      return job;
    }
    case Method::kSolutionSet: {
      // The substitution works clause by clause, so any CNF is accepted.
      auto g = gf_randomize(inst, seed, row_weight);
      job.instance = std::move(g.instance);
      job.record.secret = std::move(g.secret);
      return job;
    }
    default:
      throw InvalidInput("method '" + std::string(to_string(method)) + "' does not randomize a plain CNF");
  }
}

// ---------------------------------------------------------------------------
// Providers

enum class ProviderKind { kHonest, kLazy, kMaliciousUnsat, kMaliciousCorrupt };

inline std::string_view to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::kHonest: return "honest";
    case ProviderKind::kLazy: return "lazy";
    case ProviderKind::kMaliciousUnsat: return "malicious-unsat";
    case ProviderKind::kMaliciousCorrupt: return "malicious-corrupt";
  }
  return "?";
}

inline ProviderKind parse_provider_kind(std::string_view s) {
  if (s == "honest") return ProviderKind::kHonest;
  if (s == "lazy") return ProviderKind::kLazy;
  if (s == "malicious-unsat") return ProviderKind::kMaliciousUnsat;
  if (s == "malicious-corrupt") return ProviderKind::kMaliciousCorrupt;
  throw InvalidInput("unknown provider behavior '" + std::string(s) + "'");
}

/// "honest,lazy,malicious-unsat" -> one behavior per provider.
inline std::vector<ProviderKind> parse_provider_mix(std::string_view spec) {
  std::vector<ProviderKind> out;
  std::string tok;
  std::istringstream in{std::string(spec)};
  while (std::getline(in, tok, ',')) out.push_back(parse_provider_kind(tok));
  if (out.empty()) throw InvalidInput("provider list is empty");
  return out;
}

enum class Verdict { kSolution, kUnsatisfiable, kFail };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kSolution: return "solution";
    case Verdict::kUnsatisfiable: return "unsatisfiable";
    case Verdict::kFail: return "fail";
  }
  return "?";
}

struct ProviderAnswer {
  std::size_t provider_id = 0;
  Verdict verdict = Verdict::kFail;
  std::optional<Assignment> solution;  // set iff verdict == kSolution
  std::chrono::nanoseconds elapsed{0};
  // Slots for proof-of-work and unsatisfiable-core evidence; nothing fills them.
  std::optional<std::string> proof_of_work;
  std::optional<std::string> unsat_core;
};

/// The request/answer contract between client and provider.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string label() const = 0;
  virtual ProviderAnswer solve(std::size_t id, const OutsourcedInstance& inst) = 0;
};

struct SolverLimits {
  Var sat_var_limit = 1 << 16;
  Var linear_var_limit = 256;
};

/// CNF instances go to the clause-learning solver, linear systems to the
/// exhaustive 0/1 search.
inline std::optional<Assignment> oracle_solve(const OutsourcedInstance& inst, const SolverLimits& limits) {
  if (const auto* c = std::get_if<CnfInstance>(&inst)) {
    if (c->num_variables() > limits.sat_var_limit)
      throw LimitExceeded("instance has " + std::to_string(c->num_variables()) + " variables, solver limit is " +
                          std::to_string(limits.sat_var_limit));
    return cdcl_solve(*c);
  }
  return first_linear_solution(std::get<LinearSystem>(inst), limits.linear_var_limit);
}

inline Var outsourced_vars(const OutsourcedInstance& inst) {
  if (const auto* c = std::get_if<CnfInstance>(&inst)) return c->num_variables();
  return std::get<LinearSystem>(inst).num_vars();
}

/// In-process provider with a fixed behavior.
class SimulatedProvider : public Provider {
 public:
  SimulatedProvider(ProviderKind kind, std::uint64_t seed, SolverLimits limits = {})
      : kind_(kind), seed_(seed), limits_(limits) {}

  std::string label() const override { return std::string(to_string(kind_)); }
  ProviderKind kind() const { return kind_; }

  ProviderAnswer solve(std::size_t id, const OutsourcedInstance& inst) override {
    const auto start = std::chrono::steady_clock::now();
    ProviderAnswer a;
    a.provider_id = id;
    switch (kind_) {
      case ProviderKind::kLazy: a.verdict = Verdict::kFail; break;
      case ProviderKind::kMaliciousUnsat: a.verdict = Verdict::kUnsatisfiable; break;
      case ProviderKind::kHonest:
      case ProviderKind::kMaliciousCorrupt: {
        std::optional<Assignment> s;
        try {
          s = oracle_solve(inst, limits_);
        } catch (const LimitExceeded&) {
          a.verdict = Verdict::kFail;
          break;
        }
        if (!s) {
          a.verdict = Verdict::kUnsatisfiable;
          break;
        }
        if (kind_ == ProviderKind::kMaliciousCorrupt) corrupt(*s);
        a.verdict = Verdict::kSolution;
        a.solution = std::move(s);
        break;
      }
    }
    a.elapsed = std::chrono::steady_clock::now() - start;
    return a;
  }

 private:
  /// Each bit flips with probability 1/2; at least one bit always flips.
  void corrupt(Assignment& s) const {
    if (s.size() == 0) return;
    Rng rng(seed_);
    bool flipped = false;
    for (Var v = 1; v <= s.size(); ++v)
      if (rng.coin()) {
        s.set(v, !s[v]);
        flipped = true;
      }
    if (!flipped) {
      const Var v = static_cast<Var>(rng.below(s.size())) + 1;
      s.set(v, !s[v]);
    }
  }

  ProviderKind kind_;
  std::uint64_t seed_;
  SolverLimits limits_;
};

// ---------------------------------------------------------------------------
// Validation and consolidation

struct ValidationResult {
  bool valid = false;
  std::optional<Assignment> solution;  // derandomized, when valid
  std::string reason;                  // why it was rejected
};

/// Derandomizes a solution answer and checks it against every original
/// clause. A record for another instance raises DigestMismatch; an answer
/// without a solution is a caller error.
inline ValidationResult validate_solution(const ProviderAnswer& answer, const RandomizationRecord& record,
                                          const CnfInstance& original) {
  if (answer.verdict != Verdict::kSolution || !answer.solution)
    throw InvalidInput("validate_solution needs an answer that carries a solution");
  if (instance_digest(original) != record.original_digest)
    throw DigestMismatch("secret was made for instance " + record.original_digest + ", got " +
                         instance_digest(original));
  ValidationResult r;
  try {
    r.solution = derandomize(*answer.solution, record, original);
    r.valid = true;
  } catch (const FraudDetected& e) {
    r.reason = e.what();
  } catch (const InvalidInput& e) {
    r.reason = e.what();
  }
  return r;
}

enum class Consensus { kSatisfiable, kUnsatConsensus, kInconclusive };

inline std::string_view to_string(Consensus c) {
  switch (c) {
    case Consensus::kSatisfiable: return "sat";
    case Consensus::kUnsatConsensus: return "unsat-consensus";
    case Consensus::kInconclusive: return "inconclusive";
  }
  return "?";
}

enum class Payment { kFull, kNone };

inline std::string_view to_string(Payment p) { return p == Payment::kFull ? "paid-full" : "paid-none"; }

struct ProviderOutcome {
  std::string behavior;
  std::string instance_digest;  // of the randomized instance this provider saw
  ProviderAnswer answer;
  bool valid = false;  // solution answers only
  bool flagged = false;
  std::string flag_reason;
  Payment payment = Payment::kNone;
};

struct OutsourceReport {
  Method method = Method::kMatrix;
  std::uint64_t seed = 0;
  Consensus verdict = Consensus::kInconclusive;
  std::optional<Assignment> solution;  // first valid derandomized solution
  std::vector<ProviderOutcome> providers;

  std::string to_text(bool with_timings = true) const {
    std::ostringstream out;
    out << "method " << to_string(method) << "\n";
    out << "seed " << seed << "\n";
    out << "verdict " << to_string(verdict) << "\n";
    if (solution) {
      out << "solution";
      for (Var v = 1; v <= solution->size(); ++v) out << ' ' << ((*solution)[v] ? "" : "-") << v;
      out << "\n";
    }
    for (const auto& p : providers) {
      out << "provider " << p.answer.provider_id << " behavior=" << p.behavior << " instance=" << p.instance_digest
          << " answer=" << to_string(p.answer.verdict);
      if (p.answer.verdict == Verdict::kSolution) out << (p.valid ? " valid" : " invalid");
      out << " flagged=" << (p.flagged ? "yes" : "no");
      if (p.flagged) out << " (" << p.flag_reason << ")";
      out << " ledger=" << to_string(p.payment);
      if (with_timings)
        out << " elapsed_us=" << std::chrono::duration_cast<std::chrono::microseconds>(p.answer.elapsed).count();
      out << "\n";
    }
    return out.str();
  }
};

/// Sends an independently seeded randomization of `original` to every
/// provider, runs them concurrently, validates the answers and flags
/// providers whose fail/unsat answer is contradicted by a valid solution.
inline OutsourceReport outsource(const CnfInstance& original, Method method,
                                 const std::vector<std::shared_ptr<Provider>>& providers, std::uint64_t seed,
                                 std::optional<std::size_t> row_weight = std::nullopt) {
  if (providers.empty()) throw InvalidInput("outsourcing needs at least one provider");
  const std::size_t k = providers.size();
  std::vector<OutsourcedJob> jobs;
  for (std::size_t i = 0; i < k; ++i) jobs.push_back(randomize_instance(original, method, mix_seed(seed, i), row_weight));

  std::vector<std::future<ProviderAnswer>> pending;
  for (std::size_t i = 0; i < k; ++i)
    pending.push_back(std::async(std::launch::async, [&, i] { return providers[i]->solve(i, jobs[i].instance); }));

  OutsourceReport rep;
  rep.method = method;
  rep.seed = seed;
  bool any_valid = false, any_unsat = false;
  for (std::size_t i = 0; i < k; ++i) {
    ProviderOutcome o;
    o.behavior = providers[i]->label();
    o.instance_digest = fnv1a_hex(outsourced_text(jobs[i].instance));
    o.answer = pending[i].get();
    o.answer.provider_id = i;
    if (o.answer.verdict == Verdict::kSolution && o.answer.solution) {
      auto v = validate_solution(o.answer, jobs[i].record, original);
      o.valid = v.valid;
      if (v.valid) {
        any_valid = true;
        if (!rep.solution) rep.solution = std::move(v.solution);
      } else {
        o.flagged = true;
        o.flag_reason = "invalid solution: " + v.reason;
      }
    } else if (o.answer.verdict == Verdict::kSolution) {
      o.flagged = true;
      o.flag_reason = "solution verdict without an assignment";
    }
    any_unsat = any_unsat || o.answer.verdict == Verdict::kUnsatisfiable;
    rep.providers.push_back(std::move(o));
  }

  if (any_valid) {
    rep.verdict = Consensus::kSatisfiable;
    for (auto& o : rep.providers) {
      if (o.answer.verdict == Verdict::kUnsatisfiable || o.answer.verdict == Verdict::kFail) {
        o.flagged = true;
        o.flag_reason = std::string("reported ") + std::string(to_string(o.answer.verdict)) +
                        " but another provider returned a valid solution";
      }
      o.payment = o.valid ? Payment::kFull : Payment::kNone;
    }
  } else {
    rep.verdict = any_unsat ? Consensus::kUnsatConsensus : Consensus::kInconclusive;
    for (auto& o : rep.providers) o.payment = o.flagged ? Payment::kNone : Payment::kFull;
  }
  return rep;
}

/// Simulated providers, one per behavior; provider i corrupts with its own
/// derived seed.
inline OutsourceReport outsource(const CnfInstance& original, Method method, const std::vector<ProviderKind>& behaviors,
                                 std::uint64_t seed, SolverLimits limits = {},
                                 std::optional<std::size_t> row_weight = std::nullopt) {
  std::vector<std::shared_ptr<Provider>> providers;
  for (std::size_t i = 0; i < behaviors.size(); ++i)
    providers.push_back(std::make_shared<SimulatedProvider>(behaviors[i], mix_seed(~seed, i), limits));
  return outsource(original, method, providers, seed, row_weight);
}

}  // namespace satrand
