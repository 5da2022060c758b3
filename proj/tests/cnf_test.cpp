#include <gtest/gtest.h>

#include "satrand/cnf.hpp"
#include "satrand/oracle.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace satrand;
using testsupport::naive_count;
using testsupport::naive_models;

namespace {

std::vector<std::vector<std::int64_t>> as_ints(const CnfInstance& f) {
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& c : f.clauses()) {
    out.emplace_back();
    for (const auto& l : c) out.back().push_back(l.to_dimacs());
  }
  return out;
}

}  // namespace

TEST(ParseDimacs, TwoClauseExample) {
  auto f = parse_dimacs("p cnf 3 2\n1 2 3 0\n-1 2 -3 0");
  EXPECT_EQ(f.num_variables(), 3u);
  EXPECT_EQ(as_ints(f), (std::vector<std::vector<std::int64_t>>{{1, 2, 3}, {-1, 2, -3}}));
}

TEST(ParseDimacs, EmptyClauseListIsVacuouslySatisfiable) {
  auto f = parse_dimacs("p cnf 1 0");
  EXPECT_EQ(f.num_variables(), 1u);
  EXPECT_EQ(f.num_clauses(), 0u);
  EXPECT_EQ(brute_sat(f).count, 2u);
}

TEST(ParseDimacs, TautologyKeptVerbatim) {
  auto f = parse_dimacs("p cnf 2 1\n1 -1 0");
  ASSERT_EQ(f.num_clauses(), 1u);
  EXPECT_EQ(as_ints(f)[0], (std::vector<std::int64_t>{1, -1}));
}

TEST(ParseDimacs, CommentsAndMultiLineClauses) {
  auto f = parse_dimacs("c hello\np cnf 4 2\n1 2\n 3 0 -4\n0\n");
  EXPECT_EQ(as_ints(f), (std::vector<std::vector<std::int64_t>>{{1, 2, 3}, {-4}}));
}

TEST(ParseDimacs, DuplicateLiteralsCollapse) {
  auto f = parse_dimacs("p cnf 2 1\n1 1 2 0");
  EXPECT_EQ(as_ints(f)[0], (std::vector<std::int64_t>{1, 2}));
}

TEST(ParseDimacs, Errors) {
  EXPECT_THROW(parse_dimacs("1 2 0"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf x 1\n1 0"), ParseError);
  EXPECT_THROW(parse_dimacs("p dnf 2 1\n1 0"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 2\n1 0"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 0\n2 0"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n3 0"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n0"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\np cnf 2 1\n1 0"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 a 0"), ParseError);
}

TEST(EmitDimacs, Header) {
  EXPECT_EQ(emit_dimacs(CnfInstance(0)), "p cnf 0 0\n");
  auto f = parse_dimacs("p cnf 3 2\n1 2 3 0\n-1 2 -3 0");
  EXPECT_EQ(emit_dimacs(f), "p cnf 3 2\n1 2 3 0\n-1 2 -3 0\n");
}

TEST(EmitDimacs, RoundTripRandomInstances) {
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const Var n = 1 + static_cast<Var>(rng.below(12));
    auto f = testsupport::random_cnf(rng, n, rng.below(15), 1, n);
    auto g = parse_dimacs(emit_dimacs(f));
    ASSERT_EQ(g.num_variables(), f.num_variables());
    ASSERT_EQ(as_ints(g), as_ints(f));
  }
}

TEST(ToThreeCnf, LongClauseChain) {
  CnfInstance f(4);
  f.add_clause(Clause::from_dimacs({1, 2, 3, 4}));
  auto t = to_three_cnf(f);
  EXPECT_EQ(t.cnf.num_variables(), 5u);
  EXPECT_EQ(as_ints(t.cnf), (std::vector<std::vector<std::int64_t>>{{1, 2, 5}, {-5, 3, 4}}));
  EXPECT_EQ(t.num_dummies(), 1u);
  // Over all 2^5 assignments: the split CNF projected to x1..x4 is the clause.
  EXPECT_EQ(testsupport::naive_projected(t.cnf, 4), testsupport::naive_projected(f, 4));
}

TEST(ToThreeCnf, UnitClauseForcesLiteral) {
  CnfInstance f(1);
  f.add_clause(Clause::from_dimacs({1}));
  auto t = to_three_cnf(f);
  EXPECT_EQ(as_ints(t.cnf),
            (std::vector<std::vector<std::int64_t>>{{1, 2, 3}, {1, -2, 3}, {1, 2, -3}, {1, -2, -3}}));
  for (const auto& m : naive_models(t.cnf)) EXPECT_EQ(m[0], 1);
  EXPECT_EQ(naive_count(t.cnf), 4u);
}

TEST(ToThreeCnf, BinaryClausePadded) {
  CnfInstance f(2);
  f.add_clause(Clause::from_dimacs({1, -2}));
  auto t = to_three_cnf(f);
  EXPECT_EQ(t.cnf.num_clauses(), 2u);
  EXPECT_TRUE(is_exact_three_cnf(t.cnf));
  EXPECT_EQ(testsupport::naive_projected(t.cnf, 2), testsupport::naive_projected(f, 2));
}

TEST(ToThreeCnf, FixedPointOnThreeCnf) {
  auto f = parse_dimacs("p cnf 3 2\n1 2 3 0\n-1 2 -3 0");
  auto t = to_three_cnf(f);
  EXPECT_EQ(as_ints(t.cnf), as_ints(f));
  EXPECT_EQ(t.num_dummies(), 0u);
}

TEST(ToThreeCnf, EmptyClauseRejected) {
  CnfInstance f(2);
  f.add_clause(Clause{});
  EXPECT_THROW(to_three_cnf(f), InvalidInput);
}

TEST(ToThreeCnf, PreservesSatisfiabilityAndProjection) {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    const Var n = 1 + static_cast<Var>(rng.below(8));
    auto f = testsupport::random_cnf(rng, n, 1 + rng.below(8), 1, std::min<Var>(n, 6));
    auto g = to_three_cnf(f);
    ASSERT_TRUE(is_exact_three_cnf(g.cnf));
    ASSERT_EQ(g.original_variables, n);
    if (g.cnf.num_variables() <= 20) {
      ASSERT_EQ(naive_count(f) > 0, naive_count(g.cnf) > 0);
      ASSERT_EQ(testsupport::naive_projected(g.cnf, n), testsupport::naive_projected(f, n));
    } else {
      ASSERT_EQ(naive_count(f) > 0, brute_sat(g.cnf, 64).satisfiable);
    }
  }
}

TEST(SplitLongClauses, KeepsShortClauses) {
  auto f = parse_dimacs("p cnf 5 2\n1 0\n1 2 3 4 5 0");
  auto g = split_long_clauses(f);
  EXPECT_EQ(g.cnf.clauses()[0].size(), 1u);
  for (const auto& c : g.cnf.clauses()) EXPECT_LE(c.size(), 3u);
  EXPECT_EQ(testsupport::naive_projected(g.cnf, 5), testsupport::naive_projected(f, 5));
}

TEST(Literal, DimacsRoundTrip) {
  EXPECT_EQ(Literal::from_dimacs(-7).to_dimacs(), -7);
  EXPECT_EQ((~Literal::pos(3)).to_dimacs(), -3);
  EXPECT_EQ(Literal::pos(3).with_sign(true).to_dimacs(), -3);
}

TEST(CnfInstance, RejectsVariableBeyondCount) {
  CnfInstance f(2);
  EXPECT_THROW(f.add_clause(Clause::from_dimacs({3})), InvalidInput);
}
