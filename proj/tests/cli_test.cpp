#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "satrand/firewall.hpp"
#include "satrand/oracle.hpp"

using namespace satrand;
namespace fs = std::filesystem;

namespace {

const std::string kData = SATRAND_DATA_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("satrand_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string data(const std::string& name) const { return kData + "/" + name; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, RandomizeIsDeterministic) {
  for (std::string method : {"iso", "matrix", "gf2"}) {
    for (int round = 0; round < 2; ++round) {
      auto r = run({"randomize", "--method", method, "--seed", "7", "--in", data("worked.cnf"), "--out",
                    path(method + std::to_string(round) + ".out"), "--secret", path(method + std::to_string(round) + ".key")});
      ASSERT_EQ(r.code, 0) << r.err;
    }
    EXPECT_EQ(slurp(path(method + "0.out")), slurp(path(method + "1.out")));
    EXPECT_EQ(slurp(path(method + "0.key")), slurp(path(method + "1.key")));
  }
  EXPECT_EQ(slurp(path("matrix0.out")).rfind("* #variable= 7 #constraint= 2", 0), 0u);
}

TEST_F(Cli, RandomizeSolveDerandomizeVerify) {
  for (std::string method : {"iso", "matrix", "gf2"}) {
    const std::string ext = method == "matrix" ? ".opb" : ".cnf";
    ASSERT_EQ(run({"randomize", "--method", method, "--seed", "3", "--in", data("worked.cnf"), "--out",
                   path("r" + ext), "--secret", path("r.key")})
                  .code,
              0);
    auto solved = run({"solve-brute", "--in", path("r" + ext), "--out", path("r.sol")});
    ASSERT_EQ(solved.code, 0) << solved.err;
    EXPECT_EQ(solved.out.rfind("SAT\n", 0), 0u);
    auto d = run({"derandomize", "--secret", path("r.key"), "--solution", path("r.sol"), "--original",
                  data("worked.cnf"), "--out", path("x.sol")});
    ASSERT_EQ(d.code, 0) << d.err;
    auto v = run({"verify-solution", "--in", data("worked.cnf"), "--solution", path("x.sol")});
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out, "valid\n");
  }
}

TEST_F(Cli, DerandomizeWithMismatchedSecret) {
  ASSERT_EQ(run({"randomize", "--method", "iso", "--seed", "1", "--in", data("worked.cnf"), "--out", path("r.cnf"),
                 "--secret", path("r.key")})
                .code,
            0);
  ASSERT_EQ(run({"solve-brute", "--in", path("r.cnf"), "--out", path("r.sol")}).code, 0);
  auto d = run({"derandomize", "--secret", path("r.key"), "--solution", path("r.sol"), "--original", data("unsat.cnf")});
  EXPECT_EQ(d.code, 2);
  EXPECT_NE(d.err.find("digest mismatch"), std::string::npos);
}

TEST_F(Cli, FraudulentSolutionExitsTwo) {
  std::ofstream(path("one.cnf")) << "p cnf 2 2\n1 0\n2 0\n";
  ASSERT_EQ(run({"randomize", "--method", "iso", "--seed", "5", "--in", path("one.cnf"), "--out", path("r.cnf"),
                 "--secret", path("r.key")})
                .code,
            0);
  ASSERT_EQ(run({"solve-brute", "--in", path("r.cnf"), "--out", path("r.sol")}).code, 0);
  Assignment good = cli::parse_solution(slurp(path("r.sol")));
  for (Var v = 1; v <= good.size(); ++v) good.set(v, !good[v]);
  std::ofstream(path("bad.sol")) << cli::emit_solution(good);
  auto d = run({"derandomize", "--secret", path("r.key"), "--solution", path("bad.sol"), "--original", path("one.cnf")});
  EXPECT_EQ(d.code, 2);
  EXPECT_NE(d.err.find("validation failed"), std::string::npos);
}

TEST_F(Cli, FirewallEquivalence) {
  const std::vector<std::string> layout{"--layout", "1x2,2"};
  auto enc = [&](const std::string& a, const std::string& b, const std::string& out) {
    std::vector<std::string> args{"fw-encode", "--p1", data(a), "--p2", data(b), "--out", path(out)};
    args.insert(args.end(), layout.begin(), layout.end());
    return run(args);
  };
  ASSERT_EQ(enc("small_a.fw", "small_a.fw", "same.cnf").code, 0);
  auto same = run({"solve-brute", "--in", path("same.cnf"), "--var-limit", "200"});
  EXPECT_EQ(same.out.rfind("UNSAT\n", 0), 0u) << same.out << same.err;

  ASSERT_EQ(enc("small_a.fw", "small_b.fw", "swapped.cnf").code, 0);
  EXPECT_EQ(run({"solve-brute", "--in", path("swapped.cnf"), "--var-limit", "200"}).out.rfind("UNSAT\n", 0), 0u);

  ASSERT_EQ(enc("small_a.fw", "small_c.fw", "diff.cnf").code, 0);
  auto diff = run({"solve-brute", "--in", path("diff.cnf"), "--var-limit", "200", "--out", path("diff.sol")});
  ASSERT_EQ(diff.out.rfind("SAT\n", 0), 0u);
  std::vector<std::string> dec{"fw-decode", "--p1", data("small_a.fw"), "--p2", data("small_c.fw"), "--solution",
                               path("diff.sol")};
  dec.insert(dec.end(), layout.begin(), layout.end());
  auto d = run(dec);
  ASSERT_EQ(d.code, 0) << d.err;
  // src 1 with destination port 3 is the only header class the policies disagree on
  EXPECT_EQ(d.out.rfind("1 ", 0), 0u) << d.out;
  EXPECT_NE(d.out.find(" 3\np1 deny, p2 accept\n"), std::string::npos) << d.out;
}

TEST_F(Cli, FirewallMapWithFixedPairs) {
  auto r = run({"fw-map", "--in", data("two_rules.fw"), "--pairs", data("two_rules_mapping.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "23.170.55.* 471 23.76.142.* 2313 accept\n"
            "163.201.97.* 15717 163.201.*.* 2313 accept\n"
            "default deny\n");
}

TEST_F(Cli, MincostAndMax3Sat) {
  auto m = run({"mincost-randomize", "--in", data("worked.cnf"), "--costs", data("worked.w"), "--seed", "2", "--out",
                path("m.opb"), "--cost-out", path("m.w"), "--secret", path("m.key")});
  ASSERT_EQ(m.code, 0) << m.err;
  auto s = run({"solve-brute", "--in", path("m.opb"), "--costs", path("m.w"), "--var-limit", "4096"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("optimum 1\n"), std::string::npos) << s.out;

  auto red = run({"max3sat-reduce", "--in", data("worked.cnf"), "--out", path("x.cnf"), "--cost-out", path("x.w")});
  ASSERT_EQ(red.code, 0) << red.err;
  EXPECT_EQ(red.out.rfind("offset 2\n", 0), 0u);
  auto best = run({"solve-brute", "--in", path("x.cnf"), "--costs", path("x.w")});
  EXPECT_NE(best.out.find("optimum 0\n"), std::string::npos) << best.out;
}

TEST_F(Cli, ToThreeCnf) {
  std::ofstream(path("f.cnf")) << "p cnf 4 2\n1 0\n1 -2 3 4 0\n";
  auto r = run({"to3cnf", "--in", path("f.cnf"), "--out", path("g.cnf")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto g = parse_dimacs(slurp(path("g.cnf")));
  for (const auto& c : g.clauses()) EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(brute_sat(g, 24, 4).count, brute_sat(parse_dimacs(slurp(path("f.cnf")))).count);
}

TEST_F(Cli, Outsource) {
  auto r = run({"outsource", "--in", data("worked.cnf"), "--providers", "honest,lazy,malicious-unsat", "--seed", "4",
                "--no-timings"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("verdict sat\n"), std::string::npos);
  EXPECT_NE(r.out.find("behavior=lazy"), std::string::npos);
  EXPECT_EQ(r.out.find("elapsed_us"), std::string::npos);
  EXPECT_EQ(r.out, run({"outsource", "--in", data("worked.cnf"), "--providers", "honest,lazy,malicious-unsat",
                        "--seed", "4", "--no-timings"})
                       .out);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"transmogrify"}).code, 1);
  EXPECT_EQ(run({"randomize", "--method", "iso"}).code, 1);
  auto missing = run({"randomize", "--method", "iso", "--in", path("nope.cnf")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("nope.cnf"), std::string::npos);
  std::ofstream(path("bad.cnf")) << "p cnf 2 1\n1 3 0\n";
  auto bad = run({"solve-brute", "--in", path("bad.cnf")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("bad.cnf"), std::string::npos);
  EXPECT_EQ(run({"randomize", "--method", "max3sat", "--in", data("worked.cnf")}).code, 1);
  EXPECT_EQ(run({"outsource", "--in", data("worked.cnf"), "--providers", "sneaky"}).code, 1);
}

TEST_F(Cli, VerifyRejectsWrongSolution) {
  std::ofstream(path("s.sol")) << "-1 -2 -3 0\n";
  auto r = run({"verify-solution", "--in", data("worked.cnf"), "--solution", path("s.sol")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.out, "invalid\n");
}

TEST(SolutionFile, RoundTripAndErrors) {
  Assignment a(std::vector<std::uint8_t>{1, 0, 1});
  EXPECT_EQ(cli::emit_solution(a), "1 -2 3 0\n");
  EXPECT_EQ(cli::parse_solution("v 1 -2 3 0\n").bits(), a.bits());
  EXPECT_EQ(cli::parse_solution("c note\n3 1 -2\n").bits(), a.bits());
  EXPECT_THROW(cli::parse_solution("1 -1 0"), ParseError);
  EXPECT_THROW(cli::parse_solution("1 3 0"), ParseError);
  EXPECT_THROW(cli::parse_solution("1 x 0"), ParseError);
}
