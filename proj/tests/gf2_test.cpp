#include <gtest/gtest.h>

#include "satrand/bit_matrix.hpp"
#include "support/oracles.hpp"

using namespace satrand;

namespace {

std::vector<std::vector<int>> to_ints(const BitMatrix& m) {
  std::vector<std::vector<int>> out(m.rows(), std::vector<int>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m.get(r, c);
  return out;
}

BitMatrix naive_gf2_product(const BitMatrix& a, const BitMatrix& b) {
  BitMatrix p(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      int s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s ^= a.get(i, k) & b.get(k, j);
      p.set(i, j, s);
    }
  return p;
}

BitMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  BitMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, rng.coin());
  return m;
}

}  // namespace

TEST(RandomFullRank, DimensionOne) { EXPECT_EQ(random_full_rank(1, 99), BitMatrix::from_strings({"1"})); }

TEST(RandomFullRank, FullRankAndDeterministic) {
  auto m = random_full_rank(8, 42);
  EXPECT_EQ(testsupport::naive_gf2_rank(to_ints(m)), 8u);
  EXPECT_EQ(m, random_full_rank(8, 42));
  EXPECT_NE(m, random_full_rank(8, 43));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t dim = 1 + seed % 70;
    ASSERT_EQ(testsupport::naive_gf2_rank(to_ints(random_full_rank(dim, seed))), dim);
  }
}

TEST(Gf2Rank, Basics) {
  EXPECT_EQ(gf2_rank(BitMatrix::identity(5)), 5u);
  EXPECT_EQ(gf2_rank(BitMatrix(4, 4)), 0u);
  EXPECT_EQ(gf2_rank(BitMatrix::from_strings({"11", "11"})), 1u);
}

TEST(Gf2Rank, AgreesWithReference) {
  Rng rng(1);
  for (int t = 0; t < 500; ++t) {
    auto m = random_matrix(rng, 1 + rng.below(9), 1 + rng.below(9));
    ASSERT_EQ(gf2_rank(m), testsupport::naive_gf2_rank(to_ints(m)));
  }
  auto wide = random_matrix(rng, 70, 130);
  EXPECT_EQ(gf2_rank(wide), testsupport::naive_gf2_rank(to_ints(wide)));
}

TEST(Gf2Invert, Identity) { EXPECT_EQ(gf2_invert(BitMatrix::identity(6)), BitMatrix::identity(6)); }

TEST(Gf2Invert, SelfInverse) {
  auto m = BitMatrix::from_strings({"11", "01"});
  EXPECT_EQ(gf2_invert(m), m);
}

TEST(Gf2Invert, RandomProductsAreIdentity) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const std::size_t dim = 1 + seed % 20;
    auto m = random_full_rank(dim, seed);
    auto inv = gf2_invert(m);
    ASSERT_EQ(naive_gf2_product(m, inv), BitMatrix::identity(dim));
    ASSERT_EQ(gf2_invert(inv), m);
  }
}

TEST(Gf2Invert, Singular) {
  EXPECT_THROW(gf2_invert(BitMatrix::from_strings({"11", "11"})), InvalidInput);
  EXPECT_THROW(gf2_invert(BitMatrix(2, 3)), InvalidInput);
}

TEST(Gf2Multiply, MatchesReference) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    auto a = random_matrix(rng, 1 + rng.below(70), 1 + rng.below(70));
    auto b = random_matrix(rng, a.cols(), 1 + rng.below(70));
    ASSERT_EQ(gf2_multiply(a, b), naive_gf2_product(a, b));
  }
}

TEST(IntMatMul, IdentityAndCancellation) {
  auto a = IntMatrix::from_rows({{1, -1, 0}, {2, 3, -4}});
  auto ra = int_mat_mul(BitMatrix::identity(2), a);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(ra(i, j), a(i, j));
  auto sum = int_mat_mul(BitMatrix::from_strings({"11"}), IntMatrix::from_rows({{1}, {-1}}));
  EXPECT_EQ(sum(0, 0), 0);
  auto rb = int_mat_mul(BitMatrix::from_strings({"11"}), IntMatrix::from_rows({{3}, {1}}));
  EXPECT_EQ(rb(0, 0), 4);
  EXPECT_THROW(int_mat_mul(BitMatrix::identity(3), a), InvalidInput);
}

TEST(IntMatMul, LinearInSecondArgument) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + rng.below(32), n = 1 + rng.below(32);
    auto r = random_matrix(rng, m, m);
    IntMatrix a(m, n), b(m, n), s(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = static_cast<std::int64_t>(rng.below(7)) - 3;
        b(i, j) = static_cast<std::int64_t>(rng.below(7)) - 3;
        s(i, j) = a(i, j) + b(i, j);
      }
    auto ra = int_mat_mul(r, a), rb = int_mat_mul(r, b), rs = int_mat_mul(r, s);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        ASSERT_EQ(rs(i, j), ra(i, j) + rb(i, j));
        std::int64_t ref = 0;
        for (std::size_t k = 0; k < m; ++k) ref += r.get(i, k) * a(k, j);
        ASSERT_EQ(ra(i, j), ref);
      }
  }
}

TEST(RandomSparseFullRank, WeightOneIsPermutation) {
  auto m = random_sparse_full_rank(10, 1, 5);
  for (std::size_t r = 0; r < 10; ++r) EXPECT_EQ(m.row_weight(r), 1u);
  EXPECT_EQ(gf2_rank(m), 10u);
}

TEST(RandomSparseFullRank, RankAndWeightBound) {
  auto m = random_sparse_full_rank(16, 3, 7);
  EXPECT_EQ(testsupport::naive_gf2_rank(to_ints(m)), 16u);
  EXPECT_LE(m.nonzeros(), 48u);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = random_sparse_full_rank(4, 2, seed);
    ASSERT_EQ(testsupport::naive_gf2_rank(to_ints(s)), 4u);
    for (std::size_t r = 0; r < 4; ++r) ASSERT_LE(s.row_weight(r), 2u);
  }
}

TEST(BitMatrix, StringRoundTrip) {
  auto m = BitMatrix::from_strings({"101", "010"});
  EXPECT_EQ(m.to_strings(), (std::vector<std::string>{"101", "010"}));
  EXPECT_THROW(BitMatrix::from_strings({"10", "1"}), ParseError);
  EXPECT_THROW(BitMatrix::from_strings({"12"}), ParseError);
}
