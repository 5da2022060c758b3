#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "satrand/error.hpp"
#include "satrand/rng.hpp"

namespace satrand {

/// Dense 0/1 matrix, rows packed into 64-bit words.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64), bits_(rows * words_per_row_, 0) {}

  static BitMatrix identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  /// Builds from row strings of '0'/'1'.
  static BitMatrix from_strings(const std::vector<std::string>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    BitMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw ParseError("bit matrix rows have unequal length");
      for (std::size_t c = 0; c < cols; ++c) {
        char ch = rows[r][c];
        if (ch != '0' && ch != '1') throw ParseError("bit matrix entry must be 0 or 1");
        m.set(r, c, ch == '1');
      }
    }
    return m;
  }

  std::vector<std::string> to_strings() const {
    std::vector<std::string> out(rows_, std::string(cols_, '0'));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (get(r, c)) out[r][c] = '1';
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const { return (bits_[r * words_per_row_ + c / 64] >> (c % 64)) & 1U; }
  void set(std::size_t r, std::size_t c, bool v) {
    auto& w = bits_[r * words_per_row_ + c / 64];
    const std::uint64_t mask = std::uint64_t{1} << (c % 64);
    w = v ? (w | mask) : (w & ~mask);
  }
  void flip(std::size_t r, std::size_t c) { bits_[r * words_per_row_ + c / 64] ^= std::uint64_t{1} << (c % 64); }

  /// row[dst] ^= row[src]
  void xor_row(std::size_t dst, std::size_t src) {
    for (std::size_t w = 0; w < words_per_row_; ++w) bits_[dst * words_per_row_ + w] ^= bits_[src * words_per_row_ + w];
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t w = 0; w < words_per_row_; ++w)
      std::swap(bits_[a * words_per_row_ + w], bits_[b * words_per_row_ + w]);
  }

  std::size_t row_weight(std::size_t r) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_per_row_; ++w) n += std::popcount(bits_[r * words_per_row_ + w]);
    return n;
  }
  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (auto w : bits_) n += std::popcount(w);
    return n;
  }

  /// Column indices of the set bits in row r, ascending.
  std::vector<std::size_t> row_support(std::size_t r) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < cols_; ++c)
      if (get(r, c)) out.push_back(c);
    return out;
  }

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Dense integer matrix (row-major).
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), v_(rows * cols, 0) {}
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols_) throw InvalidInput("ragged integer matrix");
      for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::int64_t& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
  std::int64_t operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

  bool operator==(const IntMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> v_;
};

inline std::size_t gf2_rank(BitMatrix m) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t p = rank;
    while (p < m.rows() && !m.get(p, c)) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(rank, p);
    for (std::size_t r = 0; r < m.rows(); ++r)
      if (r != rank && m.get(r, c)) m.xor_row(r, rank);
    ++rank;
  }
  return rank;
}

/// Gauss-Jordan inverse over GF(2). Throws InvalidInput on a singular or
/// non-square matrix.
inline BitMatrix gf2_invert(const BitMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("gf2_invert: matrix is not square");
  const std::size_t n = m.rows();
  BitMatrix a = m;
  BitMatrix inv = BitMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && !a.get(p, c)) ++p;
    if (p == n) throw InvalidInput("gf2_invert: matrix is singular over GF(2)");
    a.swap_rows(c, p);
    inv.swap_rows(c, p);
    for (std::size_t r = 0; r < n; ++r)
      if (r != c && a.get(r, c)) {
        a.xor_row(r, c);
        inv.xor_row(r, c);
      }
  }
  return inv;
}

inline BitMatrix gf2_multiply(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("gf2_multiply: dimension mismatch");
  BitMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      if (a.get(i, k))
        for (std::size_t j = 0; j < b.cols(); ++j)
          if (b.get(k, j)) out.flip(i, j);
  return out;
}

/// m * v over GF(2).
inline std::vector<std::uint8_t> gf2_apply(const BitMatrix& m, const std::vector<std::uint8_t>& v) {
  if (m.cols() != v.size()) throw InvalidInput("gf2_apply: dimension mismatch");
  std::vector<std::uint8_t> out(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::uint8_t acc = 0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc ^= static_cast<std::uint8_t>(m.get(r, c) && v[c]);
    out[r] = acc;
  }
  return out;
}

/// Ordinary integer product r * a (no reduction mod 2).
inline IntMatrix int_mat_mul(const BitMatrix& r, const IntMatrix& a) {
  if (r.cols() != a.rows()) throw InvalidInput("int_mat_mul: dimension mismatch");
  IntMatrix out(r.rows(), a.cols());
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t k = 0; k < r.cols(); ++k)
      if (r.get(i, k))
        for (std::size_t j = 0; j < a.cols(); ++j) {
          std::int64_t s;
          if (__builtin_add_overflow(out(i, j), a(k, j), &s)) throw InvalidInput("int_mat_mul: overflow");
          out(i, j) = s;
        }
  return out;
}

inline constexpr int kFullRankRetries = 64;

/// Uniform 0/1 matrix conditioned on full GF(2) rank (rejection sampling).
inline BitMatrix random_full_rank(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw InvalidInput("random_full_rank: dim must be >= 1");
  Rng rng(seed);
  for (int attempt = 0; attempt < kFullRankRetries; ++attempt) {
    BitMatrix m(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) m.set(r, c, rng.coin());
    if (gf2_rank(m) == dim) return m;
  }
  throw RetryBudgetExhausted("random_full_rank: no full-rank draw within retry budget");
}

/// Full-rank matrix with at most `row_weight` ones per row: a random
/// permutation matrix plus up to row_weight-1 extra random bits per row.
inline BitMatrix random_sparse_full_rank(std::size_t dim, std::size_t row_weight, std::uint64_t seed) {
  if (dim == 0) throw InvalidInput("random_sparse_full_rank: dim must be >= 1");
  if (row_weight == 0) throw InvalidInput("random_sparse_full_rank: row_weight must be >= 1");
  Rng rng(seed);
  for (int attempt = 0; attempt < kFullRankRetries; ++attempt) {
    std::vector<std::size_t> perm(dim);
    for (std::size_t i = 0; i < dim; ++i) perm[i] = i;
    rng.shuffle(std::span<std::size_t>(perm));
    BitMatrix m(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
      m.set(r, perm[r], true);
      for (std::size_t extra = 1; extra < row_weight; ++extra) m.set(r, rng.below(dim), true);
    }
    if (gf2_rank(m) == dim) return m;
  }
  throw RetryBudgetExhausted("random_sparse_full_rank: no full-rank draw within retry budget; raise row_weight");
}

}  // namespace satrand
