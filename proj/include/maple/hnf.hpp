#pragma once

#include <cstddef>
#include <string>

#include "maple/integer_matrix.hpp"

namespace maple {

// A * C = (H | 0) with C unimodular. D = first m columns of C, B = the rest.
struct HnfResult {
  IntegerMatrix H;
  IntegerMatrix C;
  IntegerMatrix D;
  IntegerMatrix B;
};

namespace detail {

// Index in [from, n) of the smallest nonzero |row(i, j)|, leftmost on ties.
// Returns n when the row is zero on that range.
inline std::size_t smallest_pivot(const IntegerMatrix& ac, std::size_t row,
                                  std::size_t from) {
  std::size_t best = ac.cols();
  for (std::size_t j = from; j < ac.cols(); ++j) {
    if (ac(row, j) == 0) continue;
    if (best == ac.cols() || abs(ac(row, j)) < abs(ac(row, best))) best = j;
  }
  return best;
}

// Apply a column operation to both the working product A*C and C.
struct ColumnPair {
  IntegerMatrix& ac;
  IntegerMatrix& c;

  void swap(std::size_t a, std::size_t b) {
    ac.swap_columns(a, b);
    c.swap_columns(a, b);
  }
  void negate(std::size_t j) {
    ac.negate_column(j);
    c.negate_column(j);
  }
  void submul(std::size_t dst, std::size_t src, const Integer& q) {
    ac.submul_column(dst, src, q);
    c.submul_column(dst, src, q);
  }
};

}  // namespace detail

// Column-style Hermite normal form of a full-row-rank A (m <= n).
// Row by row, repeated gcd reduction against the smallest-magnitude entry
// clears the pivot row to the right of the diagonal; then the diagonal is made
// positive and entries left of it are reduced into [0, h_ii).
inline HnfResult hnf(const IntegerMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m == 0 || n == 0) fail(ErrorKind::DimensionError, "hnf: empty matrix");
  if (m > n)
    fail(ErrorKind::RankDeficient, "hnf: more rows than columns, rank < m");

  IntegerMatrix ac = a;
  IntegerMatrix c = IntegerMatrix::identity(n);
  detail::ColumnPair ops{ac, c};

  for (std::size_t i = 0; i < m; ++i) {
    for (;;) {
      const std::size_t p = detail::smallest_pivot(ac, i, i);
      if (p == n)
        fail(ErrorKind::RankDeficient,
             "hnf: row " + std::to_string(i) + " is dependent on earlier rows");
      ops.swap(i, p);
      bool cleared = true;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (ac(i, j) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), ac(i, j).get_mpz_t(), ac(i, i).get_mpz_t());
        ops.submul(j, i, q);
        if (ac(i, j) != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (ac(i, i) < 0) ops.negate(i);
    for (std::size_t j = 0; j < i; ++j) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), ac(i, j).get_mpz_t(), ac(i, i).get_mpz_t());
      ops.submul(j, i, q);
    }
  }

  HnfResult r;
  r.H = ac.columns(0, m);
  r.D = c.columns(0, m);
  r.B = c.columns(m, n - m);
  r.C = std::move(c);
  return r;
}

// Basis of the integer kernel lattice {g in Z^n : A g = 0}, as columns.
inline IntegerMatrix kernel_lattice_basis(const IntegerMatrix& a) {
  if (a.rows() >= a.cols() && a.rows() > 0) {
    // Still run hnf first so a rank-deficient square A reports RankDeficient.
    (void)hnf(a);
    fail(ErrorKind::FullRankKernel, "kernel lattice is {0} (m = n)");
  }
  return hnf(a).B;
}

}  // namespace maple
