#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "maple/integer_matrix.hpp"

namespace maple {

// Gram-Schmidt data of a column basis, in exact rationals.
// bstar[i] is the i-th orthogonalized column; mu[i][j] is defined for j < i.
struct GsoData {
  std::vector<std::vector<Rational>> bstar;
  std::vector<std::vector<Rational>> mu;
  std::vector<Rational> norms;  // |bstar[i]|^2

  std::vector<std::vector<double>> bstar_double() const {
    std::vector<std::vector<double>> out(bstar.size());
    for (std::size_t i = 0; i < bstar.size(); ++i)
      for (const auto& v : bstar[i]) out[i].push_back(v.get_d());
    return out;
  }
};

inline GsoData gram_schmidt(const IntegerMatrix& b) {
  const std::size_t n = b.rows();
  const std::size_t d = b.cols();
  GsoData g;
  g.bstar.assign(d, std::vector<Rational>(n));
  g.mu.assign(d, std::vector<Rational>(d));
  g.norms.assign(d, Rational(0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < n; ++k) g.bstar[i][k] = b(k, i);
    for (std::size_t j = 0; j < i; ++j) {
      Rational dot = 0;
      for (std::size_t k = 0; k < n; ++k) dot += Rational(b(k, i)) * g.bstar[j][k];
      g.mu[i][j] = dot / g.norms[j];
      for (std::size_t k = 0; k < n; ++k) g.bstar[i][k] -= g.mu[i][j] * g.bstar[j][k];
    }
    for (std::size_t k = 0; k < n; ++k) g.norms[i] += g.bstar[i][k] * g.bstar[i][k];
    if (g.norms[i] == 0)
      fail(ErrorKind::DependentColumns,
           "gram_schmidt: column " + std::to_string(i) + " is dependent");
  }
  return g;
}

// Size condition |mu_ij| <= 1/2 and the factor-2 condition
// |b*_j|^2 <= 2 |b*_{j+1}|^2, checked exactly.
inline bool is_lll_reduced(const GsoData& g) {
  const std::size_t d = g.norms.size();
  const Rational half(1, 2);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (abs(g.mu[i][j]) > half) return false;
  for (std::size_t j = 0; j + 1 < d; ++j)
    if (g.norms[j] > 2 * g.norms[j + 1]) return false;
  return true;
}

inline bool is_lll_reduced(const IntegerMatrix& b) {
  return is_lll_reduced(gram_schmidt(b));
}

namespace detail {

// Integral LLL state: lambda[i][j] = d_{j+1} * mu_ij and d[i+1] = product of
// |b*_0|^2..|b*_i|^2 are integers, so the loop never leaves Z. d[0] = 1.
class IntegralLll {
 public:
  explicit IntegralLll(IntegerMatrix& basis)
      : b_(basis),
        n_(basis.rows()),
        dim_(basis.cols()),
        d_(dim_ + 1),
        lambda_(dim_, std::vector<Integer>(dim_)) {}

  void run() {
    if (dim_ == 0) return;
    d_[0] = 1;
    d_[1] = dot(0, 0);
    if (d_[1] == 0) dependent(0);
    std::size_t k = 1;
    std::size_t kmax = 0;
    while (k < dim_) {
      if (k > kmax) {
        kmax = k;
        extend_gso(k);
      }
      reduce(k, k - 1);
      // Exchange when |b*_{k-1}|^2 > 2 |b*_k|^2, i.e. d_{k}^2 > 2 d_{k+1} d_{k-1}
      // in the shifted indexing used here.
      if (d_[k] * d_[k] > 2 * d_[k + 1] * d_[k - 1]) {
        swap(k, kmax);
        if (k > 1) --k;
      } else {
        for (std::size_t l = k - 1; l-- > 0;) reduce(k, l);
        ++k;
      }
    }
  }

 private:
  Integer dot(std::size_t i, std::size_t j) const {
    Integer s = 0;
    for (std::size_t r = 0; r < n_; ++r) s += b_(r, i) * b_(r, j);
    return s;
  }

  [[noreturn]] static void dependent(std::size_t k) {
    fail(ErrorKind::DependentColumns,
         "lll_reduce: column " + std::to_string(k) + " is dependent");
  }

  void extend_gso(std::size_t k) {
    for (std::size_t j = 0; j <= k; ++j) {
      Integer u = dot(k, j);
      for (std::size_t i = 0; i < j; ++i) {
        u = d_[i + 1] * u - lambda_[k][i] * lambda_[j][i];
        mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d_[i].get_mpz_t());
      }
      if (j < k) {
        lambda_[k][j] = u;
      } else {
        d_[k + 1] = u;
        if (u == 0) dependent(k);
      }
    }
  }

  // Size-reduce column k against column l.
  void reduce(std::size_t k, std::size_t l) {
    Integer twice = 2 * lambda_[k][l];
    if (abs(twice) <= d_[l + 1]) return;
    // q = nearest integer to lambda / d_{l+1}
    Integer q = 2 * lambda_[k][l] + d_[l + 1];
    Integer den = 2 * d_[l + 1];
    mpz_fdiv_q(q.get_mpz_t(), q.get_mpz_t(), den.get_mpz_t());
    b_.submul_column(k, l, q);
    lambda_[k][l] -= q * d_[l + 1];
    for (std::size_t i = 0; i < l; ++i) lambda_[k][i] -= q * lambda_[l][i];
  }

  void swap(std::size_t k, std::size_t kmax) {
    b_.swap_columns(k, k - 1);
    for (std::size_t j = 0; j + 1 < k; ++j) std::swap(lambda_[k][j], lambda_[k - 1][j]);
    const Integer lam = lambda_[k][k - 1];
    Integer bb = d_[k - 1] * d_[k + 1] + lam * lam;
    mpz_divexact(bb.get_mpz_t(), bb.get_mpz_t(), d_[k].get_mpz_t());
    for (std::size_t i = k + 1; i <= kmax; ++i) {
      const Integer t = lambda_[i][k];
      Integer a = d_[k + 1] * lambda_[i][k - 1] - lam * t;
      mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), d_[k].get_mpz_t());
      lambda_[i][k] = a;
      Integer c = bb * t + lam * lambda_[i][k];
      mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), d_[k + 1].get_mpz_t());
      lambda_[i][k - 1] = c;
    }
    d_[k] = bb;
  }

  IntegerMatrix& b_;
  std::size_t n_;
  std::size_t dim_;
  std::vector<Integer> d_;
  std::vector<std::vector<Integer>> lambda_;
};

}  // namespace detail

// LLL reduction of the columns of b. Works entirely in integers; the result
// satisfies is_lll_reduced under exact recheck.
inline IntegerMatrix lll_reduce(IntegerMatrix b) {
  detail::IntegralLll(b).run();
  return b;
}

}  // namespace maple
