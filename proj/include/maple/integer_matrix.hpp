#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maple/error.hpp"

namespace maple {

using Integer = mpz_class;
using Rational = mpq_class;

// Machine-width integer vector; directions and solutions live here once the
// exact lattice work is done.
using IntVector = std::vector<std::int64_t>;
using RealVector = std::vector<double>;

// Dense exact integer matrix, row-major.
class IntegerMatrix {
 public:
  IntegerMatrix() = default;

  IntegerMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  IntegerMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      require_length(row.size(), cols_, "IntegerMatrix row");
      for (long v : row) data_.emplace_back(v);
    }
  }

  static IntegerMatrix identity(std::size_t n) {
    IntegerMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  template <typename Row>
  static IntegerMatrix from_rows(const std::vector<Row>& rows) {
    IntegerMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i) {
      require_length(rows[i].size(), m.cols_, "IntegerMatrix row");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = Integer(rows[i][j]);
    }
    return m;
  }

  // Builds a matrix whose columns are the given vectors.
  static IntegerMatrix from_columns(const std::vector<IntVector>& cols,
                                    std::size_t height) {
    IntegerMatrix m(height, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      require_length(cols[j].size(), height, "IntegerMatrix column");
      for (std::size_t i = 0; i < height; ++i)
        m(i, j) = Integer(static_cast<long>(cols[j][i]));
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Integer& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  const Integer& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::vector<Integer> column(std::size_t j) const {
    std::vector<Integer> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void swap_columns(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  void negate_column(std::size_t j) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = -(*this)(i, j);
  }

  // column dst -= q * column src
  void submul_column(std::size_t dst, std::size_t src, const Integer& q) {
    if (q == 0) return;
    for (std::size_t i = 0; i < rows_; ++i)
      (*this)(i, dst) -= q * (*this)(i, src);
  }

  IntegerMatrix columns(std::size_t first, std::size_t count) const {
    IntegerMatrix m(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < count; ++j) m(i, j) = (*this)(i, first + j);
    return m;
  }

  IntegerMatrix transpose() const {
    IntegerMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
    require_length(b.rows_, a.cols_, "matrix product inner dimension");
    IntegerMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const IntegerMatrix& a, const IntegerMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  bool is_zero() const {
    for (const auto& v : data_)
      if (v != 0) return false;
    return true;
  }

  // True when every entry fits in int64.
  bool fits_int64() const {
    for (const auto& v : data_)
      if (!fits_int64(v)) return false;
    return true;
  }

  static bool fits_int64(const Integer& v) {
    static const Integer lo("-9223372036854775808");
    static const Integer hi("9223372036854775807");
    return v >= lo && v <= hi;
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      s += i ? ", [" : "[";
      for (std::size_t j = 0; j < cols_; ++j) {
        if (j) s += ", ";
        s += (*this)(i, j).get_str();
      }
      s += "]";
    }
    return s + "]";
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

inline std::int64_t to_int64(const Integer& v) {
  if (!IntegerMatrix::fits_int64(v))
    fail(ErrorKind::TooLarge, "integer " + v.get_str() + " exceeds 64 bits");
  // mpz get_si is long; long is 64-bit on the supported platforms.
  static_assert(sizeof(long) == 8);
  return v.get_si();
}

inline Integer to_integer(std::int64_t v) {
  static_assert(sizeof(long) == 8);
  return Integer(static_cast<long>(v));
}

// Dense int64 copy of a matrix whose entries are known to be small.
struct SmallMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> data;

  std::int64_t operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }

  static SmallMatrix from(const IntegerMatrix& m) {
    SmallMatrix s{m.rows(), m.cols(), {}};
    s.data.reserve(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) s.data.push_back(to_int64(m(i, j)));
    return s;
  }
};

// A * x with exact integer accumulation (entries are int64, sums in int128).
inline IntVector multiply(const SmallMatrix& a, std::span<const std::int64_t> x) {
  require_length(x.size(), a.cols, "matrix-vector product");
  IntVector out(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    __int128 acc = 0;
    for (std::size_t j = 0; j < a.cols; ++j)
      acc += static_cast<__int128>(a(i, j)) * x[j];
    if (acc > INT64_MAX || acc < INT64_MIN)
      fail(ErrorKind::TooLarge, "matrix-vector product overflows 64 bits");
    out[i] = static_cast<std::int64_t>(acc);
  }
  return out;
}

inline std::vector<Integer> multiply(const IntegerMatrix& a,
                                     std::span<const Integer> x) {
  require_length(x.size(), a.cols(), "matrix-vector product");
  std::vector<Integer> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
  return out;
}

inline std::vector<Integer> to_integers(std::span<const std::int64_t> v) {
  std::vector<Integer> out;
  out.reserve(v.size());
  for (auto x : v) out.push_back(to_integer(x));
  return out;
}

// Exact determinant of a square matrix (fraction-free Bareiss elimination).
inline Integer determinant(IntegerMatrix m) {
  require_length(m.cols(), m.rows(), "determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = t;
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

}  // namespace maple
