#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace xlra {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// Dense row-major complex matrix. Just enough surface for the pilot, channel
// and precoding algebra; no general-purpose decompositions beyond Cholesky.
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<cplx> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const cplx> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

// sum_i a_i * b_i (no conjugation).
inline cplx dotu(std::span<const cplx> a, std::span<const cplx> b) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// sum_i conj(a_i) * b_i.
inline cplx dotc(std::span<const cplx> a, std::span<const cplx> b) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline double norm2(std::span<const cplx> a) {
  double acc = 0.0;
  for (const cplx& v : a) acc += std::norm(v);
  return acc;
}

inline double vec_norm(std::span<const cplx> a) { return std::sqrt(norm2(a)); }

// y += alpha * x
inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Row vector times matrix: out_j = sum_i x_i * A(i, j).
inline CVec vecmat(std::span<const cplx> x, const CMat& a) {
  CVec out(a.cols(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const cplx xi = x[i];
    if (xi == cplx{0.0, 0.0}) continue;
    std::span<const cplx> row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += xi * row[j];
  }
  return out;
}

// Matrix times column vector.
inline CVec matvec(const CMat& a, std::span<const cplx> x) {
  CVec out(a.rows(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dotu(a.row(i), x);
  return out;
}

inline bool is_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
  return true;
}

// Lower-triangular L with L L^H = A for Hermitian positive definite A.
// Throws std::runtime_error when a pivot fails.
inline CMat cholesky(const CMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: not square");
  const std::size_t n = a.rows();
  CMat l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cplx acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      if (i == j) {
        const double d = acc.real();
        if (d <= 0.0 || !std::isfinite(d))
          throw std::runtime_error("cholesky: matrix not positive definite");
        l(i, j) = std::sqrt(d);
      } else {
        l(i, j) = acc / l(j, j).real();
      }
    }
  }
  return l;
}

}  // namespace xlra
