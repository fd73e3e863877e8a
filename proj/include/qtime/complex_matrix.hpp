#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qtime/errors.hpp"

namespace qtime {

using Complex = std::complex<double>;

// Dense complex matrix, row-major. The universal carrier for states,
// Choi matrices, dilation isometries and everything in between.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {
    if (rows <= 0 || cols <= 0) throw DimensionError("matrix dimensions must be positive");
  }
  ComplexMatrix(int rows, int cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows <= 0 || cols <= 0) throw DimensionError("matrix dimensions must be positive");
    if (data_.size() != static_cast<size_t>(rows) * cols)
      throw DimensionError("entry count does not match dimensions");
  }

  static ComplexMatrix identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static ComplexMatrix zero(int rows, int cols) { return ComplexMatrix(rows, cols); }
  // Matrix unit with a single 1 at (i, j).
  static ComplexMatrix unit(int n, int i, int j) {
    ComplexMatrix m(n, n);
    m(i, j) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const Complex& operator()(int i, int j) const {
    return data_[static_cast<size_t>(i) * cols_ + j];
  }

  const std::vector<Complex>& entries() const { return data_; }
  std::vector<Complex>& entries() { return data_; }

  bool all_finite() const {
    for (const auto& z : data_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
    ComplexMatrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix shape mismatch");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> data_;
};

inline ComplexMatrix transpose(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline ComplexMatrix conjugate(const ComplexMatrix& a) {
  ComplexMatrix c = a;
  for (auto& z : c.entries()) z = std::conj(z);
  return c;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

inline Complex trace(const ComplexMatrix& a) {
  if (!a.square()) throw DimensionError("trace needs a square matrix");
  Complex t = 0.0;
  for (int i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

// Hilbert-Schmidt inner product (a,b) = tr[b^dagger a].
inline Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("hs_inner shape mismatch");
  Complex s = 0.0;
  const auto& ae = a.entries();
  const auto& be = b.entries();
  for (size_t k = 0; k < ae.size(); ++k) s += std::conj(be[k]) * ae[k];
  return s;
}

inline double frob_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.entries()) s += std::norm(z);
  return std::sqrt(s);
}

// ||a - a^dagger||_F
inline double hermiticity_defect(const ComplexMatrix& a) {
  if (!a.square()) throw DimensionError("hermiticity check needs a square matrix");
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.rows(); ++j) s += std::norm(a(i, j) - std::conj(a(j, i)));
  return std::sqrt(s);
}

inline ComplexMatrix hermitize(const ComplexMatrix& a) {
  ComplexMatrix h(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return h;
}

// Relative scale used by most tolerances: max(1, ||a||_F).
inline double norm_scale(const ComplexMatrix& a) { return std::max(1.0, frob_norm(a)); }

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  // (a (x) b)[(i*rb+k), (j*cb+l)] = a[i,j] * b[k,l]
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0)) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return c;
}

enum class Factor { A, B };

namespace detail {
inline void require_bipartite(const ComplexMatrix& m, int dA, int dB) {
  if (dA <= 0 || dB <= 0) throw DimensionError("factor dimensions must be positive");
  if (!m.square() || m.rows() != dA * dB)
    throw DimensionError("matrix is not (dA*dB) x (dA*dB)");
}
}  // namespace detail

inline ComplexMatrix partial_trace(const ComplexMatrix& m, int dA, int dB, Factor which) {
  detail::require_bipartite(m, dA, dB);
  if (which == Factor::A) {
    ComplexMatrix out(dB, dB);
    for (int k = 0; k < dB; ++k)
      for (int l = 0; l < dB; ++l) {
        Complex s = 0.0;
        for (int i = 0; i < dA; ++i) s += m(i * dB + k, i * dB + l);
        out(k, l) = s;
      }
    return out;
  }
  ComplexMatrix out(dA, dA);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < dB; ++k) s += m(i * dB + k, j * dB + k);
      out(i, j) = s;
    }
  return out;
}

inline ComplexMatrix partial_transpose(const ComplexMatrix& m, int dA, int dB, Factor which) {
  detail::require_bipartite(m, dA, dB);
  ComplexMatrix out(dA * dB, dA * dB);
  if (which == Factor::A) {
    // block (i,j) <- block (j,i)
    for (int i = 0; i < dA; ++i)
      for (int j = 0; j < dA; ++j)
        for (int k = 0; k < dB; ++k)
          for (int l = 0; l < dB; ++l) out(i * dB + k, j * dB + l) = m(j * dB + k, i * dB + l);
  } else {
    // transpose inside each block
    for (int i = 0; i < dA; ++i)
      for (int j = 0; j < dA; ++j)
        for (int k = 0; k < dB; ++k)
          for (int l = 0; l < dB; ++l) out(i * dB + k, j * dB + l) = m(i * dB + l, j * dB + k);
  }
  return out;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.square() || !b.square() || a.rows() != b.rows())
    throw DimensionError("commutator needs square matrices of equal dimension");
  return a * b - b * a;
}

// {a,b} = ab + ba, no 1/2 factor.
inline ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.square() || !b.square() || a.rows() != b.rows())
    throw DimensionError("anticommutator needs square matrices of equal dimension");
  return a * b + b * a;
}

// Extracts the dB x dB block (i,j) of a (dA*dB)-dimensional matrix.
inline ComplexMatrix block(const ComplexMatrix& m, int dA, int dB, int i, int j) {
  detail::require_bipartite(m, dA, dB);
  ComplexMatrix out(dB, dB);
  for (int k = 0; k < dB; ++k)
    for (int l = 0; l < dB; ++l) out(k, l) = m(i * dB + k, j * dB + l);
  return out;
}

}  // namespace qtime
