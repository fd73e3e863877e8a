#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qtime/complex_matrix.hpp"
#include "qtime/errors.hpp"

namespace qtime {

struct HermEigen {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // unitary, columns match eigenvalues
};

namespace detail {

inline double offdiag_frob(const ComplexMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace detail

// Cyclic Jacobi diagonalisation of a Hermitian matrix. Each sweep annihilates
// every off-diagonal entry once with a complex plane rotation; stops when the
// off-diagonal Frobenius norm drops below 1e-12 * max(1, ||m||_F).
inline HermEigen herm_eig(const ComplexMatrix& m) {
  if (!m.square()) throw DimensionError("herm_eig needs a square matrix");
  const int n = m.rows();
  const double scale = norm_scale(m);
  const double defect = hermiticity_defect(m);
  if (defect > 1e-10 * scale)
    throw ValidationError("herm_eig input is not Hermitian", defect);

  ComplexMatrix a = hermitize(m);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double tol = 1e-12 * scale;
  const int max_sweeps = 100;

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (detail::offdiag_frob(a) <= tol) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const Complex phase = apq / mag;  // e^{i phi}
        // annihilation condition: mag*(c^2 - s^2) + (aqq - app)*c*s = 0,
        // i.e. t^2 - 2*tau*t - 1 = 0 for t = s/c; take the root of smaller magnitude
        const double tau = (aqq - app) / (2.0 * mag);
        double t;
        if (tau >= 0.0)
          t = -1.0 / (tau + std::sqrt(1.0 + tau * tau));
        else
          t = 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // Columns p, q of both a and v: right-multiply by the rotation
        //   [ c          -s phase ]
        //   [ s conj(phase)    c  ]
        for (int k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * c + akq * (s * std::conj(phase));
          a(k, q) = -akp * (s * phase) + akq * c;
        }
        // Rows p, q: left-multiply by the adjoint rotation.
        for (int k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = apk * c + aqk * (s * phase);
          a(q, k) = -apk * (s * std::conj(phase)) + aqk * c;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);
        for (int k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * c + vkq * (s * std::conj(phase));
          v(k, q) = -vkp * (s * phase) + vkq * c;
        }
      }
    }
  }
  const double off = detail::offdiag_frob(a);
  if (off > tol)
    throw NumericalError("herm_eig did not converge in 100 sweeps", off);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  HermEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]).real();
    for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
  }
  return out;
}

inline double min_eigenvalue(const ComplexMatrix& m) { return herm_eig(m).eigenvalues.front(); }

// Applies f to the spectrum: U diag(f(lambda)) U^dagger.
inline ComplexMatrix herm_apply(const HermEigen& eig, const std::vector<Complex>& fvals) {
  const int n = eig.eigenvectors.rows();
  ComplexMatrix scaled = eig.eigenvectors;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) scaled(i, j) *= fvals[j];
  return scaled * adjoint(eig.eigenvectors);
}

// Projection onto the PSD cone: clamp negative eigenvalues to zero.
inline ComplexMatrix psd_project(const ComplexMatrix& m) {
  const double defect = hermiticity_defect(m);
  if (defect > 1e-8 * norm_scale(m))
    throw ValidationError("psd_project input is not Hermitian", defect);
  HermEigen eig = herm_eig(hermitize(m));
  std::vector<Complex> clamped(eig.eigenvalues.size());
  for (size_t i = 0; i < eig.eigenvalues.size(); ++i)
    clamped[i] = std::max(eig.eigenvalues[i], 0.0);
  return herm_apply(eig, clamped);
}

// Hermitian square root of a PSD matrix (negative eigenvalues clamped to 0).
inline ComplexMatrix herm_sqrt(const ComplexMatrix& m) {
  HermEigen eig = herm_eig(m);
  std::vector<Complex> roots(eig.eigenvalues.size());
  for (size_t i = 0; i < eig.eigenvalues.size(); ++i)
    roots[i] = std::sqrt(std::max(eig.eigenvalues[i], 0.0));
  return herm_apply(eig, roots);
}

// e^{ita} b e^{-ita} with a Hermitian, via the eigendecomposition of a.
inline ComplexMatrix herm_exp_conjugate(const ComplexMatrix& a, double t,
                                        const ComplexMatrix& b) {
  if (!b.square() || b.rows() != a.rows())
    throw DimensionError("herm_exp_conjugate needs b square of a's dimension");
  HermEigen eig = herm_eig(a);
  std::vector<Complex> phases(eig.eigenvalues.size());
  for (size_t i = 0; i < eig.eigenvalues.size(); ++i)
    phases[i] = std::exp(Complex(0.0, t * eig.eigenvalues[i]));
  ComplexMatrix u = herm_apply(eig, phases);  // e^{ita}, unitary
  return u * b * adjoint(u);
}

}  // namespace qtime
