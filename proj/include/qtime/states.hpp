#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qtime/complex_matrix.hpp"
#include "qtime/hermitian_eig.hpp"
#include "qtime/rng.hpp"

namespace qtime {

// Density matrix on a tensor product space with recorded factor dimensions.
struct BipartiteState {
  int dA = 0;
  int dB = 0;
  ComplexMatrix rho;

  int dim() const { return dA * dB; }
};

// Validates Hermiticity (1e-10), unit trace (1e-10) and positivity (min
// eigenvalue >= -1e-9); throws ValidationError carrying the measured defect.
inline BipartiteState make_bipartite(const ComplexMatrix& m, int dA, int dB) {
  detail::require_bipartite(m, dA, dB);
  if (!m.all_finite()) throw ValidationError("state has non-finite entries", 0.0);
  const double herm = hermiticity_defect(m);
  if (herm > 1e-10 * norm_scale(m))
    throw ValidationError("state is not Hermitian", herm);
  const double tr_defect = std::abs(trace(m) - Complex(1.0));
  if (tr_defect > 1e-10) throw ValidationError("state trace is not 1", tr_defect);
  const double min_eig = min_eigenvalue(hermitize(m));
  if (min_eig < -1e-9) throw ValidationError("state is not positive semidefinite", min_eig);
  return BipartiteState{dA, dB, hermitize(m)};
}

struct SchmidtDecomposition {
  std::vector<double> coefficients;  // descending, >= 0
  ComplexMatrix left_vectors;        // dA x r columns, orthonormal
  ComplexMatrix right_vectors;       // dB x r columns, orthonormal
  int rank = 0;                      // count of coefficients > 1e-10
};

namespace detail {

// Extends the first `have` orthonormal columns of v (d x count) to a full
// orthonormal set by Gram-Schmidt over the standard basis.
inline void complete_orthonormal(ComplexMatrix& v, int have) {
  const int d = v.rows();
  const int want = v.cols();
  int next = have;
  for (int e = 0; e < d && next < want; ++e) {
    // candidate = basis vector e, orthogonalized against existing columns
    std::vector<Complex> cand(d, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < next; ++j) {
        Complex ov = 0.0;
        for (int i = 0; i < d; ++i) ov += std::conj(v(i, j)) * cand[i];
        for (int i = 0; i < d; ++i) cand[i] -= ov * v(i, j);
      }
    }
    double n = 0.0;
    for (const auto& z : cand) n += std::norm(z);
    n = std::sqrt(n);
    if (n < 1e-6) continue;
    for (int i = 0; i < d; ++i) v(i, next) = cand[i] / n;
    ++next;
  }
}

}  // namespace detail

// Schmidt decomposition of a unit vector on dA*dB, via the eigensystem of the
// dA x dA reduced matrix. Coefficients descending; rank counts those > 1e-10.
inline SchmidtDecomposition schmidt_decompose(const ComplexMatrix& psi, int dA, int dB) {
  if (psi.cols() != 1 || psi.rows() != dA * dB)
    throw DimensionError("schmidt_decompose needs a dA*dB column vector");
  const double norm_defect = std::abs(frob_norm(psi) - 1.0);
  if (norm_defect > 1e-10)
    throw ValidationError("schmidt_decompose input is not a unit vector", norm_defect);

  // coefficient matrix C[i][k] = psi[i*dB + k]; reduced matrix M = C C^dagger
  ComplexMatrix c(dA, dB);
  for (int i = 0; i < dA; ++i)
    for (int k = 0; k < dB; ++k) c(i, k) = psi(i * dB + k, 0);
  const ComplexMatrix reduced = c * adjoint(c);
  HermEigen eig = herm_eig(reduced);

  const int r = std::min(dA, dB);
  SchmidtDecomposition out;
  out.coefficients.resize(r);
  out.left_vectors = ComplexMatrix(dA, r);
  out.right_vectors = ComplexMatrix(dB, r);
  // take the top r eigenvalues; eigensolver output is ascending
  int filled = 0;
  for (int j = 0; j < r; ++j) {
    const int src = dA - 1 - j;
    const double alpha = std::sqrt(std::max(eig.eigenvalues[src], 0.0));
    out.coefficients[j] = alpha;
    for (int i = 0; i < dA; ++i) out.left_vectors(i, j) = eig.eigenvectors(i, src);
    if (alpha > 1e-10) {
      // right vector = C^dagger u / alpha
      for (int k = 0; k < dB; ++k) {
        Complex s = 0.0;
        for (int i = 0; i < dA; ++i) s += std::conj(c(i, k)) * eig.eigenvectors(i, src);
        out.right_vectors(k, j) = std::conj(s) / alpha;
      }
      filled = j + 1;
      ++out.rank;
    }
  }
  detail::complete_orthonormal(out.right_vectors, filled);
  return out;
}

// Predicted spectrum of the partially transposed pure-state projector:
// {alpha_i^2} plus {+-alpha_i*alpha_j : i < j}, over nonzero coefficients.
inline std::vector<double> pure_ppt_spectrum(const SchmidtDecomposition& schmidt) {
  std::vector<double> alphas;
  for (double a : schmidt.coefficients)
    if (a > 1e-10) alphas.push_back(a);
  std::vector<double> spec;
  for (double a : alphas) spec.push_back(a * a);
  for (size_t i = 0; i < alphas.size(); ++i)
    for (size_t j = i + 1; j < alphas.size(); ++j) {
      spec.push_back(alphas[i] * alphas[j]);
      spec.push_back(-alphas[i] * alphas[j]);
    }
  std::sort(spec.begin(), spec.end());
  return spec;
}

// Purification on d*d: |psi> = sum_i sqrt(lambda_i) |v_i> (x) |i>, so tracing
// out the second factor recovers the input.
inline ComplexMatrix purify(const ComplexMatrix& rho) {
  if (!rho.square()) throw DimensionError("purify needs a square matrix");
  const int d = rho.rows();
  const double herm = hermiticity_defect(rho);
  if (herm > 1e-10 * norm_scale(rho))
    throw ValidationError("purify input is not Hermitian", herm);
  const double tr_defect = std::abs(trace(rho) - Complex(1.0));
  if (tr_defect > 1e-10) throw ValidationError("purify input trace is not 1", tr_defect);
  HermEigen eig = herm_eig(hermitize(rho));
  if (eig.eigenvalues.front() < -1e-9)
    throw ValidationError("purify input is not positive semidefinite",
                          eig.eigenvalues.front());
  ComplexMatrix psi(d * d, 1);
  for (int i = 0; i < d; ++i) {
    const int src = d - 1 - i;  // largest eigenvalue on ancilla index 0
    const double root = std::sqrt(std::max(eig.eigenvalues[src], 0.0));
    for (int a = 0; a < d; ++a) psi(a * d + i, 0) = root * eig.eigenvectors(a, src);
  }
  return psi;
}

// Outer product |psi><psi|.
inline ComplexMatrix projector(const ComplexMatrix& psi) {
  if (psi.cols() != 1) throw DimensionError("projector needs a column vector");
  const int d = psi.rows();
  ComplexMatrix p(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) p(i, j) = psi(i, 0) * std::conj(psi(j, 0));
  return p;
}

// p |psi^-><psi^-| + (1-p) I/4 with the singlet |psi^-> = (|01> - |10>)/sqrt2.
inline BipartiteState werner_state(int d, double p) {
  if (d != 2) throw DimensionError("werner_state supports d = 2 only");
  if (p < 0.0 || p > 1.0) throw ValidationError("werner parameter out of [0,1]", p);
  ComplexMatrix singlet(4, 1);
  singlet(1, 0) = 1.0 / std::sqrt(2.0);
  singlet(2, 0) = -1.0 / std::sqrt(2.0);
  ComplexMatrix rho = projector(singlet);
  rho *= Complex(p);
  for (int i = 0; i < 4; ++i) rho(i, i) += (1.0 - p) / 4.0;
  return make_bipartite(rho, 2, 2);
}

// p |Phi><Phi| + (1-p) I/d^2 with |Phi> = sum_i |ii>/sqrt(d).
inline BipartiteState isotropic_state(int d, double p) {
  if (d < 2) throw DimensionError("isotropic_state needs d >= 2");
  if (p < 0.0 || p > 1.0) throw ValidationError("isotropic parameter out of [0,1]", p);
  ComplexMatrix phi(d * d, 1);
  for (int i = 0; i < d; ++i) phi(i * d + i, 0) = 1.0 / std::sqrt(static_cast<double>(d));
  ComplexMatrix rho = projector(phi);
  rho *= Complex(p);
  for (int i = 0; i < d * d; ++i) rho(i, i) += (1.0 - p) / (d * d);
  return make_bipartite(rho, d, d);
}

// Partial trace of a Haar-random pure state on dA*dB*k over the k-dimensional
// environment; k = 1 gives a Haar-random pure bipartite state.
inline BipartiteState random_induced_state(RngStream& rng, int dA, int dB, int k) {
  if (k < 1) throw DimensionError("random_induced_state needs k >= 1");
  const ComplexMatrix psi = random_haar_vector(rng, dA * dB * k);
  // reshape to (dA*dB) x k and contract the environment
  const int d = dA * dB;
  ComplexMatrix rho(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Complex s = 0.0;
      for (int e = 0; e < k; ++e) s += psi(i * k + e, 0) * std::conj(psi(j * k + e, 0));
      rho(i, j) = s;
    }
  return make_bipartite(rho, dA, dB);
}

// Random density matrix on d from the induced (Hilbert-Schmidt, k = d) ensemble.
inline ComplexMatrix random_density(RngStream& rng, int d) {
  const ComplexMatrix g = random_ginibre(rng, d, d);
  ComplexMatrix rho = g * adjoint(g);
  rho *= Complex(1.0 / trace(rho).real());
  return hermitize(rho);
}

// Convex combination sum_k p_k a_k (x) b_k of product density matrices.
struct SeparableDecomposition {
  std::vector<double> weights;
  std::vector<ComplexMatrix> a_factors;  // density matrices on dA
  std::vector<ComplexMatrix> b_factors;  // density matrices on dB
  double residual = 0.0;                 // ||target - reconstruction||_F when known

  ComplexMatrix reconstruct() const {
    ComplexMatrix acc = kron(a_factors[0], b_factors[0]);
    acc *= Complex(weights[0]);
    for (size_t k = 1; k < weights.size(); ++k) {
      ComplexMatrix term = kron(a_factors[k], b_factors[k]);
      term *= Complex(weights[k]);
      acc += term;
    }
    return acc;
  }
};

struct RandomSeparableResult {
  BipartiteState state;
  SeparableDecomposition decomposition;
};

// m-term separable state with Dirichlet(1,...,1) weights and factors from the
// Hilbert-Schmidt ensemble; the decomposition is retained.
inline RandomSeparableResult random_separable(RngStream& rng, int dA, int dB, int m) {
  if (m < 1) throw DimensionError("random_separable needs m >= 1");
  SeparableDecomposition dec;
  dec.weights.resize(m);
  double total = 0.0;
  for (int k = 0; k < m; ++k) {
    dec.weights[k] = -std::log(rng.next_unit());
    total += dec.weights[k];
  }
  for (int k = 0; k < m; ++k) dec.weights[k] /= total;
  for (int k = 0; k < m; ++k) {
    dec.a_factors.push_back(random_density(rng, dA));
    dec.b_factors.push_back(random_density(rng, dB));
  }
  ComplexMatrix rho = dec.reconstruct();
  dec.residual = 0.0;
  return RandomSeparableResult{make_bipartite(rho, dA, dB), std::move(dec)};
}

// The 3x3 bound-entangled state from the five-member "tiles" unextendible
// product basis: rho = (I9 - sum_k |w_k><w_k|)/4. PPT but entangled.
inline BipartiteState tiles_upb_state() {
  const double s = 1.0 / std::sqrt(2.0);
  const double t = 1.0 / std::sqrt(3.0);
  auto ket = [](int d, std::vector<double> v) {
    ComplexMatrix m(d, 1);
    for (int i = 0; i < d; ++i) m(i, 0) = v[i];
    return m;
  };
  const ComplexMatrix e0 = ket(3, {1, 0, 0});
  const ComplexMatrix e1 = ket(3, {0, 1, 0});
  const ComplexMatrix e2 = ket(3, {0, 0, 1});
  const ComplexMatrix m01 = ket(3, {s, -s, 0});
  const ComplexMatrix m12 = ket(3, {0, s, -s});
  const ComplexMatrix plus = ket(3, {t, t, t});

  std::vector<ComplexMatrix> tiles;
  tiles.push_back(kron(e0, m01));
  tiles.push_back(kron(e2, m12));
  tiles.push_back(kron(m01, e2));
  tiles.push_back(kron(m12, e0));
  tiles.push_back(kron(plus, plus));

  ComplexMatrix rho = ComplexMatrix::identity(9);
  for (const auto& w : tiles) rho -= projector(w);
  rho *= Complex(0.25);
  return make_bipartite(rho, 3, 3);
}

}  // namespace qtime
