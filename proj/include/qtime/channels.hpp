#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "qtime/complex_matrix.hpp"
#include "qtime/hermitian_eig.hpp"
#include "qtime/states.hpp"

namespace qtime {

// A linear map A -> B stored as its Choi block matrix: block (i,j) of choi is
// the image of the matrix unit E_ij. Completely positive iff choi is PSD.
struct Channel {
  int dA = 0;
  int dB = 0;
  ComplexMatrix choi;  // (dA*dB) x (dA*dB), Hermitian

  ComplexMatrix on_unit(int i, int j) const { return block(choi, dA, dB, i, j); }

  ComplexMatrix apply(const ComplexMatrix& a) const {
    if (!a.square() || a.rows() != dA) throw DimensionError("channel argument must be dA x dA");
    ComplexMatrix out(dB, dB);
    for (int i = 0; i < dA; ++i)
      for (int j = 0; j < dA; ++j) {
        const Complex aij = a(i, j);
        if (aij == Complex(0.0)) continue;
        for (int k = 0; k < dB; ++k)
          for (int l = 0; l < dB; ++l) out(k, l) += aij * choi(i * dB + k, j * dB + l);
      }
    return out;
  }
};

inline bool is_completely_positive(const Channel& phi) {
  return min_eigenvalue(hermitize(phi.choi)) >= -1e-9;
}

// The channel of a bipartite state: block (i,j) of rho is the image of E_ij,
// so the Choi matrix IS rho (exact copy, both directions of the duality are
// block identities).
inline Channel channel_from_state(const BipartiteState& rho) {
  return Channel{rho.dA, rho.dB, rho.rho};
}

struct ChoiAssembly {
  ComplexMatrix unnormalized;
  double trace_value = 0.0;
  ComplexMatrix normalized;
};

// Assembles sum_ij E_ij (x) phi(E_ij) from the map's values on matrix units.
inline ChoiAssembly state_from_channel(
    int dA, int dB, const std::function<ComplexMatrix(int, int)>& phi_on_unit) {
  ComplexMatrix choi(dA * dB, dA * dB);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j) {
      const ComplexMatrix img = phi_on_unit(i, j);
      if (!img.square() || img.rows() != dB)
        throw DimensionError("state_from_channel: image has wrong dimension");
      for (int k = 0; k < dB; ++k)
        for (int l = 0; l < dB; ++l) choi(i * dB + k, j * dB + l) = img(k, l);
    }
  ChoiAssembly out;
  out.unnormalized = choi;
  out.trace_value = trace(choi).real();
  if (std::abs(trace(choi)) <= 1e-12)
    throw ValidationError("state_from_channel: zero-trace assembly", std::abs(trace(choi)));
  out.normalized = choi;
  out.normalized *= Complex(1.0 / out.trace_value);
  return out;
}

inline ChoiAssembly state_from_channel(const Channel& phi) {
  return state_from_channel(phi.dA, phi.dB,
                            [&](int i, int j) { return phi.on_unit(i, j); });
}

// Adjoint of the image: the Choi matrix picks up a partial transpose on A, and
// the action on matrix units is E_ij -> phi(E_ij)^dagger.
inline Channel adjoint_channel(const Channel& phi) {
  return Channel{phi.dA, phi.dB, partial_transpose(phi.choi, phi.dA, phi.dB, Factor::A)};
}

struct KrausSet {
  int dA = 0;
  int dB = 0;
  std::vector<ComplexMatrix> operators;  // each dB x dA

  ComplexMatrix apply(const ComplexMatrix& a) const {
    ComplexMatrix out(dB, dB);
    for (const auto& k : operators) out += k * a * adjoint(k);
    return out;
  }
};

// Choi -> Kraus by the eigenvector construction; eigenvalues below 1e-10 are
// dropped. Requires a PSD Choi matrix (completely positive channel).
inline KrausSet kraus_from_choi(const Channel& phi) {
  HermEigen eig = herm_eig(hermitize(phi.choi));
  if (eig.eigenvalues.front() < -1e-9)
    throw ValidationError("kraus_from_choi: channel is not completely positive",
                          eig.eigenvalues.front());
  KrausSet ks;
  ks.dA = phi.dA;
  ks.dB = phi.dB;
  const int n = phi.dA * phi.dB;
  for (int m = n - 1; m >= 0; --m) {
    if (eig.eigenvalues[m] <= 1e-10) break;
    const double root = std::sqrt(eig.eigenvalues[m]);
    ComplexMatrix k(phi.dB, phi.dA);
    for (int i = 0; i < phi.dA; ++i)
      for (int b = 0; b < phi.dB; ++b) k(b, i) = root * eig.eigenvectors(i * phi.dB + b, m);
    ks.operators.push_back(std::move(k));
  }
  return ks;
}

// Stinespring triple (v, Phi, K) with K = C^r (x) C^dA and Phi(a) = 1_r (x) a;
// the channel is recovered as a |-> v^dagger (1_r (x) a) v.
struct StinespringDilation {
  int dA = 0;
  int dB = 0;
  int rank = 0;        // r
  ComplexMatrix v;     // (r*dA) x dB

  int dilation_dim() const { return rank * dA; }

  ComplexMatrix represent(const ComplexMatrix& a) const {
    return kron(ComplexMatrix::identity(rank), a);
  }

  ComplexMatrix compress(const ComplexMatrix& a) const {
    return adjoint(v) * (represent(a) * v);
  }
};

inline StinespringDilation stinespring_from_kraus(const KrausSet& ks) {
  if (ks.operators.empty()) throw DimensionError("stinespring_from_kraus: empty Kraus set");
  const int r = static_cast<int>(ks.operators.size());
  StinespringDilation d;
  d.dA = ks.dA;
  d.dB = ks.dB;
  d.rank = r;
  d.v = ComplexMatrix(r * ks.dA, ks.dB);
  // row block m of v is K_m^dagger, so v^dagger (1 (x) a) v = sum_m K_m a K_m^dagger
  for (int m = 0; m < r; ++m)
    for (int al = 0; al < ks.dA; ++al)
      for (int b = 0; b < ks.dB; ++b) d.v(m * ks.dA + al, b) = std::conj(ks.operators[m](b, al));
  return d;
}

struct DilationRelation {
  ComplexMatrix w;       // partial isometry K1 -> K2
  double residual = 0.0; // max_F ||W Phi1(E_ij) v1 - Phi2(E_ij) v2||
};

// The partial isometry W with W Phi1(a) v1 = Phi2(a) v2, found by matching the
// two column families through their (shared) Gram matrix.
inline DilationRelation dilation_unitary_relation(const StinespringDilation& d1,
                                                  const StinespringDilation& d2) {
  if (d1.dA != d2.dA || d1.dB != d2.dB)
    throw DimensionError("dilation_unitary_relation: dimension mismatch");
  const int dA = d1.dA, dB = d1.dB;

  double channel_diff = 0.0;
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j)
      channel_diff = std::max(
          channel_diff, frob_norm(d1.compress(ComplexMatrix::unit(dA, i, j)) -
                                  d2.compress(ComplexMatrix::unit(dA, i, j))));
  if (channel_diff > 1e-8)
    throw NotSameChannelError("dilations do not dilate the same channel (diff " +
                              std::to_string(channel_diff) + ")");

  // column family: Phi(E_ij) v e_beta for all (i, j, beta)
  const int ncols = dA * dA * dB;
  auto columns = [&](const StinespringDilation& d) {
    ComplexMatrix m(d.dilation_dim(), ncols);
    int col = 0;
    for (int i = 0; i < dA; ++i)
      for (int j = 0; j < dA; ++j) {
        const ComplexMatrix pv = d.represent(ComplexMatrix::unit(dA, i, j)) * d.v;
        for (int b = 0; b < dB; ++b, ++col)
          for (int r = 0; r < d.dilation_dim(); ++r) m(r, col) = pv(r, b);
      }
    return m;
  };
  const ComplexMatrix m1 = columns(d1);
  const ComplexMatrix m2 = columns(d2);

  const ComplexMatrix gram = hermitize(adjoint(m1) * m1);
  HermEigen eig = herm_eig(gram);
  const double gtol = 1e-10 * norm_scale(gram);

  DilationRelation rel;
  rel.w = ComplexMatrix(d2.dilation_dim(), d1.dilation_dim());
  for (int idx = ncols - 1; idx >= 0; --idx) {
    const double mu = eig.eigenvalues[idx];
    if (mu <= gtol) break;
    const double inv = 1.0 / std::sqrt(mu);
    // q1 = M1 g / sqrt(mu), q2 = M2 g / sqrt(mu); W += q2 q1^dagger
    std::vector<Complex> q1(d1.dilation_dim(), 0.0), q2(d2.dilation_dim(), 0.0);
    for (int c = 0; c < ncols; ++c) {
      const Complex g = eig.eigenvectors(c, idx);
      if (g == Complex(0.0)) continue;
      for (int r = 0; r < d1.dilation_dim(); ++r) q1[r] += m1(r, c) * g;
      for (int r = 0; r < d2.dilation_dim(); ++r) q2[r] += m2(r, c) * g;
    }
    for (int r2 = 0; r2 < d2.dilation_dim(); ++r2)
      for (int r1 = 0; r1 < d1.dilation_dim(); ++r1)
        rel.w(r2, r1) += (q2[r2] * inv) * std::conj(q1[r1] * inv);
  }

  const ComplexMatrix mapped = rel.w * m1;
  double res = 0.0;
  for (int c = 0; c < ncols; ++c) {
    double s = 0.0;
    for (int r = 0; r < d2.dilation_dim(); ++r) s += std::norm(mapped(r, c) - m2(r, c));
    res = std::max(res, std::sqrt(s));
  }
  // per-unit residual: columns of one unit are contiguous dB-sized groups
  double unit_res = 0.0;
  for (int u = 0; u < dA * dA; ++u) {
    double s = 0.0;
    for (int c = u * dB; c < (u + 1) * dB; ++c)
      for (int r = 0; r < d2.dilation_dim(); ++r) s += std::norm(mapped(r, c) - m2(r, c));
    unit_res = std::max(unit_res, std::sqrt(s));
  }
  rel.residual = std::max(res, unit_res);
  return rel;
}

// Measure-prepare (Holevo) form: phi(a) = sum_k E_k tr[F_k a], with F_k PSD
// carrying the weights (tr F_k = w_k) and E_k unit-trace states. The factors
// X_k satisfy X_k^dagger X_k = w_k E_k.
struct HolevoForm {
  int dA = 0;
  int dB = 0;
  std::vector<ComplexMatrix> povm;     // F_k, dA x dA, PSD, sum <= 1
  std::vector<ComplexMatrix> states;   // E_k, dB x dB, unit trace
  std::vector<double> weights;         // w_k = tr F_k
  std::vector<ComplexMatrix> factors;  // X_k

  int terms() const { return static_cast<int>(povm.size()); }

  ComplexMatrix choi() const {
    ComplexMatrix acc = kron(transpose(povm[0]), states[0]);
    for (size_t k = 1; k < povm.size(); ++k) acc += kron(transpose(povm[k]), states[k]);
    return acc;
  }

  ComplexMatrix apply(const ComplexMatrix& a) const {
    ComplexMatrix out(dB, dB);
    for (size_t k = 0; k < povm.size(); ++k) {
      const Complex c = trace(povm[k] * a);
      ComplexMatrix term = states[k];
      term *= c;
      out += term;
    }
    return out;
  }
};

// Separable decomposition -> Holevo form: F_k = p_k a_k^T, E_k = b_k. The
// Choi matrix of the result reproduces the decomposition's state exactly.
inline HolevoForm holevo_from_separable(const SeparableDecomposition& dec) {
  if (dec.weights.empty()) throw DimensionError("holevo_from_separable: empty decomposition");
  if (dec.residual > 1e-6)
    throw ValidationError("holevo_from_separable: decomposition residual too large",
                          dec.residual);
  HolevoForm h;
  h.dA = dec.a_factors[0].rows();
  h.dB = dec.b_factors[0].rows();
  for (size_t k = 0; k < dec.weights.size(); ++k) {
    ComplexMatrix f = transpose(dec.a_factors[k]);
    f *= Complex(dec.weights[k]);
    h.povm.push_back(std::move(f));
    h.states.push_back(dec.b_factors[k]);
    h.weights.push_back(dec.weights[k]);
    ComplexMatrix x = herm_sqrt(dec.b_factors[k]);
    x *= Complex(std::sqrt(dec.weights[k]));
    h.factors.push_back(std::move(x));
  }
  return h;
}

// Naimark dilation of a POVM: vtilde maps C^dA into C^dA (x) C^K by
// psi |-> sum_k (sqrt(F_k) psi) (x) |k>, and pi_k = 1 (x) |k><k|. If the
// input sums to less than 1, the complement is prepended as outcome 0.
struct NaimarkDilation {
  int dA = 0;
  int outcomes = 0;            // K, after any padding
  bool padded = false;
  ComplexMatrix vtilde;        // (dA*K) x dA
  std::vector<ComplexMatrix> povm;  // the dilated family, pad included

  ComplexMatrix projection(int k) const {
    ComplexMatrix pk(dA * outcomes, dA * outcomes);
    for (int al = 0; al < dA; ++al) pk(al * outcomes + k, al * outcomes + k) = 1.0;
    return pk;
  }

  ComplexMatrix compress(int k) const {
    // vtilde^dagger pi_k vtilde = sqrt(F_k)^2
    ComplexMatrix out(dA, dA);
    for (int a = 0; a < dA; ++a)
      for (int b = 0; b < dA; ++b) {
        Complex s = 0.0;
        for (int al = 0; al < dA; ++al)
          s += std::conj(vtilde(al * outcomes + k, a)) * vtilde(al * outcomes + k, b);
        out(a, b) = s;
      }
    return out;
  }
};

inline NaimarkDilation naimark_dilate(const std::vector<ComplexMatrix>& povm_in) {
  if (povm_in.empty()) throw PovmError("naimark_dilate: empty POVM");
  const int dA = povm_in[0].rows();
  ComplexMatrix sum(dA, dA);
  for (const auto& f : povm_in) {
    if (!f.square() || f.rows() != dA) throw PovmError("naimark_dilate: mixed dimensions");
    const double mineig = min_eigenvalue(hermitize(f));
    if (mineig < -1e-10)
      throw PovmError("naimark_dilate: element not PSD (min eigenvalue " +
                      std::to_string(mineig) + ")");
    sum += f;
  }

  std::vector<ComplexMatrix> povm;
  ComplexMatrix complement = ComplexMatrix::identity(dA) - sum;
  const double missing = frob_norm(complement);
  bool padded = false;
  if (missing > 1e-10) {
    const double mineig = min_eigenvalue(hermitize(complement));
    if (mineig < -1e-9)
      throw PovmError("naimark_dilate: POVM exceeds identity (completion min eigenvalue " +
                      std::to_string(mineig) + ")");
    povm.push_back(hermitize(complement));
    padded = true;
  }
  for (const auto& f : povm_in) povm.push_back(f);

  const int outcomes = static_cast<int>(povm.size());
  NaimarkDilation d;
  d.dA = dA;
  d.outcomes = outcomes;
  d.padded = padded;
  d.povm = povm;
  d.vtilde = ComplexMatrix(dA * outcomes, dA);
  for (int k = 0; k < outcomes; ++k) {
    const ComplexMatrix root = herm_sqrt(hermitize(povm[k]));
    for (int al = 0; al < dA; ++al)
      for (int b = 0; b < dA; ++b) d.vtilde(al * outcomes + k, b) = root(al, b);
  }
  return d;
}

// Dilation through a commutative algebra: v = sum_k X_k (x) |k> maps H_B into
// H_B (x) C^K, and the image generators 1_B (x) |k><k| commute exactly. The
// certificate records the measure-prepare reconstruction residual.
struct CommutativeDilation {
  int dA = 0;
  int dB = 0;
  int outcomes = 0;
  ComplexMatrix v;  // (dB*K) x dB

  double image_commutator_max = 0.0;    // exact 0 by construction, recorded anyway
  double projector_orthogonality = 0.0; // max ||pi_j pi_k - delta_jk pi_k||
  double reconstruction_residual = 0.0; // max_ij ||phi(E_ij) - sum_k (v* pi_k v) tr[F_k E_ij]/w_k||

  ComplexMatrix image_generator(int k) const {
    ComplexMatrix g(dB * outcomes, dB * outcomes);
    for (int b = 0; b < dB; ++b) g(b * outcomes + k, b * outcomes + k) = 1.0;
    return g;
  }

  ComplexMatrix compress_generator(int k) const {
    // v^dagger (1_B (x) |k><k|) v = X_k^dagger X_k
    ComplexMatrix out(dB, dB);
    for (int a = 0; a < dB; ++a)
      for (int b = 0; b < dB; ++b) {
        Complex s = 0.0;
        for (int c = 0; c < dB; ++c)
          s += std::conj(v(c * outcomes + k, a)) * v(c * outcomes + k, b);
        out(a, b) = s;
      }
    return out;
  }
};

inline CommutativeDilation commutative_dilation(const HolevoForm& h) {
  CommutativeDilation d;
  d.dA = h.dA;
  d.dB = h.dB;
  d.outcomes = h.terms();
  d.v = ComplexMatrix(h.dB * d.outcomes, h.dB);
  for (int k = 0; k < d.outcomes; ++k)
    for (int a = 0; a < h.dB; ++a)
      for (int b = 0; b < h.dB; ++b) d.v(a * d.outcomes + k, b) = h.factors[k](a, b);

  for (int j = 0; j < d.outcomes; ++j)
    for (int k = 0; k < d.outcomes; ++k) {
      const ComplexMatrix gj = d.image_generator(j);
      const ComplexMatrix gk = d.image_generator(k);
      d.image_commutator_max = std::max(d.image_commutator_max, frob_norm(commutator(gj, gk)));
      ComplexMatrix prod = gj * gk;
      if (j == k) prod -= gk;
      d.projector_orthogonality = std::max(d.projector_orthogonality, frob_norm(prod));
    }

  double res = 0.0;
  for (int i = 0; i < h.dA; ++i)
    for (int j = 0; j < h.dA; ++j) {
      const ComplexMatrix unit = ComplexMatrix::unit(h.dA, i, j);
      const ComplexMatrix target = h.apply(unit);
      ComplexMatrix rebuilt(h.dB, h.dB);
      for (int k = 0; k < d.outcomes; ++k) {
        if (h.weights[k] <= 0.0) continue;
        ComplexMatrix term = d.compress_generator(k);
        term *= trace(h.povm[k] * unit) / h.weights[k];
        rebuilt += term;
      }
      res = std::max(res, frob_norm(target - rebuilt));
    }
  d.reconstruction_residual = res;
  if (res > 1e-8) throw CertificateError("commutative-dilation reconstruction", res);
  return d;
}

}  // namespace qtime
