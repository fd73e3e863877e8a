#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qtime/channels.hpp"
#include "qtime/complex_matrix.hpp"
#include "qtime/hermitian_eig.hpp"
#include "qtime/rng.hpp"
#include "qtime/states.hpp"

namespace qtime {

inline constexpr double kPptTolerance = 1e-9;
inline constexpr double kSeparableResidual = 1e-6;   // FW residual certifying separability
inline constexpr double kEntangledGap = 1e-3;        // FW residual expected for entangled states
inline constexpr double kDecomposableResidual = 1e-6;

struct PptReport {
  double min_eigenvalue = 0.0;
  std::vector<double> spectrum;  // of rho^{T_A}, ascending
  bool entangled = false;        // min eigenvalue < -1e-9
  bool decisive = false;         // dA*dB <= 6, where PPT settles separability
};

inline PptReport ppt_test(const BipartiteState& rho) {
  PptReport r;
  r.spectrum = herm_eig(partial_transpose(rho.rho, rho.dA, rho.dB, Factor::A)).eigenvalues;
  r.min_eigenvalue = r.spectrum.front();
  r.entangled = r.min_eigenvalue < -kPptTolerance;
  r.decisive = (rho.dA == 2 && rho.dB == 2) || (rho.dA == 2 && rho.dB == 3) ||
               (rho.dA == 3 && rho.dB == 2);
  return r;
}

namespace detail_fw {

struct Atom {
  std::vector<Complex> u;  // dA
  std::vector<Complex> w;  // dB
};

inline double atom_value(const ComplexMatrix& r, const Atom& at, int dA, int dB) {
  // <u (x) w | R | u (x) w>
  Complex acc = 0.0;
  for (int i = 0; i < dA; ++i)
    for (int k = 0; k < dB; ++k) {
      const Complex left = std::conj(at.u[i]) * std::conj(at.w[k]);
      if (left == Complex(0.0)) continue;
      Complex row = 0.0;
      for (int j = 0; j < dA; ++j)
        for (int l = 0; l < dB; ++l) row += r(i * dB + k, j * dB + l) * at.u[j] * at.w[l];
      acc += left * row;
    }
  return acc.real();
}

inline ComplexMatrix contract_b(const ComplexMatrix& r, const std::vector<Complex>& w, int dA,
                                int dB) {
  ComplexMatrix m(dA, dA);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < dB; ++k) {
        const Complex wk = std::conj(w[k]);
        if (wk == Complex(0.0)) continue;
        for (int l = 0; l < dB; ++l) s += wk * r(i * dB + k, j * dB + l) * w[l];
      }
      m(i, j) = s;
    }
  return m;
}

inline ComplexMatrix contract_a(const ComplexMatrix& r, const std::vector<Complex>& u, int dA,
                                int dB) {
  ComplexMatrix m(dB, dB);
  for (int k = 0; k < dB; ++k)
    for (int l = 0; l < dB; ++l) {
      Complex s = 0.0;
      for (int i = 0; i < dA; ++i) {
        const Complex ui = std::conj(u[i]);
        if (ui == Complex(0.0)) continue;
        for (int j = 0; j < dA; ++j) s += ui * r(i * dB + k, j * dB + l) * u[j];
      }
      m(k, l) = s;
    }
  return m;
}

inline std::vector<Complex> top_eigvec(const ComplexMatrix& herm) {
  const HermEigen eig = herm_eig(hermitize(herm));
  const int n = herm.rows();
  std::vector<Complex> v(n);
  for (int i = 0; i < n; ++i) v[i] = eig.eigenvectors(i, n - 1);
  return v;
}

inline void normalize(std::vector<Complex>& v) {
  double n = 0.0;
  for (const auto& z : v) n += std::norm(z);
  n = std::sqrt(n);
  if (n == 0.0) {
    v[0] = 1.0;
    return;
  }
  for (auto& z : v) z /= n;
}

// Best product state against R by alternating principal-eigenvector updates.
// The first start is the Schmidt projection of R's top eigenvector, the rest
// are Haar random.
inline Atom linear_oracle(const ComplexMatrix& r, int dA, int dB, int inner, int restarts,
                          RngStream& rng, double* best_value) {
  Atom best;
  double best_val = -1e300;
  for (int start = 0; start < restarts; ++start) {
    Atom at;
    at.u.resize(dA);
    at.w.resize(dB);
    if (start == 0) {
      const std::vector<Complex> top = top_eigvec(r);
      ComplexMatrix psi(dA * dB, 1);
      for (int i = 0; i < dA * dB; ++i) psi(i, 0) = top[i];
      double n = frob_norm(psi);
      if (n > 0) psi *= Complex(1.0 / n);
      const SchmidtDecomposition s = schmidt_decompose(psi, dA, dB);
      for (int i = 0; i < dA; ++i) at.u[i] = s.left_vectors(i, 0);
      for (int k = 0; k < dB; ++k) at.w[k] = s.right_vectors(k, 0);
    } else {
      const ComplexMatrix hw = random_haar_vector(rng, dB);
      for (int k = 0; k < dB; ++k) at.w[k] = hw(k, 0);
      const ComplexMatrix mu = contract_b(r, at.w, dA, dB);
      at.u = top_eigvec(mu);
    }
    double prev = -1e300;
    for (int it = 0; it < inner; ++it) {
      at.u = top_eigvec(contract_b(r, at.w, dA, dB));
      at.w = top_eigvec(contract_a(r, at.u, dA, dB));
      const double val = atom_value(r, at, dA, dB);
      if (std::abs(val - prev) <= 1e-14 * std::max(1.0, std::abs(val))) break;
      prev = val;
    }
    const double val = atom_value(r, at, dA, dB);
    if (val > best_val) {
      best_val = val;
      best = at;
    }
  }
  *best_value = best_val;
  return best;
}

inline ComplexMatrix atom_matrix(const Atom& at, int dA, int dB) {
  ComplexMatrix m(dA * dB, dA * dB);
  for (int i = 0; i < dA; ++i)
    for (int k = 0; k < dB; ++k) {
      const Complex left = at.u[i] * at.w[k];
      for (int j = 0; j < dA; ++j)
        for (int l = 0; l < dB; ++l)
          m(i * dB + k, j * dB + l) = left * std::conj(at.u[j] * at.w[l]);
    }
  return m;
}

inline double atom_overlap(const Atom& a, const Atom& b) {
  Complex ou = 0.0, ow = 0.0;
  for (size_t i = 0; i < a.u.size(); ++i) ou += std::conj(b.u[i]) * a.u[i];
  for (size_t k = 0; k < a.w.size(); ++k) ow += std::conj(b.w[k]) * a.w[k];
  return std::norm(ou) * std::norm(ow);
}

// Euclidean projection onto the probability simplex.
inline void project_simplex(std::vector<double>& c) {
  std::vector<double> v = c;
  std::sort(v.begin(), v.end(), std::greater<double>());
  double csum = 0.0, theta = 0.0;
  int rho = 0;
  for (size_t j = 0; j < v.size(); ++j) {
    csum += v[j];
    const double t = (csum - 1.0) / static_cast<double>(j + 1);
    if (v[j] - t > 0.0) {
      rho = static_cast<int>(j + 1);
      theta = t;
    }
  }
  if (rho == 0) theta = (csum - 1.0) / static_cast<double>(v.size());
  for (auto& x : c) x = std::max(x - theta, 0.0);
}

// min over the simplex of (1/2) c^T G c - b . c by projected gradient.
inline void reoptimize_weights(const std::vector<std::vector<double>>& gram,
                               const std::vector<double>& b, std::vector<double>& c,
                               int iterations) {
  const int m = static_cast<int>(c.size());
  double lip = 0.0;
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) row += std::abs(gram[i][j]);
    lip = std::max(lip, row);
  }
  if (lip <= 0.0) return;
  const double step = 1.0 / lip;
  std::vector<double> grad(m);
  for (int it = 0; it < iterations; ++it) {
    for (int i = 0; i < m; ++i) {
      double g = -b[i];
      for (int j = 0; j < m; ++j) g += gram[i][j] * c[j];
      grad[i] = g;
    }
    for (int i = 0; i < m; ++i) c[i] -= step * grad[i];
    project_simplex(c);
  }
}

}  // namespace detail_fw

struct FwResult {
  SeparableDecomposition decomposition;
  double residual = 0.0;
  int iterations = 0;
};

struct FwOptions {
  int inner_iterations = 50;
  int restarts = 5;
  double stop_residual = 1e-9;
  int stall_window = 60;
  int reopt_iterations = 160;
};

// Frank-Wolfe minimization of (1/2)||rho - sigma||_F^2 over the convex hull of
// product pure states, with exact line search and a fully-corrective weight
// re-optimization over the active atoms each iteration. Non-convergence shows
// up as a large residual, never as an error.
inline FwResult fw_separable_search(const BipartiteState& rho, int budget, RngStream& rng,
                                    const FwOptions& opt = FwOptions{}) {
  using namespace detail_fw;
  const int dA = rho.dA, dB = rho.dB, d = dA * dB;

  std::vector<Atom> atoms;
  std::vector<double> weights;
  std::vector<std::vector<double>> gram;
  std::vector<double> overlap_rho;

  ComplexMatrix sigma(d, d);
  double best_residual = 1e300;
  int stall = 0;
  int used = 0;

  for (int t = 0; t < budget; ++t) {
    ++used;
    const ComplexMatrix r = rho.rho - sigma;
    const double residual = frob_norm(r);
    if (residual <= opt.stop_residual) break;
    if (residual < best_residual - 1e-13) {
      best_residual = residual;
      stall = 0;
    } else if (++stall >= opt.stall_window) {
      break;
    }

    double val = 0.0;
    Atom at = linear_oracle(r, dA, dB, opt.inner_iterations, opt.restarts, rng, &val);

    // merge near-duplicate atoms instead of growing the set
    int found = -1;
    for (size_t m = 0; m < atoms.size(); ++m)
      if (atom_overlap(at, atoms[m]) > 1.0 - 1e-12) {
        found = static_cast<int>(m);
        break;
      }
    if (found < 0) {
      atoms.push_back(at);
      const int m = static_cast<int>(atoms.size());
      gram.resize(m);
      for (auto& row : gram) row.resize(m);
      for (int j = 0; j < m; ++j) {
        const double g = atom_overlap(atoms[m - 1], atoms[j]);
        gram[m - 1][j] = g;
        gram[j][m - 1] = g;
      }
      overlap_rho.push_back(atom_value(rho.rho, atoms[m - 1], dA, dB));
      // line-search seed for the new atom
      const ComplexMatrix x = atom_matrix(at, dA, dB);
      const ComplexMatrix dir = x - sigma;
      const double dn = frob_norm(dir);
      double gamma = atoms.size() == 1 ? 1.0 : 0.0;
      if (dn > 0.0 && atoms.size() > 1)
        gamma = std::clamp(hs_inner(r, dir).real() / (dn * dn), 0.0, 1.0);
      for (auto& wgt : weights) wgt *= (1.0 - gamma);
      weights.push_back(gamma);
    }

    reoptimize_weights(gram, overlap_rho, weights, opt.reopt_iterations);

    // drop dead atoms
    for (int m = static_cast<int>(atoms.size()) - 1; m >= 0; --m) {
      if (weights[m] > 1e-14) continue;
      atoms.erase(atoms.begin() + m);
      weights.erase(weights.begin() + m);
      overlap_rho.erase(overlap_rho.begin() + m);
      gram.erase(gram.begin() + m);
      for (auto& row : gram) row.erase(row.begin() + m);
    }

    // rebuild sigma exactly from the atom set
    sigma = ComplexMatrix(d, d);
    for (size_t m = 0; m < atoms.size(); ++m) {
      ComplexMatrix am = atom_matrix(atoms[m], dA, dB);
      am *= Complex(weights[m]);
      sigma += am;
    }
  }

  FwResult out;
  out.iterations = used;
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (atoms.empty() || wsum <= 0.0) {
    // degenerate budget: fall back to a single deterministic atom
    Atom at;
    at.u.assign(dA, 0.0);
    at.w.assign(dB, 0.0);
    at.u[0] = 1.0;
    at.w[0] = 1.0;
    atoms = {at};
    weights = {1.0};
    wsum = 1.0;
  }
  for (size_t m = 0; m < atoms.size(); ++m) {
    out.decomposition.weights.push_back(weights[m] / wsum);
    ComplexMatrix ua(dA, 1), wb(dB, 1);
    for (int i = 0; i < dA; ++i) ua(i, 0) = atoms[m].u[i];
    for (int k = 0; k < dB; ++k) wb(k, 0) = atoms[m].w[k];
    out.decomposition.a_factors.push_back(projector(ua));
    out.decomposition.b_factors.push_back(projector(wb));
  }
  out.residual = frob_norm(rho.rho - out.decomposition.reconstruct());
  out.decomposition.residual = out.residual;
  return out;
}

// Orthogonal rank-one projections spanning the commutative algebra on the
// dilated side of a separability certificate.
struct CommutativeSubalgebra {
  std::vector<ComplexMatrix> projections;
};

struct SeparabilityCertificate {
  SeparableDecomposition decomposition;
  HolevoForm holevo;
  NaimarkDilation naimark;
  CommutativeDilation dilation;
  CommutativeSubalgebra subalgebra;

  double holevo_residual = 0.0;         // Holevo Choi vs decomposition
  double naimark_isometry_defect = 0.0; // ||v~^dagger v~ - 1||
  double naimark_max_defect = 0.0;      // max_k ||v~^dagger pi_k v~ - F_k||
  double image_commutator_max = 0.0;    // over the dilated commutative family
  double hom_residual = 0.0;            // homomorphism defect of Phi on W
  double star_residual = 0.0;           // ||Phi(pi^dagger) - Phi(pi)^dagger||
  double reconstruction_residual = 0.0; // measure-prepare channel rebuild
  double overall_residual = 0.0;        // ||rho - reconstruction of decomposition||
};

namespace detail_cert {

// 1_B (x) |k><k| on H_B (x) C^K
inline ComplexMatrix image_generator(int dB, int outcomes, int k) {
  ComplexMatrix g(dB * outcomes, dB * outcomes);
  for (int b = 0; b < dB; ++b) g(b * outcomes + k, b * outcomes + k) = 1.0;
  return g;
}

}  // namespace detail_cert

// Chains Holevo form -> Naimark dilation -> commutative dilation and verifies
// every stage. The commutative family is checked as a C*-homomorphism on the
// span W of the dilated projections.
inline SeparabilityCertificate build_separability_certificate(
    const BipartiteState& rho, const SeparableDecomposition& dec, RngStream& rng) {
  SeparabilityCertificate cert;
  cert.decomposition = dec;
  cert.overall_residual = frob_norm(rho.rho - dec.reconstruct());
  if (cert.overall_residual > kSeparableResidual)
    throw CertificateError("reconstruction", cert.overall_residual);

  cert.holevo = holevo_from_separable(dec);
  cert.holevo_residual = frob_norm(cert.holevo.choi() - dec.reconstruct());
  if (cert.holevo_residual > 1e-9) throw CertificateError("holevo", cert.holevo_residual);

  cert.naimark = naimark_dilate(cert.holevo.povm);
  cert.naimark_isometry_defect =
      frob_norm(adjoint(cert.naimark.vtilde) * cert.naimark.vtilde -
                ComplexMatrix::identity(cert.naimark.dA));
  for (int k = 0; k < cert.naimark.outcomes; ++k)
    cert.naimark_max_defect = std::max(
        cert.naimark_max_defect, frob_norm(cert.naimark.compress(k) - cert.naimark.povm[k]));
  if (cert.naimark_isometry_defect > 1e-10)
    throw CertificateError("naimark-isometry", cert.naimark_isometry_defect);
  if (cert.naimark_max_defect > 1e-10)
    throw CertificateError("naimark-compression", cert.naimark_max_defect);

  cert.dilation = commutative_dilation(cert.holevo);  // throws above 1e-8
  cert.reconstruction_residual = cert.dilation.reconstruction_residual;

  // Phi on W: Naimark outcome k maps to 1_B (x) |k><k|; all identities are
  // exact on the commutative span.
  const int dB = rho.dB;
  const int outcomes = cert.naimark.outcomes;
  std::vector<ComplexMatrix> images;
  for (int k = 0; k < outcomes; ++k)
    images.push_back(detail_cert::image_generator(dB, outcomes, k));

  for (int j = 0; j < outcomes; ++j) {
    cert.star_residual =
        std::max(cert.star_residual, frob_norm(adjoint(images[j]) - images[j]));
    for (int k = 0; k < outcomes; ++k) {
      cert.image_commutator_max =
          std::max(cert.image_commutator_max, frob_norm(commutator(images[j], images[k])));
      // basis pairs: Phi(pi_j pi_k) = delta_jk Phi(pi_k)
      ComplexMatrix lhs = images[j] * images[k];
      if (j == k) lhs -= images[k];
      cert.hom_residual = std::max(cert.hom_residual, frob_norm(lhs));
    }
  }
  // random elements of W: coefficients tau, sigma; product has coefficients
  // tau*sigma componentwise
  for (int trial = 0; trial < 16; ++trial) {
    std::vector<double> tau(outcomes), sg(outcomes);
    for (int k = 0; k < outcomes; ++k) {
      tau[k] = 2.0 * rng.next_unit() - 1.0;
      sg[k] = 2.0 * rng.next_unit() - 1.0;
    }
    ComplexMatrix fa(dB * outcomes, dB * outcomes), fb(dB * outcomes, dB * outcomes),
        fab(dB * outcomes, dB * outcomes);
    for (int k = 0; k < outcomes; ++k) {
      ComplexMatrix ga = images[k];
      ga *= Complex(tau[k]);
      fa += ga;
      ComplexMatrix gb = images[k];
      gb *= Complex(sg[k]);
      fb += gb;
      ComplexMatrix gab = images[k];
      gab *= Complex(tau[k] * sg[k]);
      fab += gab;
    }
    cert.hom_residual = std::max(cert.hom_residual, frob_norm(fa * fb - fab));
  }
  if (cert.hom_residual > 1e-10) throw CertificateError("homomorphism", cert.hom_residual);
  if (cert.star_residual > 0.0) throw CertificateError("star", cert.star_residual);
  if (cert.image_commutator_max > 1e-12)
    throw CertificateError("image-commutator", cert.image_commutator_max);

  // ancilla basis projectors realize the commutative subalgebra
  for (int k = 0; k < outcomes; ++k) {
    ComplexMatrix p(outcomes, outcomes);
    p(k, k) = 1.0;
    cert.subalgebra.projections.push_back(std::move(p));
  }
  return cert;
}

enum class Verdict { Separable, Entangled, Undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Separable: return "SEPARABLE";
    case Verdict::Entangled: return "ENTANGLED";
    default: return "UNDECIDED";
  }
}

struct SeparabilityResult {
  Verdict verdict = Verdict::Undecided;
  std::string reason;
  PptReport ppt;
  bool pure = false;
  int schmidt_rank = 0;  // only for pure inputs
  double fw_residual = std::numeric_limits<double>::quiet_NaN();
  int fw_iterations = 0;
  std::optional<SeparableDecomposition> decomposition;
  std::optional<SeparabilityCertificate> certificate;
};

// Decision tree: pure states by Schmidt rank, then the PPT test, then the
// Frank-Wolfe oracle. A failed search is never reported as entanglement.
inline SeparabilityResult separability_verdict(const BipartiteState& rho, int budget,
                                               RngStream& rng) {
  SeparabilityResult res;
  res.ppt = ppt_test(rho);

  const HermEigen eig = herm_eig(rho.rho);
  const int d = rho.dim();
  if (d >= 2 && eig.eigenvalues[d - 2] <= 1e-9) {
    res.pure = true;
    ComplexMatrix psi(d, 1);
    for (int i = 0; i < d; ++i) psi(i, 0) = eig.eigenvectors(i, d - 1);
    const SchmidtDecomposition s = schmidt_decompose(psi, rho.dA, rho.dB);
    res.schmidt_rank = s.rank;
    if (s.rank >= 2) {
      res.verdict = Verdict::Entangled;
      res.reason = "schmidt-rank";
      return res;
    }
    SeparableDecomposition dec;
    dec.weights = {1.0};
    ComplexMatrix ua(rho.dA, 1), wb(rho.dB, 1);
    for (int i = 0; i < rho.dA; ++i) ua(i, 0) = s.left_vectors(i, 0);
    for (int k = 0; k < rho.dB; ++k) wb(k, 0) = s.right_vectors(k, 0);
    dec.a_factors = {projector(ua)};
    dec.b_factors = {projector(wb)};
    dec.residual = frob_norm(rho.rho - dec.reconstruct());
    res.verdict = Verdict::Separable;
    res.reason = "schmidt-rank";
    res.fw_residual = dec.residual;
    res.decomposition = dec;
    res.certificate = build_separability_certificate(rho, dec, rng);
    return res;
  }

  if (res.ppt.entangled) {
    res.verdict = Verdict::Entangled;
    res.reason = "ppt";
    return res;
  }

  const FwResult fw = fw_separable_search(rho, budget, rng);
  res.fw_residual = fw.residual;
  res.fw_iterations = fw.iterations;
  res.decomposition = fw.decomposition;

  if (fw.residual <= kSeparableResidual) {
    res.verdict = Verdict::Separable;
    res.reason = "fw-certificate";
    res.certificate = build_separability_certificate(rho, fw.decomposition, rng);
    return res;
  }
  if (res.ppt.decisive) {
    // PPT settles it in these dimensions even when the search fell short
    res.verdict = Verdict::Separable;
    res.reason = "decisive-ppt";
    return res;
  }
  res.verdict = Verdict::Undecided;
  res.reason = "ppt-pass-fw-fail";
  return res;
}

struct DecomposabilityCertificate {
  ComplexMatrix p;  // PSD
  ComplexMatrix q;  // PSD
  double residual = 0.0;  // ||C - P - Q^{T_B}||_F
  int iterations = 0;
  bool feasible = false;
  std::vector<double> residual_history;
};

// Splits a Hermitian Choi matrix as P + Q^{T_B} with P, Q PSD by alternating
// projected minimization. The residual is non-increasing by construction.
inline DecomposabilityCertificate decomposability_test(const Channel& phi, int budget = 2000) {
  const int dA = phi.dA, dB = phi.dB, d = dA * dB;
  const double defect = hermiticity_defect(phi.choi);
  if (defect > 1e-8 * norm_scale(phi.choi))
    throw ValidationError("decomposability_test needs a Hermitian Choi matrix", defect);
  const ComplexMatrix c = hermitize(phi.choi);

  DecomposabilityCertificate cert;
  cert.p = ComplexMatrix(d, d);
  cert.q = ComplexMatrix(d, d);
  double prev = 1e300;
  for (int it = 0; it < budget; ++it) {
    cert.p = psd_project(c - partial_transpose(cert.q, dA, dB, Factor::B));
    cert.q = psd_project(partial_transpose(c - cert.p, dA, dB, Factor::B));
    const double res =
        frob_norm(c - cert.p - partial_transpose(cert.q, dA, dB, Factor::B));
    cert.residual_history.push_back(res);
    cert.iterations = it + 1;
    if (std::abs(prev - res) < 1e-12) {
      prev = res;
      break;
    }
    prev = res;
  }
  cert.residual = cert.residual_history.empty() ? frob_norm(c) : cert.residual_history.back();
  cert.feasible = cert.residual <= kDecomposableResidual;
  return cert;
}

// Closed-form transfer of a decomposability split to the partially transposed
// Choi matrix: (P', Q') = (Q^T, P^T). Global transposition preserves PSD and
// the residual exactly.
inline DecomposabilityCertificate prop2_transfer(const DecomposabilityCertificate& cert,
                                                 const Channel& phi) {
  DecomposabilityCertificate out;
  out.p = transpose(cert.q);
  out.q = transpose(cert.p);
  out.iterations = cert.iterations;
  const ComplexMatrix cta = partial_transpose(phi.choi, phi.dA, phi.dB, Factor::A);
  out.residual =
      frob_norm(cta - out.p - partial_transpose(out.q, phi.dA, phi.dB, Factor::B));
  out.feasible = out.residual <= kDecomposableResidual;
  return out;
}

struct StormerReport {
  double worst_eigenvalue = 0.0;  // most negative output eigenvalue seen
  bool violation_found = false;
  int samples_tested = 0;
  ComplexMatrix witness;  // the x achieving the worst eigenvalue
};

// Randomized falsifier for the block-positivity condition of decomposable
// maps: samples x with both x and its block transpose PSD and looks for a
// negative eigenvalue of (id_n (x) phi)(x). Absence of a violation proves
// nothing; a hit is a witness.
inline StormerReport stormer_falsifier(const Channel& phi, int n, int samples, RngStream& rng) {
  if (n < 1 || n > 3) throw DimensionError("stormer_falsifier supports n <= 3");
  const int dA = phi.dA, dB = phi.dB;

  StormerReport rep;
  rep.worst_eigenvalue = 1e300;
  for (int s = 0; s < samples; ++s) {
    ComplexMatrix x(n * dA, n * dA);
    bool have = false;
    // prefer PPT candidates from the induced ensemble
    for (int attempt = 0; attempt < 8 && !have; ++attempt) {
      const BipartiteState cand = random_induced_state(rng, n, dA, n * dA);
      const double pt_min =
          min_eigenvalue(partial_transpose(cand.rho, n, dA, Factor::A));
      if (pt_min >= -1e-12) {
        x = cand.rho;
        have = true;
      }
    }
    if (!have) {
      // separable candidate: block transpose PSD by construction
      for (int term = 0; term < 3; ++term) {
        ComplexMatrix a = random_density(rng, n);
        const ComplexMatrix b = random_density(rng, dA);
        a *= Complex(1.0 / 3.0);
        x += kron(a, b);
      }
    }

    // y = (id_n (x) phi)(x): block (i,j) of y is phi(block_ij(x))
    ComplexMatrix y(n * dB, n * dB);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const ComplexMatrix img = phi.apply(block(x, n, dA, i, j));
        for (int k = 0; k < dB; ++k)
          for (int l = 0; l < dB; ++l) y(i * dB + k, j * dB + l) = img(k, l);
      }
    const double mineig = min_eigenvalue(hermitize(y));
    ++rep.samples_tested;
    if (mineig < rep.worst_eigenvalue) {
      rep.worst_eigenvalue = mineig;
      rep.witness = x;
    }
  }
  rep.violation_found = rep.worst_eigenvalue < -1e-6;
  return rep;
}

}  // namespace qtime
