#include <catch2/catch_amalgamated.hpp>

#include "qtime/channels.hpp"
#include "test_helpers.hpp"

using namespace qtime;
using namespace qtest;

namespace {

BipartiteState random_state(RngStream& rng, int dA, int dB) {
  return random_induced_state(rng, dA, dB, dA * dB);
}

}  // namespace

TEST_CASE("channel_from_state acts by block extraction", "[channels]") {
  RngStream rng(1);
  const ComplexMatrix sigma = random_density(rng, 2);
  const ComplexMatrix tau = random_density(rng, 3);
  const BipartiteState prod = make_bipartite(kron(sigma, tau), 2, 3);
  const Channel phi = channel_from_state(prod);

  // on the identity, the channel returns the reduced state on B
  CHECK(frob_norm(phi.apply(ComplexMatrix::identity(2)) - tau) < 1e-12);

  // Bell state: phi(E00) = E00/2, an exact copy of block (0,0)
  const BipartiteState bell = make_bipartite(bell_projector(), 2, 2);
  const Channel phib = channel_from_state(bell);
  ComplexMatrix half_e00(2, 2);
  half_e00(0, 0) = 0.5;
  CHECK(max_abs_diff(phib.apply(ComplexMatrix::unit(2, 0, 0)), half_e00) < 1e-15);
  CHECK(max_abs_diff(phib.on_unit(0, 0), block(bell.rho, 2, 2, 0, 0)) == 0.0);

  // round trip is an exact copy
  const ChoiAssembly back = state_from_channel(phib);
  CHECK(max_abs_diff(back.unnormalized, bell.rho) == 0.0);
}

TEST_CASE("state_from_channel assembles the Choi matrix", "[channels]") {
  // identity map on d=3 gives d |Phi><Phi| unnormalized
  const ChoiAssembly ida = state_from_channel(
      3, 3, [](int i, int j) { return ComplexMatrix::unit(3, i, j); });
  ComplexMatrix phi3(9, 1);
  for (int i = 0; i < 3; ++i) phi3(i * 3 + i, 0) = 1.0 / std::sqrt(3.0);
  ComplexMatrix want = projector(phi3);
  want *= Complex(3.0);
  CHECK(max_abs_diff(ida.unnormalized, want) < 1e-14);
  CHECK(std::abs(ida.trace_value - 3.0) < 1e-14);

  // trace map a -> tr[a] I/dB assembles to I/dB
  const int dA = 2, dB = 2;
  const ChoiAssembly tr = state_from_channel(dA, dB, [&](int i, int j) {
    ComplexMatrix out(dB, dB);
    if (i == j)
      for (int k = 0; k < dB; ++k) out(k, k) = 1.0 / dB;
    return out;
  });
  ComplexMatrix half_i4 = ComplexMatrix::identity(4);
  half_i4 *= Complex(0.5);
  CHECK(max_abs_diff(tr.unnormalized, half_i4) < 1e-15);
  ComplexMatrix quarter_i4 = ComplexMatrix::identity(4);
  quarter_i4 *= Complex(0.25);
  CHECK(max_abs_diff(tr.normalized, quarter_i4) < 1e-15);

  CHECK_THROWS_AS(
      state_from_channel(2, 2, [](int, int) { return ComplexMatrix(2, 2); }),
      ValidationError);
}

TEST_CASE("adjoint channel is the partial transpose on the Choi side", "[channels]") {
  RngStream rng(2);
  const BipartiteState rho = random_state(rng, 2, 3);
  const Channel phi = channel_from_state(rho);
  const Channel adj = adjoint_channel(phi);

  CHECK(max_abs_diff(adj.choi, partial_transpose(rho.rho, 2, 3, Factor::A)) == 0.0);

  // action on units: adjoint of the image
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const ComplexMatrix unit = ComplexMatrix::unit(2, i, j);
      CHECK(max_abs_diff(adj.apply(unit), adjoint(phi.apply(unit))) < 1e-12);
    }

  // involution, exactly
  CHECK(max_abs_diff(adjoint_channel(adj).choi, phi.choi) == 0.0);

  // separable state: adjoint stays completely positive
  const auto sep = random_separable(rng, 2, 2, 3);
  CHECK(is_completely_positive(adjoint_channel(channel_from_state(sep.state))));

  // Bell state: adjoint Choi is SWAP/2, with eigenvalue -1/2
  const Channel bell_adj = adjoint_channel(channel_from_state(make_bipartite(bell_projector(), 2, 2)));
  CHECK(std::abs(min_eigenvalue(bell_adj.choi) + 0.5) < 1e-12);
  CHECK_FALSE(is_completely_positive(bell_adj));
}

TEST_CASE("kraus_from_choi reconstructs the channel", "[channels]") {
  // identity channel: single Kraus proportional to the identity
  const ChoiAssembly ida = state_from_channel(
      2, 2, [](int i, int j) { return ComplexMatrix::unit(2, i, j); });
  const Channel idchan{2, 2, ida.unnormalized};
  const KrausSet ks = kraus_from_choi(idchan);
  REQUIRE(ks.operators.size() == 1);
  // K is unitary times a phase; K^dagger K = I
  CHECK(frob_norm(adjoint(ks.operators[0]) * ks.operators[0] - ComplexMatrix::identity(2)) <
        1e-12);

  // unitary conjugation: single Kraus equal to U up to phase
  RngStream rng(3);
  const ComplexMatrix u = herm_eig(random_hermitian(rng, 3)).eigenvectors;
  const ChoiAssembly ua = state_from_channel(
      3, 3, [&](int i, int j) { return u * ComplexMatrix::unit(3, i, j) * adjoint(u); });
  const KrausSet uks = kraus_from_choi(Channel{3, 3, ua.unnormalized});
  REQUIRE(uks.operators.size() == 1);
  CHECK(std::abs(std::abs(trace(adjoint(u) * uks.operators[0])) - 3.0) < 1e-9);

  // completely depolarizing channel: dA*dB Kraus operators, exact reconstruction
  const ChoiAssembly dep = state_from_channel(2, 2, [&](int i, int j) {
    ComplexMatrix out(2, 2);
    if (i == j)
      for (int k = 0; k < 2; ++k) out(k, k) = 0.5;
    return out;
  });
  const Channel depchan{2, 2, dep.unnormalized};
  const KrausSet dks = kraus_from_choi(depchan);
  CHECK(dks.operators.size() == 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const ComplexMatrix unit = ComplexMatrix::unit(2, i, j);
      CHECK(frob_norm(dks.apply(unit) - depchan.apply(unit)) < 1e-12);
    }

  // random CP channel from a random state
  const BipartiteState rho = random_state(rng, 3, 2);
  const Channel phi = channel_from_state(rho);
  const KrausSet rks = kraus_from_choi(phi);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const ComplexMatrix unit = ComplexMatrix::unit(3, i, j);
      CHECK(frob_norm(rks.apply(unit) - phi.apply(unit)) < 1e-9);
    }

  // non-PSD Choi is rejected
  const Channel bad{2, 2, partial_transpose(bell_projector(), 2, 2, Factor::A)};
  CHECK_THROWS_AS(kraus_from_choi(bad), ValidationError);
}

TEST_CASE("stinespring dilation compresses back to the channel", "[channels]") {
  RngStream rng(4);
  // identity channel: v embeds H_B with v^dagger v = 1
  const ChoiAssembly ida = state_from_channel(
      2, 2, [](int i, int j) { return ComplexMatrix::unit(2, i, j); });
  const StinespringDilation idd = stinespring_from_kraus(kraus_from_choi(Channel{2, 2, ida.unnormalized}));
  CHECK(idd.rank == 1);
  CHECK(frob_norm(adjoint(idd.v) * idd.v - ComplexMatrix::identity(2)) < 1e-12);

  for (auto [dA, dB] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}}) {
    const BipartiteState rho = random_state(rng, dA, dB);
    const Channel phi = channel_from_state(rho);
    const StinespringDilation d = stinespring_from_kraus(kraus_from_choi(phi));
    for (int i = 0; i < dA; ++i)
      for (int j = 0; j < dA; ++j) {
        const ComplexMatrix unit = ComplexMatrix::unit(dA, i, j);
        CHECK(frob_norm(d.compress(unit) - phi.apply(unit)) < 1e-9);
      }
  }
}

TEST_CASE("dilation_unitary_relation connects dilations of one channel", "[channels]") {
  RngStream rng(5);
  const BipartiteState rho = random_state(rng, 2, 2);
  const Channel phi = channel_from_state(rho);
  const KrausSet ks = kraus_from_choi(phi);
  const StinespringDilation d1 = stinespring_from_kraus(ks);

  // identical dilations
  const DilationRelation same = dilation_unitary_relation(d1, d1);
  CHECK(same.residual < 1e-10);

  // permuted Kraus order
  KrausSet perm = ks;
  std::reverse(perm.operators.begin(), perm.operators.end());
  const DilationRelation rel_perm = dilation_unitary_relation(d1, stinespring_from_kraus(perm));
  CHECK(rel_perm.residual < 1e-8);

  // padded dilation with an extra zero Kraus operator
  KrausSet padded = ks;
  padded.operators.push_back(ComplexMatrix(ks.dB, ks.dA));
  const StinespringDilation d2 = stinespring_from_kraus(padded);
  const DilationRelation rel_pad = dilation_unitary_relation(d1, d2);
  CHECK(rel_pad.residual < 1e-8);

  // W restricted to the reachable subspace is isometric: W M1 matches M2,
  // which has the same Gram matrix as M1
  const DilationRelation rel = dilation_unitary_relation(d1, d2);
  CHECK(rel.residual < 1e-8);

  // different channels are rejected
  const BipartiteState other = random_state(rng, 2, 2);
  const StinespringDilation d3 =
      stinespring_from_kraus(kraus_from_choi(channel_from_state(other)));
  CHECK_THROWS_AS(dilation_unitary_relation(d1, d3), NotSameChannelError);
}

TEST_CASE("holevo form from separable decompositions", "[channels]") {
  RngStream rng(6);

  // single product term
  SeparableDecomposition dec;
  dec.weights = {1.0};
  dec.a_factors = {random_density(rng, 2)};
  dec.b_factors = {random_density(rng, 2)};
  const HolevoForm h1 = holevo_from_separable(dec);
  CHECK(max_abs_diff(h1.povm[0], transpose(dec.a_factors[0])) == 0.0);
  CHECK(max_abs_diff(h1.states[0], dec.b_factors[0]) == 0.0);
  CHECK(frob_norm(h1.choi() - dec.reconstruct()) < 1e-12);

  // maximally mixed from uniform computational products
  SeparableDecomposition mm;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      mm.weights.push_back(0.25);
      mm.a_factors.push_back(projector(ket(2, i)));
      mm.b_factors.push_back(projector(ket(2, k)));
    }
  const HolevoForm h2 = holevo_from_separable(mm);
  ComplexMatrix quarter_i4 = ComplexMatrix::identity(4);
  quarter_i4 *= Complex(0.25);
  CHECK(max_abs_diff(h2.choi(), quarter_i4) < 1e-15);

  // X factors square to the weighted states
  const auto rs = random_separable(rng, 2, 3, 3);
  const HolevoForm h3 = holevo_from_separable(rs.decomposition);
  CHECK(frob_norm(h3.choi() - rs.state.rho) < 1e-9);
  for (int k = 0; k < h3.terms(); ++k) {
    ComplexMatrix we = h3.states[k];
    we *= Complex(h3.weights[k]);
    CHECK(frob_norm(adjoint(h3.factors[k]) * h3.factors[k] - we) < 1e-12);
  }

  SeparableDecomposition bad = rs.decomposition;
  bad.residual = 1.0;
  CHECK_THROWS_AS(holevo_from_separable(bad), ValidationError);
}

TEST_CASE("naimark dilation of POVMs", "[channels]") {
  // PVM input: exact recovery, no padding
  std::vector<ComplexMatrix> pvm = {ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 1)};
  const NaimarkDilation nd = naimark_dilate(pvm);
  CHECK_FALSE(nd.padded);
  CHECK(nd.outcomes == 2);
  CHECK(frob_norm(adjoint(nd.vtilde) * nd.vtilde - ComplexMatrix::identity(2)) < 1e-12);
  for (int k = 0; k < 2; ++k) CHECK(max_abs_diff(nd.compress(k), pvm[k]) < 1e-12);

  // qubit trine POVM
  std::vector<ComplexMatrix> trine;
  for (int k = 0; k < 3; ++k) {
    const double th = 2.0 * M_PI * k / 3.0;
    ComplexMatrix v(2, 1);
    v(0, 0) = std::cos(th / 2.0);
    v(1, 0) = std::sin(th / 2.0);
    ComplexMatrix f = projector(v);
    f *= Complex(2.0 / 3.0);
    trine.push_back(f);
  }
  const NaimarkDilation nt = naimark_dilate(trine);
  CHECK_FALSE(nt.padded);
  CHECK(frob_norm(adjoint(nt.vtilde) * nt.vtilde - ComplexMatrix::identity(2)) < 1e-10);
  for (int k = 0; k < 3; ++k) CHECK(max_abs_diff(nt.compress(k), trine[k]) < 1e-10);
  // projections are exact orthogonal projectors
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const ComplexMatrix pj = nt.projection(j);
      const ComplexMatrix pk = nt.projection(k);
      ComplexMatrix prod = pj * pk;
      if (j == k) prod -= pk;
      CHECK(frob_norm(prod) == 0.0);
    }

  // single element gets padded at outcome 0
  ComplexMatrix half = ComplexMatrix::identity(2);
  half *= Complex(0.5);
  const NaimarkDilation np = naimark_dilate({half});
  CHECK(np.padded);
  CHECK(np.outcomes == 2);
  CHECK(np.vtilde.rows() == 4);
  CHECK(frob_norm(adjoint(np.vtilde) * np.vtilde - ComplexMatrix::identity(2)) < 1e-12);
  CHECK(max_abs_diff(np.compress(1), half) < 1e-12);

  // POVM exceeding the identity has no completion
  ComplexMatrix big = ComplexMatrix::identity(2);
  big *= Complex(1.5);
  CHECK_THROWS_AS(naimark_dilate({big}), PovmError);
}

TEST_CASE("commutative dilation certifies the measure-prepare form", "[channels]") {
  RngStream rng(8);

  // product state: single outcome, trivially commutative
  SeparableDecomposition dec;
  dec.weights = {1.0};
  dec.a_factors = {random_density(rng, 2)};
  dec.b_factors = {random_density(rng, 2)};
  const CommutativeDilation cd1 = commutative_dilation(holevo_from_separable(dec));
  CHECK(cd1.outcomes == 1);
  CHECK(cd1.image_commutator_max == 0.0);
  CHECK(cd1.reconstruction_residual < 1e-12);

  // classical-classical state: diagonal projectors
  SeparableDecomposition cc;
  cc.weights = {0.3, 0.7};
  cc.a_factors = {projector(ket(2, 0)), projector(ket(2, 1))};
  cc.b_factors = {projector(ket(2, 0)), projector(ket(2, 1))};
  const CommutativeDilation cd2 = commutative_dilation(holevo_from_separable(cc));
  CHECK(cd2.image_commutator_max == 0.0);
  CHECK(cd2.projector_orthogonality == 0.0);
  CHECK(cd2.reconstruction_residual < 1e-12);

  // random separable: end-to-end residual
  const auto rs = random_separable(rng, 2, 2, 3);
  const CommutativeDilation cd3 = commutative_dilation(holevo_from_separable(rs.decomposition));
  CHECK(cd3.reconstruction_residual < 1e-8);
  // the compression of generator k is X_k^dagger X_k = w_k E_k
  const HolevoForm h = holevo_from_separable(rs.decomposition);
  for (int k = 0; k < h.terms(); ++k) {
    ComplexMatrix we = h.states[k];
    we *= Complex(h.weights[k]);
    CHECK(frob_norm(cd3.compress_generator(k) - we) < 1e-12);
  }
}
