#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qht/ensembles.hpp"
#include "qht/errors.hpp"
#include "qht/htheorem.hpp"

using namespace qht;
namespace o = qht::oracle;

namespace {

GrandSystem interaction_system(Index ds, Index dr, ComplexMatrix u_int, ComplexMatrix basis = {},
                               ComplexMatrix h_sys = {}, ComplexMatrix h_res = {}, double t = 0.0) {
  return {ds, dr,
          UnitaryEvolution{UnitaryKind::Interaction, std::move(u_int), std::move(h_sys),
                           std::move(h_res), t},
          std::move(basis)};
}

// H_k[i,j] = Tr{pi0 V_kj^dagger V_ki} with explicit loops.
ComplexMatrix direct_h(const InteractionBlocks& b, const ComplexMatrix& pi0, Index k) {
  const Index d = b.d_sys();
  ComplexMatrix h(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      h(i, j) = o::naive_trace(
          o::naive_matmul(pi0, o::naive_matmul(o::naive_adjoint(b.at(k, j)), b.at(k, i))));
  return h;
}

}  // namespace

TEST(HMatrices, NoInteractionGivesMatrixUnits) {
  const InteractionBlocks b = extract_blocks(identity(6), {}, 3, 2);
  const ReservoirState res(DensityMatrix::maximally_mixed(2));
  const HMatrixSet h = h_matrices(b, res);
  for (Index k = 0; k < 3; ++k) EXPECT_LE(o::max_abs_diff(h.matrices[k], matrix_unit(3, k, k)), 1e-15);
}

TEST(HMatrices, ControlledInteractionGivesMatrixUnits) {
  SeededGenerator gen(300, 0);
  const ComplexMatrix basis = haar_unitary(gen, 2);
  const InteractionBlocks b =
      extract_blocks(controlled_interaction(gen, 2, 3, basis), basis, 2, 3);
  const ReservoirState res(random_density(gen, 3, 2));
  const HMatrixSet h = h_matrices(b, res);
  for (Index k = 0; k < 2; ++k) EXPECT_LE(o::max_abs_diff(h.matrices[k], matrix_unit(2, k, k)), 1e-12);
}

TEST(HMatrices, MatchDirectTraceAndInvariants) {
  SeededGenerator gen(301, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index ds = gen.uniform_int(2, 4);
    const Index dr = gen.uniform_int(2, 4);
    const InteractionBlocks b = extract_blocks(haar_unitary(gen, ds * dr), haar_unitary(gen, ds), ds, dr);
    const ReservoirState res(random_density(gen, dr, gen.uniform_int(1, dr)));
    const HMatrixSet h = h_matrices(b, res);
    double trace_sum = 0.0;
    for (Index k = 0; k < ds; ++k) {
      const ComplexMatrix& hk = h.matrices[k];
      EXPECT_LE(o::max_abs_diff(hk, direct_h(b, res.pi0().matrix(), k)), 1e-12);
      EXPECT_LE(hermiticity_residual(hk), 1e-10);
      EXPECT_GE(eig_hermitian(hk).eigenvalues(0), -1e-10);
      trace_sum += hk.trace().real();
    }
    // Individual traces are the diagonal of Phi(1); they add up to d_sys.
    EXPECT_NEAR(trace_sum, static_cast<double>(ds), 1e-9);
  }
}

TEST(DiagonalInvarianceTest, NoInteractionHolds) {
  const InteractionBlocks b = extract_blocks(identity(4), {}, 2, 2);
  const DiagonalInvariance inv =
      diagonal_invariance(h_matrices(b, ReservoirState(DensityMatrix::maximally_mixed(2))), 1e-9);
  EXPECT_TRUE(inv.holds);
  EXPECT_EQ(inv.residual, 0.0);
}

TEST(DiagonalInvarianceTest, SwapDemonFails) {
  const DemonInstance d = demon_instance();
  const HMatrixSet h = h_matrices(extract_blocks(d.u_t, {}, 2, 2), d.res);
  // V_ki = |i><k|, so H_0 = 1 and H_1 = 0.
  EXPECT_LE(o::max_abs_diff(h.matrices[0], identity(2)), 1e-15);
  EXPECT_LE(o::max_abs_diff(h.matrices[1], zeros(2, 2)), 1e-15);
  const DiagonalInvariance inv = diagonal_invariance(h, 1e-9);
  EXPECT_FALSE(inv.holds);
  EXPECT_NEAR(inv.residual, 1.0, 1e-15);
}

TEST(DiagonalInvarianceTest, HaarInteractionsAlmostAlwaysFail) {
  SeededGenerator gen(302, 0);
  int failures = 0;
  double smallest = 1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const InteractionBlocks b = extract_blocks(haar_unitary(gen, 4), {}, 2, 2);
    const DiagonalInvariance inv =
        diagonal_invariance(h_matrices(b, ReservoirState(random_density(gen, 2, 2))), 1e-9);
    failures += !inv.holds;
    smallest = std::min(smallest, inv.residual);
  }
  EXPECT_GE(failures, 990);
  EXPECT_GT(smallest, 1e-6);
}

TEST(DiagonalInvarianceTest, AgreesWithSampledStates) {
  // Cross-check the finite criterion against state sampling: when H_k = E_kk
  // the diagonal of Phi(rho) in |psi~> equals that of U_S rho U_S^dagger.
  SeededGenerator gen(303, 0);
  const ComplexMatrix basis = haar_unitary(gen, 3);
  const ComplexMatrix hs = random_hermitian(gen, 3);
  const GrandSystem g = interaction_system(3, 2, controlled_interaction(gen, 3, 2, basis), basis, hs,
                                           random_hermitian(gen, 2), 0.6);
  const ReservoirState res(random_density(gen, 2, 2));
  const TheoremAnalysis a = analyze(g, res);
  ASSERT_TRUE(a.report.diag_invariant);
  const ComplexMatrix rotated = a.free.u_sys * basis;
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = random_density(gen, 3, 3);
    const ComplexMatrix with = rotated.adjoint() * apply(a.channel, rho).matrix() * rotated;
    const ComplexMatrix without =
        rotated.adjoint() * a.free.u_sys * rho.matrix() * a.free.u_sys.adjoint() * rotated;
    for (Index k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(with(k, k) - without(k, k)), 0.0, 1e-12);
  }
}

TEST(Factorization, ControlledAndIdentity) {
  SeededGenerator gen(304, 0);
  std::vector<ComplexMatrix> w{haar_unitary(gen, 3), haar_unitary(gen, 3)};
  const InteractionBlocks b = extract_blocks(controlled_interaction(w, {}), {}, 2, 3);
  const ReservoirState res(random_density(gen, 3, 3));
  const FactorizationWitness fw = factorization_check(b, res);
  EXPECT_EQ(fw.entries.size(), 6u);
  EXPECT_LE(fw.worst_off_block(), 1e-15);
  for (const auto& e : fw.entries)
    EXPECT_LE((e.phi - w[std::size_t(e.k)] * res.eigenvector(e.n)).norm(), 1e-14);
  EXPECT_TRUE(fw.passes());

  const FactorizationWitness idw =
      factorization_check(extract_blocks(identity(6), {}, 2, 3), res);
  for (const auto& e : idw.entries) EXPECT_LE((e.phi - res.eigenvector(e.n)).norm(), 1e-15);
}

TEST(Factorization, OnlyPopulatedEigenstates) {
  const ReservoirState res(DensityMatrix::from_matrix(matrix_unit(3, 2, 2)));
  const FactorizationWitness fw = factorization_check(extract_blocks(identity(6), {}, 2, 3), res);
  ASSERT_EQ(fw.entries.size(), 2u);
  EXPECT_EQ(fw.entries[0].n, res.populated()[0]);
}

TEST(Factorization, SwapFailsWitness) {
  const DemonInstance d = demon_instance();
  const FactorizationWitness fw = factorization_check(extract_blocks(d.u_t, {}, 2, 2), d.res);
  EXPECT_FALSE(fw.passes());
  EXPECT_NEAR(fw.worst_off_block(), 1.0, 1e-15);
}

TEST(GramReconstruction, IdentityInteractionIsFreeEvolution) {
  SeededGenerator gen(305, 0);
  const ComplexMatrix hs = random_hermitian(gen, 2);
  const GrandSystem g = interaction_system(2, 2, identity(4), {}, hs, random_hermitian(gen, 2), 1.1);
  const ReservoirState res(random_density(gen, 2, 2));
  const TheoremAnalysis a = analyze(g, res);
  ASSERT_TRUE(a.reconstruction.has_value());
  for (const auto& gamma : a.reconstruction->grams.gamma)
    EXPECT_LE(o::max_abs_diff(gamma, ComplexMatrix::Ones(2, 2)), 1e-14);
  EXPECT_LE(choi_distance(a.reconstruction->channel,
                          ChannelKraus::unitary_channel(unitary_exp(hs, 1.1))),
            1e-12);
}

TEST(GramReconstruction, PureReservoirGram) {
  SeededGenerator gen(306, 0);
  std::vector<ComplexMatrix> w{haar_unitary(gen, 3), haar_unitary(gen, 3)};
  const ComplexMatrix basis = haar_unitary(gen, 2);
  const ReservoirState res(DensityMatrix::from_matrix(matrix_unit(3, 0, 0)));
  const TheoremAnalysis a = analyze(interaction_system(2, 3, controlled_interaction(w, basis), basis), res);
  ASSERT_TRUE(a.reconstruction.has_value());
  ASSERT_EQ(a.reconstruction->grams.gamma.size(), 1u);
  const ComplexVector n0 = res.eigenvector(res.populated()[0]);
  const ComplexMatrix& gamma = a.reconstruction->grams.gamma[0];
  for (Index k = 0; k < 2; ++k)
    for (Index kp = 0; kp < 2; ++kp) {
      const Complex expected = (w[kp] * n0).dot(w[k] * n0);
      EXPECT_LE(std::abs(gamma(k, kp) - expected), 1e-14);
    }
  EXPECT_LE(a.reconstruction->dephasing_residual, 1e-9);
}

TEST(GramReconstruction, MixedReservoirConvexCombination) {
  SeededGenerator gen(307, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = sample_instance(Family::Controlled, gen, gen.uniform_int(2, 4),
                                    gen.uniform_int(2, 4));
    const TheoremAnalysis a = analyze(inst.system, inst.reservoir);
    ASSERT_TRUE(a.reconstruction.has_value());
    EXPECT_LE(a.reconstruction->dephasing_residual, 1e-9);
    EXPECT_LE(unitality(a.reconstruction->channel).defect_fro, 1e-9);
    for (const auto& gamma : a.reconstruction->grams.gamma) {
      EXPECT_LE(hermiticity_residual(gamma), 1e-8);
      EXPECT_GE(eig_hermitian(gamma).eigenvalues(0), -1e-8);
      for (Index k = 0; k < gamma.rows(); ++k) EXPECT_NEAR(gamma(k, k).real(), 1.0, 1e-8);
    }
    double total = 0.0;
    for (double w : a.reconstruction->grams.weights) total += w;
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(GramReconstruction, RequiresPassingWitness) {
  const DemonInstance d = demon_instance();
  const InteractionBlocks b = extract_blocks(d.u_t, {}, 2, 2);
  const FactorizationWitness fw = factorization_check(b, d.res);
  const ChannelKraus ch = channel_from_evolution(d.u_t, d.res, 2, 2);
  EXPECT_THROW(gram_and_reconstruct(fw, d.res, identity(2), identity(2), ch), PreconditionError);
}

TEST(DephasingChannel, IsUnitalAndDampsCoherences) {
  ComplexMatrix gamma(2, 2);
  gamma << 1.0, Complex(0.3, 0.2), Complex(0.3, -0.2), 1.0;
  const ChannelKraus ch = dephasing_channel(gamma, {});
  EXPECT_LE(unitality(ch).defect_fro, 1e-14);
  ComplexMatrix rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  const ComplexMatrix out = apply(ch, DensityMatrix::from_matrix(rho)).matrix();
  EXPECT_LE(std::abs(out(0, 1) - 0.5 * gamma(0, 1)), 1e-15);
  EXPECT_LE(std::abs(out(0, 0) - 0.5), 1e-15);
}

TEST(VerifyTheorem, NoInteraction) {
  const GrandSystem g{2, 3, HamiltonianEvolution{o::pauli_z(), zeros(3, 3), zeros(6, 6), 1.0}, {}};
  const TheoremReport r = verify_theorem(g, ReservoirState(DensityMatrix::maximally_mixed(3)));
  EXPECT_TRUE(r.diag_invariant);
  EXPECT_TRUE(r.unital);
  EXPECT_LE(r.diag_residual, 1e-12);
  EXPECT_LE(r.unitality_defect, 1e-12);
  EXPECT_TRUE(r.implication_consistent);
}

TEST(VerifyTheorem, ControlledInstances) {
  SeededGenerator gen(308, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = sample_instance(Family::Controlled, gen, 3, 3);
    const TheoremReport r = verify_theorem(inst.system, inst.reservoir);
    EXPECT_TRUE(r.diag_invariant);
    EXPECT_TRUE(r.unital);
    EXPECT_TRUE(r.factorization_ok);
    ASSERT_TRUE(r.dephasing_residual.has_value());
    EXPECT_LE(*r.dephasing_residual, 1e-9);
    EXPECT_LE(r.commutator_agreement_residual, 1e-9);
  }
}

TEST(VerifyTheorem, DemonIsVacuouslyConsistent) {
  SeededGenerator gen(0, 0);
  Instance inst = sample_instance(Family::Demon, gen, 2, 2);
  const TheoremReport r = verify_theorem(inst.system, inst.reservoir);
  EXPECT_FALSE(r.diag_invariant);
  EXPECT_FALSE(r.unital);
  EXPECT_FALSE(r.factorization_ok);
  EXPECT_FALSE(r.dephasing_residual.has_value());
  EXPECT_TRUE(r.implication_consistent);
}

TEST(VerifyTheorem, ReservoirDimensionMismatch) {
  const GrandSystem g{2, 2, UnitaryEvolution{UnitaryKind::Total, identity(4), {}, {}, 0.0}, {}};
  EXPECT_THROW(verify_theorem(g, ReservoirState(DensityMatrix::maximally_mixed(3))), ShapeError);
}

TEST(SpectralSideConditions, HoldOnInvariantInstances) {
  // h_a = |xi_{a,k}|^2 and sum_a h_a = 1 on diagonal-invariant instances.
  SeededGenerator gen(309, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = sample_instance(Family::Controlled, gen, gen.uniform_int(2, 4), 2);
    const TheoremAnalysis a = analyze(inst.system, inst.reservoir);
    ASSERT_TRUE(a.report.diag_invariant);
    for (Index k = 0; k < inst.system.d_sys; ++k) {
      const HermitianSpectrum s = eig_hermitian(a.hset.matrices[k]);
      double sum = 0.0;
      for (Index al = 0; al < s.eigenvalues.size(); ++al) {
        EXPECT_NEAR(s.eigenvalues(al), std::norm(s.eigenvectors(k, al)), 1e-8);
        sum += s.eigenvalues(al);
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}
