#include "qht/htheorem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qht/errors.hpp"

namespace qht {

HMatrixSet h_matrices(const InteractionBlocks& blocks, const ReservoirState& res) {
  if (res.dim() != blocks.d_res())
    throw ShapeError("h_matrices: reservoir dimension mismatch");
  const Index d = blocks.d_sys();
  const ComplexMatrix& pi0 = res.pi0().matrix();
  HMatrixSet out;
  out.matrices.reserve(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) {
    ComplexMatrix h(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        h(i, j) = (pi0 * blocks.at(k, j).adjoint() * blocks.at(k, i)).trace();
    out.matrices.push_back(std::move(h));
  }
  return out;
}

DiagonalInvariance diagonal_invariance(const HMatrixSet& hset, double tol) {
  const Index d = static_cast<Index>(hset.matrices.size());
  double residual = 0.0;
  for (Index k = 0; k < d; ++k)
    residual = std::max(residual,
                        max_abs_entry(hset.matrices[static_cast<std::size_t>(k)] -
                                      matrix_unit(d, k, k)));
  return {residual <= tol, residual};
}

double FactorizationWitness::worst_off_block() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.off_block_norm);
  return worst;
}

double FactorizationWitness::worst_norm_defect() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.norm_defect);
  return worst;
}

bool FactorizationWitness::passes(double tol) const {
  return !entries.empty() && worst_off_block() <= tol && worst_norm_defect() <= tol;
}

const FactorizationEntry& FactorizationWitness::at(Index n, Index k) const {
  for (const auto& e : entries)
    if (e.n == n && e.k == k) return e;
  throw std::out_of_range("factorization witness: no entry for (" +
                          std::to_string(n) + ", " + std::to_string(k) + ")");
}

FactorizationWitness factorization_check(const InteractionBlocks& blocks,
                                         const ReservoirState& res) {
  if (res.dim() != blocks.d_res())
    throw ShapeError("factorization_check: reservoir dimension mismatch");
  const Index d = blocks.d_sys();
  FactorizationWitness w;
  for (const Index n : res.populated()) {
    const ComplexVector ket = res.eigenvector(n);
    for (Index k = 0; k < d; ++k) {
      FactorizationEntry e;
      e.n = n;
      e.k = k;
      e.phi = blocks.at(k, k) * ket;
      for (Index i = 0; i < d; ++i)
        if (i != k)
          e.off_block_norm = std::max(e.off_block_norm, (blocks.at(i, k) * ket).norm());
      e.norm_defect = std::abs(e.phi.norm() - 1.0);
      w.entries.push_back(std::move(e));
    }
  }
  return w;
}

ChannelKraus dephasing_channel(const ComplexMatrix& gamma, const ComplexMatrix& basis_psi) {
  require_square(gamma, "dephasing_channel");
  const Index d = gamma.rows();
  const ComplexMatrix basis = basis_psi.size() == 0 ? identity(d) : basis_psi;
  if (basis.rows() != d || basis.cols() != d)
    throw ShapeError("dephasing_channel: basis dimension mismatch");
  // gamma = sum_a mu_a g_a g_a^dagger, Kraus ops sqrt(mu_a) B diag(g_a) B^dagger.
  const HermitianSpectrum s = eig_hermitian(gamma);
  std::vector<ComplexMatrix> ops;
  for (Index a = 0; a < d; ++a) {
    const double mu = s.eigenvalues(a);
    if (mu <= 0.0) continue;
    const ComplexVector g = s.eigenvectors.col(a);
    ops.push_back(std::sqrt(mu) * basis * g.asDiagonal() * basis.adjoint());
  }
  return ChannelKraus(d, std::move(ops));
}

DephasingReconstruction gram_and_reconstruct(const FactorizationWitness& witness,
                                             const ReservoirState& res,
                                             const ComplexMatrix& u_sys,
                                             const ComplexMatrix& basis_psi,
                                             const ChannelKraus& direct) {
  if (!witness.passes())
    throw PreconditionError(
        "gram_and_reconstruct: reservoir factorization does not hold (off-block " +
        std::to_string(witness.worst_off_block()) + ", norm defect " +
        std::to_string(witness.worst_norm_defect()) + ")");
  const Index d = direct.d_sys();
  if (u_sys.rows() != d || u_sys.cols() != d)
    throw ShapeError("gram_and_reconstruct: free system evolution dimension mismatch");

  GramSet grams;
  std::vector<ComplexMatrix> ops;
  for (const Index n : res.populated()) {
    ComplexMatrix gamma(d, d);
    for (Index k = 0; k < d; ++k)
      for (Index kp = 0; kp < d; ++kp)
        gamma(k, kp) = witness.at(n, kp).phi.dot(witness.at(n, k).phi);
    const double weight = res.weight(n);
    const ChannelKraus dephasing = dephasing_channel(gamma, basis_psi);
    for (const auto& k : dephasing.kraus_ops())
      ops.push_back(std::sqrt(weight) * u_sys * k);
    grams.n.push_back(n);
    grams.weights.push_back(weight);
    grams.gamma.push_back(std::move(gamma));
  }
  ChannelKraus channel(d, std::move(ops));
  const double residual = choi_distance(channel, direct);
  return {std::move(grams), std::move(channel), residual};
}

TheoremAnalysis analyze(const GrandSystem& g, const ReservoirState& res,
                        const Tolerances& tol) {
  validate(g);
  if (res.dim() != g.d_res)
    throw ShapeError("analyze: reservoir state has dimension " + std::to_string(res.dim()) +
                     ", expected " + std::to_string(g.d_res));
  const ComplexMatrix basis = g.basis();
  ComplexMatrix u_t = total_unitary(g);
  ComplexMatrix u_int = interaction_unitary(g);
  FreeEvolution free = free_evolution(g);
  InteractionBlocks blocks = extract_blocks(u_int, basis, g.d_sys, g.d_res);
  ChannelKraus channel = channel_from_evolution(u_t, res, g.d_sys, g.d_res);
  HMatrixSet hset = h_matrices(blocks, res);
  const DiagonalInvariance inv = diagonal_invariance(hset, tol.diag);
  UnitalityCertificate cert =
      unitality(channel, BlockEvidence{blocks, res, free.u_sys * basis});
  FactorizationWitness witness = factorization_check(blocks, res);

  std::optional<DephasingReconstruction> recon;
  if (witness.passes())
    recon = gram_and_reconstruct(witness, res, free.u_sys, basis, channel);

  TheoremReport r;
  r.diag_invariant = inv.holds;
  r.diag_residual = inv.residual;
  r.unitality_defect = cert.defect_fro;
  r.unital = cert.defect_fro <= tol.unital;
  r.commutator_agreement_residual = cert.agreement_residual.value_or(0.0);
  r.factorization_ok = witness.passes();
  r.worst_off_block_norm = witness.worst_off_block();
  r.worst_norm_defect = witness.worst_norm_defect();
  if (recon) {
    r.dephasing_residual = recon->dephasing_residual;
    r.reconstruction_unitality_defect = unitality(recon->channel).defect_fro;
  }
  r.kraus_completeness_residual = channel.completeness_residual();
  r.choi_min_eigenvalue = choi(channel).min_eigenvalue();
  r.implication_consistent = !r.diag_invariant || r.unital;

  return TheoremAnalysis{std::move(u_t),     std::move(u_int),   std::move(free),
                         std::move(blocks),  std::move(channel), std::move(hset),
                         std::move(cert),    std::move(witness), std::move(recon),
                         r};
}

TheoremReport verify_theorem(const GrandSystem& g, const ReservoirState& res,
                             const Tolerances& tol) {
  return analyze(g, res, tol).report;
}

}  // namespace qht
