#pragma once

// Diagonal invariance implies unitality: the H_k test, the reservoir
// factorization witness, Gram matrices with the dephasing reconstruction of
// the channel, and the combined verdict.

#include <optional>
#include <vector>

#include "qht/channels.hpp"
#include "qht/system_builder.hpp"

namespace qht {

/// H_k[i, j] = Tr{pi0 V_kj^dagger V_ki}, one matrix per k.
struct HMatrixSet {
  std::vector<ComplexMatrix> matrices;
};

HMatrixSet h_matrices(const InteractionBlocks& blocks, const ReservoirState& res);

struct DiagonalInvariance {
  bool holds = false;
  double residual = 0.0;  // max_k ||H_k - E_kk||_max
};

/// Diagonal elements in the |psi~_k> basis are unaffected by the interaction
/// for every initial state iff H_k = E_kk for all k.
DiagonalInvariance diagonal_invariance(const HMatrixSet& hset, double tol);

struct FactorizationEntry {
  Index n = 0;  // eigenstate index of pi0
  Index k = 0;
  ComplexVector phi;            // V_kk |n>
  double off_block_norm = 0.0;  // max_{i != k} ||V_ik |n>||
  double norm_defect = 0.0;     // | ||phi|| - 1 |
};

struct FactorizationWitness {
  static constexpr double kTolerance = 1e-8;

  std::vector<FactorizationEntry> entries;  // ordered by (n, k)

  double worst_off_block() const;
  double worst_norm_defect() const;
  bool passes(double tol = kTolerance) const;
  const FactorizationEntry& at(Index n, Index k) const;
};

/// Evaluated for every populated eigenstate |n> of pi0 and every k. For
/// degenerate pi0 the eigenbasis is whichever the eigensolver returns.
FactorizationWitness factorization_check(const InteractionBlocks& blocks,
                                         const ReservoirState& res);

struct GramSet {
  std::vector<Index> n;         // populated eigenstate indices
  std::vector<double> weights;  // pi_n
  std::vector<ComplexMatrix> gamma;  // [gamma_n]_kk' = <phi_n,k'|phi_n,k>
};

/// rho -> sum_kk' |psi_k><psi_k'| rho_kk' gamma_kk' with rho_kk' taken in
/// the |psi_k> basis. gamma must be PSD with unit diagonal.
ChannelKraus dephasing_channel(const ComplexMatrix& gamma, const ComplexMatrix& basis_psi);

struct DephasingReconstruction {
  GramSet grams;
  /// U_S (sum_n pi_n Phi_n) U_S^dagger
  ChannelKraus channel;
  double dephasing_residual = 0.0;  // Choi distance to the direct channel
};

/// Throws PreconditionError when the witness does not pass its bounds.
DephasingReconstruction gram_and_reconstruct(const FactorizationWitness& witness,
                                             const ReservoirState& res,
                                             const ComplexMatrix& u_sys,
                                             const ComplexMatrix& basis_psi,
                                             const ChannelKraus& direct);

struct Tolerances {
  double diag = 1e-9;
  double unital = 1e-8;
};

struct TheoremReport {
  bool diag_invariant = false;
  double diag_residual = 0.0;
  bool unital = false;
  double unitality_defect = 0.0;
  double commutator_agreement_residual = 0.0;
  bool factorization_ok = false;
  double worst_off_block_norm = 0.0;
  double worst_norm_defect = 0.0;
  /// Only computed when the factorization witness passes.
  std::optional<double> dephasing_residual;
  std::optional<double> reconstruction_unitality_defect;
  double kraus_completeness_residual = 0.0;
  double choi_min_eigenvalue = 0.0;
  bool implication_consistent = true;

  friend bool operator==(const TheoremReport&, const TheoremReport&) = default;
};

/// Every intermediate object of one pipeline run.
struct TheoremAnalysis {
  ComplexMatrix u_t;
  ComplexMatrix u_int;
  FreeEvolution free;
  InteractionBlocks blocks;
  ChannelKraus channel;
  HMatrixSet hset;
  UnitalityCertificate unitality;
  FactorizationWitness witness;
  std::optional<DephasingReconstruction> reconstruction;
  TheoremReport report;
};

TheoremAnalysis analyze(const GrandSystem& g, const ReservoirState& res,
                        const Tolerances& tol = {});

TheoremReport verify_theorem(const GrandSystem& g, const ReservoirState& res,
                             const Tolerances& tol = {});

}  // namespace qht
