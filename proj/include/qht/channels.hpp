#pragma once

// Quantum channels in Kraus form, derived from a joint evolution and an
// initial reservoir state, plus the diagnostics built on them: Choi matrix,
// unitality (directly and through the block-commutator identity), entropy
// gain with its lower bound, and sequential composition.

#include <optional>
#include <vector>

#include "qht/numkernel.hpp"
#include "qht/system_builder.hpp"

namespace qht {

class ChannelKraus {
 public:
  static constexpr double kCompletenessTol = 1e-9;
  static constexpr double kNegligibleWeight = 1e-12;

  /// Drops operators with ||K||_F < 1e-12, then requires sum K^dagger K = 1
  /// within 1e-9 (ValidationError otherwise).
  ChannelKraus(Index d_sys, std::vector<ComplexMatrix> kraus_ops);

  static ChannelKraus identity_channel(Index d);
  static ChannelKraus unitary_channel(const ComplexMatrix& u);

  Index d_sys() const { return d_sys_; }
  const std::vector<ComplexMatrix>& kraus_ops() const { return kraus_; }
  /// ||sum K^dagger K - 1||_F
  double completeness_residual() const;

 private:
  Index d_sys_;
  std::vector<ComplexMatrix> kraus_;
};

struct ChoiMatrix {
  Index d_sys = 0;
  /// sum_ij Phi(|i><j|) (x) |i><j|, output slot first.
  ComplexMatrix matrix;

  double min_eigenvalue() const;
};

/// K_{m,n} = sqrt(pi_n) <m|_res U_t |n>_res over populated eigenstates |n> of
/// pi0 and computational reservoir states |m>.
ChannelKraus channel_from_evolution(const ComplexMatrix& u_t,
                                    const ReservoirState& res, Index d_sys,
                                    Index d_res);

/// sum K m K^dagger on an arbitrary operator.
ComplexMatrix apply_linear(const ChannelKraus& ch, const ComplexMatrix& m);
DensityMatrix apply(const ChannelKraus& ch, const DensityMatrix& rho);

/// At most d^2 operators: once the product set is larger it is replaced by the
/// canonical form of canonical_kraus.
ChannelKraus compose(const ChannelKraus& later, const ChannelKraus& earlier);

/// Kraus operators from the eigendecomposition of the Choi matrix
/// (eigenvalues below 1e-14 relative to the largest are dropped).
ChannelKraus canonical_kraus(const ChannelKraus& ch);

ChoiMatrix choi(const ChannelKraus& ch);
/// ||J(a) - J(b)||_F, the representation-independent channel distance.
double choi_distance(const ChannelKraus& a, const ChannelKraus& b);

/// Block data needed for the commutator route to Phi(1).
struct BlockEvidence {
  const InteractionBlocks& blocks;
  const ReservoirState& reservoir;
  /// Columns |psi~_k> = U_S |psi_k>, the basis in which the commutator
  /// matrix is expressed.
  ComplexMatrix rotated_basis;
};

struct UnitalityCertificate {
  ComplexMatrix phi_of_one;  // computational basis
  double defect_fro = 0.0;   // ||Phi(1) - 1||_F
  /// [C]_kk' = sum_i Tr{pi0 [V_k'i^dagger, V_ki]}, |psi~_k> basis.
  std::optional<ComplexMatrix> commutator_matrix;
  std::optional<ComplexMatrix> basis;
  /// max-entry |<psi~|Phi(1)|psi~> - 1 - C|
  std::optional<double> agreement_residual;
};

UnitalityCertificate unitality(const ChannelKraus& ch);
/// Also evaluates the commutator matrix. Throws InconsistentInputError if the
/// evidence has the wrong dimensions or disagrees with the channel by more
/// than 1e-6.
UnitalityCertificate unitality(const ChannelKraus& ch, const BlockEvidence& evidence);

ComplexMatrix commutator_matrix(const InteractionBlocks& blocks,
                                const ReservoirState& res);

struct EntropyGain {
  double gain = 0.0;          // S(Phi(rho)) - S(rho)
  double holevo_bound = 0.0;  // -Tr{Phi(rho) ln Phi(1)} on supp Phi(1)
  double gap() const { return gain - holevo_bound; }
};

/// Throws NumericalInconsistencyError when Phi(rho) carries more than 1e-9
/// weight outside the support of Phi(1).
EntropyGain entropy_gain(const ChannelKraus& ch, const DensityMatrix& rho);

}  // namespace qht
