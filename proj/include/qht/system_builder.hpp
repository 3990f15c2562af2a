#pragma once

// Grand-system assembly: total Hamiltonian, interaction-picture factorization
// U_t = (U_S (x) U_R) U_int, and the reservoir-space blocks
// V_ki = <psi_k| U_int |psi_i>.

#include <variant>
#include <vector>

#include "qht/numkernel.hpp"

namespace qht {

struct HamiltonianEvolution {
  ComplexMatrix h_sys;
  ComplexMatrix h_res;
  ComplexMatrix h_int;  // on the composite space
  double t = 0.0;
};

enum class UnitaryKind { Total, Interaction };

/// The joint evolution is given directly. Free Hamiltonians are optional and
/// default to zero, in which case U_t and U_int coincide.
struct UnitaryEvolution {
  UnitaryKind kind = UnitaryKind::Total;
  ComplexMatrix unitary;
  ComplexMatrix h_sys;  // empty means zero
  ComplexMatrix h_res;  // empty means zero
  double t = 0.0;
};

struct GrandSystem {
  Index d_sys = 0;
  Index d_res = 0;
  std::variant<HamiltonianEvolution, UnitaryEvolution> evolution;
  ComplexMatrix basis_psi;  // columns |psi_i>; empty means computational basis

  ComplexMatrix basis() const;
  double time() const;
};

/// Throws ShapeError / ValidationError when a GrandSystem invariant fails.
void validate(const GrandSystem& g);

/// H_S (x) 1 + 1 (x) H_R + H_int. Only defined for Hamiltonian-specified systems.
ComplexMatrix total_hamiltonian(const GrandSystem& g);

struct FreeEvolution {
  ComplexMatrix u_sys;
  ComplexMatrix u_res;
};
FreeEvolution free_evolution(const GrandSystem& g);

ComplexMatrix total_unitary(const GrandSystem& g);
ComplexMatrix interaction_unitary(const GrandSystem& g);

/// d_sys x d_sys grid of d_res x d_res operators; at(k, i) = V_ki.
class InteractionBlocks {
 public:
  InteractionBlocks(Index d_sys, Index d_res, std::vector<ComplexMatrix> blocks);

  Index d_sys() const { return d_sys_; }
  Index d_res() const { return d_res_; }
  const ComplexMatrix& at(Index k, Index i) const {
    return blocks_[static_cast<std::size_t>(k * d_sys_ + i)];
  }

  /// max over (i, j) of ||sum_k V_ki^dagger V_kj - delta_ij 1||_F
  double left_completeness_residual() const;
  /// max over (k, k') of ||sum_i V_ki V_k'i^dagger - delta_kk' 1||_F
  double right_completeness_residual() const;

 private:
  Index d_sys_;
  Index d_res_;
  std::vector<ComplexMatrix> blocks_;
};

/// Throws InconsistentInputError when either completeness residual exceeds 1e-6.
InteractionBlocks extract_blocks(const ComplexMatrix& u_int,
                                 const ComplexMatrix& basis_psi, Index d_sys,
                                 Index d_res);

/// Initial reservoir state together with its eigendecomposition
/// pi0 = sum_n pi_n |n><n|.
class ReservoirState {
 public:
  /// Eigenvalues at or below this cutoff are treated as unpopulated.
  static constexpr double kPopulationCutoff = 1e-12;

  explicit ReservoirState(DensityMatrix pi0);

  const DensityMatrix& pi0() const { return pi0_; }
  const HermitianSpectrum& spectrum() const { return spectrum_; }
  Index dim() const { return pi0_.dim(); }
  /// Indices n with pi_n > kPopulationCutoff, ascending.
  const std::vector<Index>& populated() const { return populated_; }
  double weight(Index n) const { return spectrum_.eigenvalues(n); }
  ComplexVector eigenvector(Index n) const { return spectrum_.eigenvectors.col(n); }

 private:
  DensityMatrix pi0_;
  HermitianSpectrum spectrum_;
  std::vector<Index> populated_;
};

}  // namespace qht
