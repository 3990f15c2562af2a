#pragma once

// Deterministic instance generators for statistical checks.
//
// Streams are xoshiro256** engines whose 256-bit state is filled by
// SplitMix64 from a key that mixes (master_seed, stream_id). Gaussian
// variates come from the Box-Muller transform of the uniform stream, so a
// trial's instance depends only on its seeds and parameters.

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "qht/numkernel.hpp"
#include "qht/system_builder.hpp"

namespace qht {

class SeededGenerator {
 public:
  SeededGenerator(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  /// Real and imaginary parts i.i.d. N(0, 1/2).
  Complex complex_normal();
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

ComplexMatrix ginibre(SeededGenerator& gen, Index rows, Index cols);

/// QR of a Ginibre matrix with the phases of diag(R) moved into Q.
ComplexMatrix haar_unitary(SeededGenerator& gen, Index d);

/// GUE-style Hermitian matrix (G + G^dagger) / 2 scaled by `scale`.
ComplexMatrix random_hermitian(SeededGenerator& gen, Index d, double scale = 1.0);

/// Rank-`rank` state G G^dagger / Tr with G a d x rank Ginibre matrix, or a
/// uniform mixture over `rank` Haar-random orthonormal vectors when
/// `equal_weights` is set. Throws ValidationError for rank outside [1, d].
DensityMatrix random_density(SeededGenerator& gen, Index d, Index rank,
                             bool equal_weights = false);

/// sum_k |psi_k><psi_k| (x) W_k for the given reservoir unitaries.
ComplexMatrix controlled_interaction(const std::vector<ComplexMatrix>& reservoir_unitaries,
                                     const ComplexMatrix& basis_psi);
/// Same, with independent Haar W_k.
ComplexMatrix controlled_interaction(SeededGenerator& gen, Index d_sys, Index d_res,
                                     const ComplexMatrix& basis_psi);

ComplexMatrix swap_unitary(Index d);

struct DemonInstance {
  ComplexMatrix u_t;  // two-qubit SWAP
  ReservoirState res;  // pi0 = |0><0|
};
DemonInstance demon_instance();

enum class Family { Haar, Controlled, Demon };

Family parse_family(std::string_view name);
std::string_view family_name(Family f);

struct Instance {
  GrandSystem system;
  ReservoirState reservoir;
};

/// One sweep trial.
///  - Haar: U_int Haar on the composite space, random free Hamiltonians,
///    full-rank random pi0.
///  - Controlled: U_int = sum_k |psi_k><psi_k| (x) W_k in a Haar-random basis,
///    random free Hamiltonians, pi0 of random rank.
///  - Demon: the fixed SWAP instance (dimensions must be 2 and 2).
Instance sample_instance(Family family, SeededGenerator& gen, Index d_sys, Index d_res);

}  // namespace qht
