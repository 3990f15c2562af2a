#include "qht/system_builder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qht/errors.hpp"

namespace qht {

namespace {

constexpr double kHamiltonianTol = 1e-9;
constexpr double kBasisTol = 1e-10;
constexpr double kUnitaryTol = 1e-9;
constexpr double kBlockConsistencyTol = 1e-6;

void check_hamiltonian(const ComplexMatrix& h, Index d, const char* what) {
  if (h.size() == 0) return;
  if (h.rows() != d || h.cols() != d)
    throw ShapeError(std::string(what) + ": expected " + std::to_string(d) + "x" +
                     std::to_string(d) + ", got " + std::to_string(h.rows()) + "x" +
                     std::to_string(h.cols()));
  require_finite(h, what);
  if (!is_hermitian(h, kHamiltonianTol))
    throw ValidationError(std::string(what) + " is not Hermitian");
}

ComplexMatrix free_unitary(const ComplexMatrix& h, Index d, double t) {
  if (h.size() == 0) return identity(d);
  return unitary_exp(h, t);
}

}  // namespace

ComplexMatrix GrandSystem::basis() const {
  if (basis_psi.size() == 0) return identity(d_sys);
  return basis_psi;
}

double GrandSystem::time() const {
  return std::visit([](const auto& e) { return e.t; }, evolution);
}

void validate(const GrandSystem& g) {
  if (g.d_sys <= 0 || g.d_res <= 0)
    throw ShapeError("grand system: dimensions must be positive");
  const Index d = g.d_sys * g.d_res;
  if (g.basis_psi.size() != 0) {
    if (g.basis_psi.rows() != g.d_sys || g.basis_psi.cols() != g.d_sys)
      throw ShapeError("grand system: basis must be d_sys x d_sys");
    require_finite(g.basis_psi, "basis");
    if (unitarity_defect(g.basis_psi) > kBasisTol)
      throw ValidationError("grand system: basis is not orthonormal");
  }
  if (const auto* h = std::get_if<HamiltonianEvolution>(&g.evolution)) {
    if (h->h_sys.size() == 0 || h->h_res.size() == 0 || h->h_int.size() == 0)
      throw ShapeError("grand system: all three Hamiltonians are required");
    check_hamiltonian(h->h_sys, g.d_sys, "h_sys");
    check_hamiltonian(h->h_res, g.d_res, "h_res");
    check_hamiltonian(h->h_int, d, "h_int");
  } else {
    const auto& u = std::get<UnitaryEvolution>(g.evolution);
    if (u.unitary.rows() != d || u.unitary.cols() != d)
      throw ShapeError("grand system: unitary must be " + std::to_string(d) + "x" +
                       std::to_string(d));
    require_finite(u.unitary, "unitary");
    if (unitarity_defect(u.unitary) > kUnitaryTol)
      throw ValidationError("grand system: evolution operator is not unitary");
    check_hamiltonian(u.h_sys, g.d_sys, "h_sys");
    check_hamiltonian(u.h_res, g.d_res, "h_res");
  }
}

ComplexMatrix total_hamiltonian(const GrandSystem& g) {
  validate(g);
  const auto* h = std::get_if<HamiltonianEvolution>(&g.evolution);
  if (h == nullptr)
    throw ValidationError("total_hamiltonian: system is specified by a unitary");
  return kron(h->h_sys, identity(g.d_res)) + kron(identity(g.d_sys), h->h_res) +
         h->h_int;
}

FreeEvolution free_evolution(const GrandSystem& g) {
  return std::visit(
      [&](const auto& e) {
        return FreeEvolution{free_unitary(e.h_sys, g.d_sys, e.t),
                             free_unitary(e.h_res, g.d_res, e.t)};
      },
      g.evolution);
}

ComplexMatrix total_unitary(const GrandSystem& g) {
  validate(g);
  if (std::holds_alternative<HamiltonianEvolution>(g.evolution))
    return unitary_exp(total_hamiltonian(g), g.time());
  const auto& u = std::get<UnitaryEvolution>(g.evolution);
  if (u.kind == UnitaryKind::Total) return u.unitary;
  const FreeEvolution f = free_evolution(g);
  return kron(f.u_sys, f.u_res) * u.unitary;
}

ComplexMatrix interaction_unitary(const GrandSystem& g) {
  validate(g);
  if (const auto* u = std::get_if<UnitaryEvolution>(&g.evolution);
      u != nullptr && u->kind == UnitaryKind::Interaction)
    return u->unitary;
  const FreeEvolution f = free_evolution(g);
  return kron(f.u_sys, f.u_res).adjoint() * total_unitary(g);
}

InteractionBlocks::InteractionBlocks(Index d_sys, Index d_res,
                                     std::vector<ComplexMatrix> blocks)
    : d_sys_(d_sys), d_res_(d_res), blocks_(std::move(blocks)) {
  if (d_sys <= 0 || d_res <= 0 ||
      blocks_.size() != static_cast<std::size_t>(d_sys * d_sys))
    throw ShapeError("interaction blocks: expected d_sys^2 blocks");
  for (const auto& b : blocks_)
    if (b.rows() != d_res || b.cols() != d_res)
      throw ShapeError("interaction blocks: block must be d_res x d_res");
}

double InteractionBlocks::left_completeness_residual() const {
  double worst = 0.0;
  for (Index i = 0; i < d_sys_; ++i)
    for (Index j = 0; j < d_sys_; ++j) {
      ComplexMatrix s = ComplexMatrix::Zero(d_res_, d_res_);
      for (Index k = 0; k < d_sys_; ++k) s += at(k, i).adjoint() * at(k, j);
      if (i == j) s -= identity(d_res_);
      worst = std::max(worst, s.norm());
    }
  return worst;
}

double InteractionBlocks::right_completeness_residual() const {
  double worst = 0.0;
  for (Index k = 0; k < d_sys_; ++k)
    for (Index kp = 0; kp < d_sys_; ++kp) {
      ComplexMatrix s = ComplexMatrix::Zero(d_res_, d_res_);
      for (Index i = 0; i < d_sys_; ++i) s += at(k, i) * at(kp, i).adjoint();
      if (k == kp) s -= identity(d_res_);
      worst = std::max(worst, s.norm());
    }
  return worst;
}

InteractionBlocks extract_blocks(const ComplexMatrix& u_int,
                                 const ComplexMatrix& basis_psi, Index d_sys,
                                 Index d_res) {
  if (d_sys <= 0 || d_res <= 0 || u_int.rows() != d_sys * d_res ||
      u_int.cols() != d_sys * d_res)
    throw ShapeError("extract_blocks: operator does not act on the composite space");
  const ComplexMatrix basis = basis_psi.size() == 0 ? identity(d_sys) : basis_psi;
  if (basis.rows() != d_sys || basis.cols() != d_sys)
    throw ShapeError("extract_blocks: basis must be d_sys x d_sys");

  // (B (x) 1)^dagger U (B (x) 1): block (k, i) is <psi_k| U |psi_i>.
  const ComplexMatrix lift = kron(basis, identity(d_res));
  const ComplexMatrix rotated = lift.adjoint() * u_int * lift;
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(d_sys * d_sys));
  for (Index k = 0; k < d_sys; ++k)
    for (Index i = 0; i < d_sys; ++i)
      blocks.emplace_back(rotated.block(k * d_res, i * d_res, d_res, d_res));

  InteractionBlocks out(d_sys, d_res, std::move(blocks));
  const double left = out.left_completeness_residual();
  const double right = out.right_completeness_residual();
  if (left > kBlockConsistencyTol || right > kBlockConsistencyTol)
    throw InconsistentInputError("extract_blocks: completeness residual " +
                                 std::to_string(std::max(left, right)) +
                                 "; operator is not unitary");
  return out;
}

ReservoirState::ReservoirState(DensityMatrix pi0)
    : pi0_(std::move(pi0)), spectrum_(eig_hermitian(pi0_.matrix())) {
  if (spectrum_.eigenvalues(0) < -kPopulationCutoff)
    throw NotAStateError("reservoir state: eigenvalue " +
                         std::to_string(spectrum_.eigenvalues(0)));
  if (std::abs(spectrum_.eigenvalues.sum() - 1.0) > 1e-10)
    throw NotAStateError("reservoir state: populations do not sum to one");
  for (Index n = 0; n < spectrum_.eigenvalues.size(); ++n)
    if (spectrum_.eigenvalues(n) > kPopulationCutoff) populated_.push_back(n);
}

}  // namespace qht
