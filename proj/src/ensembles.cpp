#include "qht/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qht/errors.hpp"

namespace qht {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

SeededGenerator::SeededGenerator(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
  std::uint64_t key = master_seed;
  std::uint64_t mixed = splitmix64(key) ^ stream_id;
  mixed = splitmix64(mixed);
  std::uint64_t sm = mixed;
  for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t SeededGenerator::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SeededGenerator::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededGenerator::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Complex SeededGenerator::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::int64_t SeededGenerator::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ValidationError("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return lo + static_cast<std::int64_t>(x % span);
}

ComplexMatrix ginibre(SeededGenerator& gen, Index rows, Index cols) {
  ComplexMatrix g(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) g(i, j) = gen.complex_normal();
  return g;
}

ComplexMatrix haar_unitary(SeededGenerator& gen, Index d) {
  if (d <= 0) throw ShapeError("haar_unitary: dimension must be positive");
  const ComplexMatrix z = ginibre(gen, d, d);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    const Complex phase = mag > 0.0 ? r(j, j) / mag : Complex(1.0);
    q.col(j) *= phase;
  }
  return q;
}

ComplexMatrix random_hermitian(SeededGenerator& gen, Index d, double scale) {
  const ComplexMatrix g = ginibre(gen, d, d);
  return scale * 0.5 * (g + g.adjoint());
}

DensityMatrix random_density(SeededGenerator& gen, Index d, Index rank, bool equal_weights) {
  if (d <= 0 || rank < 1 || rank > d)
    throw ValidationError("random_density: rank " + std::to_string(rank) +
                          " outside [1, " + std::to_string(d) + "]");
  ComplexMatrix rho;
  if (equal_weights) {
    const ComplexMatrix u = haar_unitary(gen, d);
    const ComplexMatrix v = u.leftCols(rank);
    rho = v * v.adjoint() / static_cast<double>(rank);
  } else {
    const ComplexMatrix g = ginibre(gen, d, rank);
    rho = g * g.adjoint();
    rho /= rho.trace().real();
  }
  return DensityMatrix::from_matrix(0.5 * (rho + rho.adjoint()));
}

ComplexMatrix controlled_interaction(const std::vector<ComplexMatrix>& reservoir_unitaries,
                                     const ComplexMatrix& basis_psi) {
  const Index d_sys = static_cast<Index>(reservoir_unitaries.size());
  if (d_sys == 0) throw ShapeError("controlled_interaction: no reservoir unitaries");
  const Index d_res = reservoir_unitaries.front().rows();
  const ComplexMatrix basis = basis_psi.size() == 0 ? identity(d_sys) : basis_psi;
  if (basis.rows() != d_sys || basis.cols() != d_sys)
    throw ShapeError("controlled_interaction: basis dimension mismatch");
  ComplexMatrix u = ComplexMatrix::Zero(d_sys * d_res, d_sys * d_res);
  for (Index k = 0; k < d_sys; ++k) {
    const ComplexMatrix& w = reservoir_unitaries[static_cast<std::size_t>(k)];
    if (w.rows() != d_res || w.cols() != d_res)
      throw ShapeError("controlled_interaction: reservoir unitaries differ in dimension");
    const ComplexVector psi = basis.col(k);
    u += kron(psi * psi.adjoint(), w);
  }
  return u;
}

ComplexMatrix controlled_interaction(SeededGenerator& gen, Index d_sys, Index d_res,
                                     const ComplexMatrix& basis_psi) {
  std::vector<ComplexMatrix> w;
  w.reserve(static_cast<std::size_t>(d_sys));
  for (Index k = 0; k < d_sys; ++k) w.push_back(haar_unitary(gen, d_res));
  return controlled_interaction(w, basis_psi);
}

ComplexMatrix swap_unitary(Index d) {
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
  return s;
}

DemonInstance demon_instance() {
  return {swap_unitary(2), ReservoirState(DensityMatrix::from_matrix(matrix_unit(2, 0, 0)))};
}

Family parse_family(std::string_view name) {
  if (name == "haar") return Family::Haar;
  if (name == "controlled") return Family::Controlled;
  if (name == "demon") return Family::Demon;
  throw ValidationError("unknown family '" + std::string(name) +
                        "' (expected haar, controlled or demon)");
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Haar: return "haar";
    case Family::Controlled: return "controlled";
    case Family::Demon: return "demon";
  }
  return "unknown";
}

Instance sample_instance(Family family, SeededGenerator& gen, Index d_sys, Index d_res) {
  if (family == Family::Demon) {
    if (d_sys != 2 || d_res != 2)
      throw ValidationError("the demon instance is defined for a qubit and a qubit reservoir");
    DemonInstance demon = demon_instance();
    GrandSystem g{2, 2, UnitaryEvolution{UnitaryKind::Total, demon.u_t, {}, {}, 0.0}, {}};
    return {std::move(g), std::move(demon.res)};
  }
  if (d_sys <= 0 || d_res <= 0)
    throw ShapeError("sample_instance: dimensions must be positive");

  const double t = 0.1 + 2.0 * gen.uniform();
  ComplexMatrix h_sys = random_hermitian(gen, d_sys);
  ComplexMatrix h_res = random_hermitian(gen, d_res);
  ComplexMatrix basis;
  ComplexMatrix u_int;
  Index rank = d_res;
  if (family == Family::Haar) {
    u_int = haar_unitary(gen, d_sys * d_res);
  } else {
    basis = haar_unitary(gen, d_sys);
    u_int = controlled_interaction(gen, d_sys, d_res, basis);
    rank = gen.uniform_int(1, d_res);
  }
  DensityMatrix pi0 = random_density(gen, d_res, rank);
  GrandSystem g{d_sys, d_res,
                UnitaryEvolution{UnitaryKind::Interaction, std::move(u_int),
                                 std::move(h_sys), std::move(h_res), t},
                std::move(basis)};
  return {std::move(g), ReservoirState(std::move(pi0))};
}

}  // namespace qht
