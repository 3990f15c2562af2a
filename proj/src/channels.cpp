#include "qht/channels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qht/errors.hpp"

namespace qht {

namespace {

constexpr double kUnitaryTol = 1e-9;
constexpr double kSupportCutoff = 1e-12;
constexpr double kSupportMassTol = 1e-9;
constexpr double kEvidenceMismatchTol = 1e-6;

}  // namespace

ChannelKraus::ChannelKraus(Index d_sys, std::vector<ComplexMatrix> kraus_ops)
    : d_sys_(d_sys) {
  if (d_sys <= 0) throw ShapeError("channel: dimension must be positive");
  for (auto& k : kraus_ops) {
    if (k.rows() != d_sys || k.cols() != d_sys)
      throw ShapeError("channel: Kraus operator must be " + std::to_string(d_sys) +
                       "x" + std::to_string(d_sys));
    require_finite(k, "Kraus operator");
    if (k.norm() >= kNegligibleWeight) kraus_.push_back(std::move(k));
  }
  if (kraus_.empty()) throw ValidationError("channel: no non-negligible Kraus operator");
  const double residual = completeness_residual();
  if (residual > kCompletenessTol)
    throw ValidationError("channel: Kraus completeness residual " +
                          std::to_string(residual));
}

ChannelKraus ChannelKraus::identity_channel(Index d) {
  return ChannelKraus(d, {identity(d)});
}

ChannelKraus ChannelKraus::unitary_channel(const ComplexMatrix& u) {
  require_square(u, "unitary_channel");
  return ChannelKraus(u.rows(), {u});
}

double ChannelKraus::completeness_residual() const {
  ComplexMatrix s = ComplexMatrix::Zero(d_sys_, d_sys_);
  for (const auto& k : kraus_) s += k.adjoint() * k;
  return (s - identity(d_sys_)).norm();
}

double ChoiMatrix::min_eigenvalue() const {
  return eig_hermitian(matrix).eigenvalues(0);
}

ChannelKraus channel_from_evolution(const ComplexMatrix& u_t,
                                    const ReservoirState& res, Index d_sys,
                                    Index d_res) {
  const Index d = d_sys * d_res;
  if (d_sys <= 0 || d_res <= 0 || u_t.rows() != d || u_t.cols() != d)
    throw ShapeError("channel_from_evolution: evolution does not act on the composite space");
  if (res.dim() != d_res)
    throw ShapeError("channel_from_evolution: reservoir state has dimension " +
                     std::to_string(res.dim()));
  require_finite(u_t, "channel_from_evolution");
  if (unitarity_defect(u_t) > kUnitaryTol)
    throw ValidationError("channel_from_evolution: evolution is not unitary");

  std::vector<ComplexMatrix> ops;
  for (const Index n : res.populated()) {
    const double amplitude = std::sqrt(res.weight(n));
    // Columns b of U (|b> (x) |n>).
    const ComplexMatrix lifted =
        u_t * kron(identity(d_sys), ComplexMatrix(res.eigenvector(n)));
    for (Index m = 0; m < d_res; ++m) {
      ComplexMatrix k(d_sys, d_sys);
      for (Index a = 0; a < d_sys; ++a) k.row(a) = lifted.row(a * d_res + m);
      ops.push_back(amplitude * k);
    }
  }
  return ChannelKraus(d_sys, std::move(ops));
}

ComplexMatrix apply_linear(const ChannelKraus& ch, const ComplexMatrix& m) {
  if (m.rows() != ch.d_sys() || m.cols() != ch.d_sys())
    throw ShapeError("apply: operator dimension does not match the channel");
  ComplexMatrix out = ComplexMatrix::Zero(ch.d_sys(), ch.d_sys());
  for (const auto& k : ch.kraus_ops()) out += k * m * k.adjoint();
  return out;
}

DensityMatrix apply(const ChannelKraus& ch, const DensityMatrix& rho) {
  return DensityMatrix::from_matrix(apply_linear(ch, rho.matrix()));
}

ChannelKraus compose(const ChannelKraus& later, const ChannelKraus& earlier) {
  if (later.d_sys() != earlier.d_sys())
    throw ShapeError("compose: channels act on different dimensions");
  std::vector<ComplexMatrix> ops;
  ops.reserve(later.kraus_ops().size() * earlier.kraus_ops().size());
  for (const auto& kl : later.kraus_ops())
    for (const auto& ke : earlier.kraus_ops()) ops.push_back(kl * ke);
  const Index d = later.d_sys();
  ChannelKraus product(d, std::move(ops));
  if (static_cast<Index>(product.kraus_ops().size()) <= d * d) return product;
  return canonical_kraus(product);
}

ChannelKraus canonical_kraus(const ChannelKraus& ch) {
  const Index d = ch.d_sys();
  // J[(a,i),(b,j)] = sum_K K_ai conj(K_bj), so each eigenvector reshapes to an operator.
  const ComplexMatrix j = choi(ch).matrix;
  const HermitianSpectrum s = eig_hermitian(0.5 * (j + j.adjoint()));
  const double largest = std::max(s.eigenvalues.maxCoeff(), 0.0);
  std::vector<ComplexMatrix> ops;
  for (Index e = 0; e < d * d; ++e) {
    const double lambda = s.eigenvalues(e);
    if (lambda <= 1e-14 * largest) continue;
    ComplexMatrix k(d, d);
    for (Index a = 0; a < d; ++a)
      for (Index i = 0; i < d; ++i) k(a, i) = std::sqrt(lambda) * s.eigenvectors(a * d + i, e);
    ops.push_back(std::move(k));
  }
  return ChannelKraus(d, std::move(ops));
}

ChoiMatrix choi(const ChannelKraus& ch) {
  const Index d = ch.d_sys();
  ComplexMatrix j = ComplexMatrix::Zero(d * d, d * d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b)
      j += kron(apply_linear(ch, matrix_unit(d, a, b)), matrix_unit(d, a, b));
  return {d, std::move(j)};
}

double choi_distance(const ChannelKraus& a, const ChannelKraus& b) {
  if (a.d_sys() != b.d_sys())
    throw ShapeError("choi_distance: channels act on different dimensions");
  return (choi(a).matrix - choi(b).matrix).norm();
}

ComplexMatrix commutator_matrix(const InteractionBlocks& blocks,
                                const ReservoirState& res) {
  if (res.dim() != blocks.d_res())
    throw InconsistentInputError("commutator_matrix: reservoir dimension mismatch");
  const Index d = blocks.d_sys();
  const ComplexMatrix& pi0 = res.pi0().matrix();
  ComplexMatrix c = ComplexMatrix::Zero(d, d);
  for (Index k = 0; k < d; ++k)
    for (Index kp = 0; kp < d; ++kp) {
      Complex sum = 0.0;
      for (Index i = 0; i < d; ++i) {
        const ComplexMatrix& v = blocks.at(k, i);
        const ComplexMatrix& vp = blocks.at(kp, i);
        sum += (pi0 * (vp.adjoint() * v - v * vp.adjoint())).trace();
      }
      c(k, kp) = sum;
    }
  return c;
}

UnitalityCertificate unitality(const ChannelKraus& ch) {
  UnitalityCertificate cert;
  cert.phi_of_one = apply_linear(ch, identity(ch.d_sys()));
  cert.defect_fro = (cert.phi_of_one - identity(ch.d_sys())).norm();
  return cert;
}

UnitalityCertificate unitality(const ChannelKraus& ch, const BlockEvidence& evidence) {
  const Index d = ch.d_sys();
  if (evidence.blocks.d_sys() != d || evidence.rotated_basis.rows() != d ||
      evidence.rotated_basis.cols() != d)
    throw InconsistentInputError("unitality: block evidence dimension mismatch");
  UnitalityCertificate cert = unitality(ch);
  ComplexMatrix c = commutator_matrix(evidence.blocks, evidence.reservoir);
  const ComplexMatrix& b = evidence.rotated_basis;
  const ComplexMatrix phi_rotated = b.adjoint() * cert.phi_of_one * b;
  const double agreement = max_abs_entry(phi_rotated - identity(d) - c);
  if (!(agreement <= kEvidenceMismatchTol))
    throw InconsistentInputError(
        "unitality: block evidence does not describe this channel (residual " +
        std::to_string(agreement) + ")");
  cert.commutator_matrix = std::move(c);
  cert.basis = b;
  cert.agreement_residual = agreement;
  return cert;
}

EntropyGain entropy_gain(const ChannelKraus& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.d_sys())
    throw ShapeError("entropy_gain: state dimension does not match the channel");
  const DensityMatrix out = apply(ch, rho);
  const HermitianSpectrum one = eig_hermitian(apply_linear(ch, identity(ch.d_sys())));

  double kernel_mass = 0.0;
  double bound = 0.0;
  for (Index j = 0; j < one.eigenvalues.size(); ++j) {
    const ComplexVector q = one.eigenvectors.col(j);
    const double weight = q.dot(out.matrix() * q).real();
    if (one.eigenvalues(j) > kSupportCutoff)
      bound -= weight * std::log(one.eigenvalues(j));
    else
      kernel_mass += weight;
  }
  if (kernel_mass > kSupportMassTol)
    throw NumericalInconsistencyError("entropy_gain: output has weight " +
                                      std::to_string(kernel_mass) +
                                      " outside the support of Phi(1)");
  return {entropy_vn(out) - entropy_vn(rho), bound};
}

}  // namespace qht
