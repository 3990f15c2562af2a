#pragma once

// Dense complex linear algebra used throughout the library.
//
// Composite spaces are always ordered system (x) reservoir and flattened
// system-major: the composite index of (a, r) is a * d_res + r. Units are
// hbar = 1 and k_B = 1, so entropies are in nats.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace qht {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigenvalues ascending; eigenvectors stored as orthonormal columns.
struct HermitianSpectrum {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

enum class TraceOut { System, Reservoir };

ComplexMatrix identity(Index d);
ComplexMatrix zeros(Index rows, Index cols);
/// E_ij: one in entry (i, j), zero elsewhere.
ComplexMatrix matrix_unit(Index d, Index i, Index j);
ComplexMatrix basis_vector_matrix(Index d, Index i);

bool all_finite(const ComplexMatrix& m);
void require_finite(const ComplexMatrix& m, const char* what);
void require_square(const ComplexMatrix& m, const char* what);

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_trace(const ComplexMatrix& m, Index d_sys, Index d_res,
                            TraceOut which);

double frobenius(const ComplexMatrix& m);
double max_abs_entry(const ComplexMatrix& m);
/// ||m - m^dagger||_F
double hermiticity_residual(const ComplexMatrix& m);
/// ||u^dagger u - 1||_F
double unitarity_defect(const ComplexMatrix& u);
bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-9);

/// Throws ValidationError unless ||m - m^dagger||_F <= 1e-9 (1 + ||m||_F).
HermitianSpectrum eig_hermitian(const ComplexMatrix& m);

/// exp(-i t h) evaluated on the spectrum of h.
ComplexMatrix unitary_exp(const ComplexMatrix& h, double t);

/// Q diag(f(lambda)) Q^dagger for a real-valued spectral function.
template <typename F>
ComplexMatrix spectral_apply(const HermitianSpectrum& s, F&& f) {
  const Index d = s.eigenvalues.size();
  ComplexVector values(d);
  for (Index i = 0; i < d; ++i) values(i) = f(s.eigenvalues(i));
  return s.eigenvectors * values.asDiagonal() * s.eigenvectors.adjoint();
}

/// A validated state: Hermitian, positive semidefinite, unit trace.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-9;

  /// Validates and Hermitizes. Throws NotAStateError / ShapeError.
  static DensityMatrix from_matrix(const ComplexMatrix& m);
  static DensityMatrix maximally_mixed(Index d);
  static DensityMatrix pure(const ComplexVector& psi);

  const ComplexMatrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
};

/// -sum lambda ln lambda over the spectrum; round-off negatives are treated as
/// zero, eigenvalues below -1e-9 raise NotAStateError.
double entropy_vn(const DensityMatrix& rho);
double entropy_vn(const ComplexMatrix& rho);

}  // namespace qht
