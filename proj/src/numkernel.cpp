#include "qht/numkernel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qht/errors.hpp"

namespace qht {

namespace {

constexpr double kHermitianTol = 1e-9;

std::string dims(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

ComplexMatrix zeros(Index rows, Index cols) {
  return ComplexMatrix::Zero(rows, cols);
}

ComplexMatrix matrix_unit(Index d, Index i, Index j) {
  ComplexMatrix e = ComplexMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

ComplexMatrix basis_vector_matrix(Index d, Index i) {
  ComplexMatrix v = ComplexMatrix::Zero(d, 1);
  v(i, 0) = 1.0;
  return v;
}

bool all_finite(const ComplexMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!all_finite(m))
    throw ValidationError(std::string(what) + ": non-finite entry");
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ShapeError(std::string(what) + ": expected a non-empty square matrix, got " +
                     dims(m));
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + dims(a) + " times " + dims(b));
  return a * b;
}

ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Index d_sys, Index d_res,
                            TraceOut which) {
  if (d_sys <= 0 || d_res <= 0 || m.rows() != m.cols() ||
      m.rows() != d_sys * d_res)
    throw ShapeError("partial_trace: " + dims(m) + " does not factor as " +
                     std::to_string(d_sys) + " x " + std::to_string(d_res));
  if (which == TraceOut::Reservoir) {
    ComplexMatrix out = ComplexMatrix::Zero(d_sys, d_sys);
    for (Index a = 0; a < d_sys; ++a)
      for (Index b = 0; b < d_sys; ++b)
        out(a, b) = m.block(a * d_res, b * d_res, d_res, d_res).trace();
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(d_res, d_res);
  for (Index a = 0; a < d_sys; ++a)
    out += m.block(a * d_res, a * d_res, d_res, d_res);
  return out;
}

double frobenius(const ComplexMatrix& m) { return m.norm(); }

double max_abs_entry(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const ComplexMatrix& m) {
  return (m - m.adjoint()).norm();
}

double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  return m.rows() == m.cols() &&
         hermiticity_residual(m) <= rel_tol * (1.0 + m.norm());
}

HermitianSpectrum eig_hermitian(const ComplexMatrix& m) {
  require_square(m, "eig_hermitian");
  require_finite(m, "eig_hermitian");
  if (!is_hermitian(m, kHermitianTol))
    throw ValidationError("eig_hermitian: matrix is not Hermitian (residual " +
                          std::to_string(hermiticity_residual(m)) + ")");
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NumericalInconsistencyError("eig_hermitian: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_exp(const ComplexMatrix& h, double t) {
  const HermitianSpectrum s = eig_hermitian(h);
  const Index d = s.eigenvalues.size();
  ComplexVector phases(d);
  for (Index i = 0; i < d; ++i)
    phases(i) = std::polar(1.0, -t * s.eigenvalues(i));
  return s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
}

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m) {
  require_square(m, "density matrix");
  require_finite(m, "density matrix");
  if (!is_hermitian(m, kTolerance))
    throw NotAStateError("density matrix is not Hermitian");
  ComplexMatrix sym = 0.5 * (m + m.adjoint());
  const double tr = sym.trace().real();
  if (std::abs(tr - 1.0) > kTolerance)
    throw NotAStateError("density matrix trace is " + std::to_string(tr));
  const HermitianSpectrum s = eig_hermitian(sym);
  if (s.eigenvalues(0) < -kTolerance)
    throw NotAStateError("density matrix has eigenvalue " +
                         std::to_string(s.eigenvalues(0)));
  return DensityMatrix(std::move(sym));
}

DensityMatrix DensityMatrix::maximally_mixed(Index d) {
  if (d <= 0) throw ShapeError("maximally_mixed: dimension must be positive");
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double n = psi.norm();
  if (psi.size() == 0 || !(n > 0.0) || !std::isfinite(n))
    throw NotAStateError("pure: vector must be non-zero and finite");
  const ComplexVector u = psi / n;
  return DensityMatrix(u * u.adjoint());
}

double entropy_vn(const ComplexMatrix& rho) {
  const HermitianSpectrum s = eig_hermitian(rho);
  double entropy = 0.0;
  for (Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double lambda = s.eigenvalues(i);
    if (lambda < -DensityMatrix::kTolerance)
      throw NotAStateError("entropy_vn: eigenvalue " + std::to_string(lambda));
    if (lambda <= 0.0) continue;
    entropy -= lambda * std::log(lambda);
  }
  return entropy;
}

double entropy_vn(const DensityMatrix& rho) { return entropy_vn(rho.matrix()); }

}  // namespace qht
