#include "pnm/quantum.hpp"

#include <cmath>

#include "pnm/errors.hpp"

namespace pnm {

CMatrix tensor(const CMatrix& a, const CMatrix& b, std::size_t max_dim) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw ContractViolation("tensor: operands must be square");
  }
  const std::size_t dim = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  if (dim > max_dim) {
    throw DimensionError("tensor: dimension " + std::to_string(dim) + " exceeds limit " +
                         std::to_string(max_dim));
  }
  const Eigen::Index na = a.rows();
  const Eigen::Index nb = b.rows();
  CMatrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

double hermiticity_error(const CMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

bool is_hermitian(const CMatrix& m, double tol) { return hermiticity_error(m) <= tol; }

RVector hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian eigensolve failed");
  return es.eigenvalues();
}

FockSpace::FockSpace(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw ContractViolation("FockSpace: n_max must be non-negative");
}

CMatrix FockSpace::annihilation() const {
  CMatrix a = CMatrix::Zero(dim(), dim());
  for (int n = 1; n <= n_max_; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix FockSpace::creation() const { return annihilation().adjoint(); }

CMatrix FockSpace::number() const {
  CMatrix m = CMatrix::Zero(dim(), dim());
  for (int n = 0; n <= n_max_; ++n) m(n, n) = static_cast<double>(n);
  return m;
}

CMatrix FockSpace::projector(int n) const {
  if (n < 0 || n > n_max_) throw ContractViolation("FockSpace::projector: level out of range");
  CMatrix m = CMatrix::Zero(dim(), dim());
  m(n, n) = 1.0;
  return m;
}

DensityCheck check_density(const CMatrix& rho) {
  DensityCheck c;
  c.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
  c.hermiticity_error = hermiticity_error(rho);
  c.min_eigenvalue = hermitian_eigenvalues(hermitize(rho))(0);
  return c;
}

DensityMatrix::DensityMatrix(CMatrix op, std::string label)
    : op_(std::move(op)), label_(std::move(label)) {
  if (op_.rows() != op_.cols() || op_.rows() == 0) {
    throw ContractViolation("DensityMatrix: operator must be square and non-empty");
  }
  if (hermiticity_error(op_) > 1e-10) {
    throw ContractViolation("DensityMatrix: operator is not Hermitian");
  }
  if (std::abs(op_.trace() - cplx(1.0, 0.0)) > 1e-8) {
    throw ContractViolation("DensityMatrix: trace differs from one");
  }
}

DensityMatrix DensityMatrix::pure(const CVector& psi, std::string label) {
  const double nrm = psi.norm();
  if (nrm == 0.0) throw ContractViolation("DensityMatrix::pure: zero vector");
  const CVector v = psi / nrm;
  return DensityMatrix(v * v.adjoint(), std::move(label));
}

DensityMatrix DensityMatrix::basis(int dim, int k, std::string label) {
  if (k < 0 || k >= dim) throw ContractViolation("DensityMatrix::basis: index out of range");
  CMatrix m = CMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityMatrix(std::move(m), std::move(label));
}

CMatrix partial_trace_phonon(const CMatrix& rho, int sys_dim, int fock_dim) {
  if (rho.rows() != rho.cols() || rho.rows() != static_cast<Eigen::Index>(sys_dim) * fock_dim) {
    throw ContractViolation("partial_trace_phonon: dimension mismatch");
  }
  CMatrix out = CMatrix::Zero(sys_dim, sys_dim);
  for (int i = 0; i < sys_dim; ++i) {
    for (int j = 0; j < sys_dim; ++j) {
      cplx s = 0.0;
      for (int n = 0; n < fock_dim; ++n) s += rho(i * fock_dim + n, j * fock_dim + n);
      out(i, j) = s;
    }
  }
  return out;
}

DensityMatrix partial_trace_phonon(const DensityMatrix& rho, const FockSpace& fock) {
  if (rho.dim() != 4 * fock.dim()) {
    throw ContractViolation("partial_trace_phonon: expected dimension 4*(n_max+1)");
  }
  return DensityMatrix(partial_trace_phonon(rho.op(), 4, fock.dim()), rho.label());
}

double trace_distance(const CMatrix& r1, const CMatrix& r2) {
  if (r1.rows() != r2.rows() || r1.cols() != r2.cols()) {
    throw ContractViolation("trace_distance: dimension mismatch");
  }
  if (hermiticity_error(r1) > 1e-10 || hermiticity_error(r2) > 1e-10) {
    throw ContractViolation("trace_distance: inputs must be Hermitian");
  }
  const RVector ev = hermitian_eigenvalues(hermitize(r1 - r2));
  return 0.5 * ev.cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2) {
  return trace_distance(r1.op(), r2.op());
}

}  // namespace pnm
