#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <string>

namespace pnm {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultMaxDim = 4096;

// Composite spaces are ordered system (x) phonon: the system index is the
// slow index, the Fock index the fast one.
CMatrix tensor(const CMatrix& a, const CMatrix& b, std::size_t max_dim = kDefaultMaxDim);

CMatrix identity(int n);
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix commutator(const CMatrix& a, const CMatrix& b);

double hermiticity_error(const CMatrix& m);
CMatrix hermitize(const CMatrix& m);
bool is_hermitian(const CMatrix& m, double tol = 1e-12);

// Eigenvalues of a Hermitian matrix, ascending.
RVector hermitian_eigenvalues(const CMatrix& m);

class FockSpace {
 public:
  explicit FockSpace(int n_max);

  int n_max() const { return n_max_; }
  int dim() const { return n_max_ + 1; }

  CMatrix annihilation() const;
  CMatrix creation() const;
  CMatrix number() const;
  CMatrix projector(int n) const;

 private:
  int n_max_;
};

struct DensityCheck {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;

  bool ok(double trace_tol = 1e-9, double herm_tol = 1e-10, double pos_tol = 1e-8) const {
    return trace_error <= trace_tol && hermiticity_error <= herm_tol &&
           min_eigenvalue >= -pos_tol;
  }
};

DensityCheck check_density(const CMatrix& rho);

class DensityMatrix {
 public:
  // Validates trace and Hermiticity; positivity is left to check_density since
  // time-local generators may legitimately produce small negative eigenvalues.
  explicit DensityMatrix(CMatrix op, std::string label = {});

  static DensityMatrix pure(const CVector& psi, std::string label = {});
  static DensityMatrix basis(int dim, int k, std::string label = {});

  const CMatrix& op() const { return op_; }
  int dim() const { return static_cast<int>(op_.rows()); }
  const std::string& label() const { return label_; }
  DensityCheck check() const { return check_density(op_); }

 private:
  CMatrix op_;
  std::string label_;
};

CMatrix partial_trace_phonon(const CMatrix& rho, int sys_dim, int fock_dim);
DensityMatrix partial_trace_phonon(const DensityMatrix& rho, const FockSpace& fock);

// 1/2 * sum |eig(r1 - r2)|.
double trace_distance(const CMatrix& r1, const CMatrix& r2);
double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2);

}  // namespace pnm
