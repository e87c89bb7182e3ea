#include "pnm/siv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pnm/errors.hpp"

namespace pnm {

namespace {

constexpr double kHbar = 1.054571817e-34;
constexpr double kSoundSpeed = 1.2e4;
constexpr double kDiamondDensity = 3500.0;

CMatrix spin_op(int axis) {
  switch (axis) {
    case 0: return 0.5 * pauli_x();
    case 1: return 0.5 * pauli_y();
    default: return 0.5 * pauli_z();
  }
}

}  // namespace

Field Field::spherical(double b, double theta, double phi) {
  return {b * std::cos(phi) * std::sin(theta), b * std::sin(phi) * std::sin(theta),
          b * std::cos(theta)};
}

double SivParams::upsilon() const { return std::hypot(gamma_x, gamma_y); }

double SivParams::delta() const { return std::hypot(lambda, upsilon()); }

double SivParams::delta_plus() const {
  const double u = upsilon();
  return std::hypot(lambda + 2.0 * f * gamma_L() * B.bz, u);
}

double SivParams::delta_minus() const {
  const double u = upsilon();
  return std::hypot(lambda - 2.0 * f * gamma_L() * B.bz, u);
}

void SivParams::validate() const {
  if (!(lambda > 0.0)) throw ContractViolation("SivParams: lambda must be positive");
  if (!std::isfinite(gamma_x) || !std::isfinite(gamma_y)) {
    throw ContractViolation("SivParams: Jahn-Teller couplings must be finite");
  }
  if (!(gamma_s > 0.0)) throw ContractViolation("SivParams: gamma_s must be positive");
  if (!std::isfinite(B.bx) || !std::isfinite(B.by) || !std::isfinite(B.bz)) {
    throw ContractViolation("SivParams: field must be finite");
  }
}

double PhononModeParams::g_abs() const { return std::hypot(g1, g2); }

double PhononModeParams::theta_g() const { return std::atan2(g2, g1); }

void PhononModeParams::validate() const {
  if (!(omega_ph > 0.0)) throw ContractViolation("PhononModeParams: omega_ph must be positive");
  if (!(Q > 0.0)) throw ContractViolation("PhononModeParams: Q must be positive");
  if (temperature < 0.0) throw ContractViolation("PhononModeParams: negative temperature");
  if (n_max < 0) throw ContractViolation("PhononModeParams: n_max must be non-negative");
}

std::vector<std::string> PhononModeParams::regime_warnings() const {
  std::vector<std::string> out;
  if (g_abs() > 0.3 * omega_ph) out.emplace_back("|g| > 0.3 omega_ph: weak-coupling picture breaks down");
  if (g_abs() <= gamma_ph()) out.emplace_back("|g| <= gamma_ph: coherent exchange is overdamped");
  return out;
}

EnergySpectrum eigensystem(const CMatrix& h, const CMatrix* reference, double degeneracy_tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(h));
  if (es.info() != Eigen::Success) throw NumericalError("eigensystem: eigensolve failed");
  EnergySpectrum s{es.eigenvalues(), es.eigenvectors()};
  if (reference == nullptr) return s;
  if (reference->rows() != h.rows()) throw ContractViolation("eigensystem: reference dimension");

  const Eigen::Index n = h.rows();
  const double scale = std::max(1.0, s.energies.cwiseAbs().maxCoeff());
  std::vector<bool> used(static_cast<std::size_t>(reference->cols()), false);
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && s.energies(end) - s.energies(end - 1) < degeneracy_tol * scale) ++end;
    const Eigen::Index k = end - start;
    if (k > 1) {
      const CMatrix v = s.states.middleCols(start, k);
      // Pick the k reference vectors with the largest weight inside the
      // cluster subspace, then take the closest unitary rotation (polar part).
      const CMatrix proj = v.adjoint() * (*reference);
      std::vector<Eigen::Index> order(static_cast<std::size_t>(reference->cols()));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return proj.col(a).squaredNorm() > proj.col(b).squaredNorm();
      });
      std::vector<Eigen::Index> pick;
      for (Eigen::Index idx : order) {
        if (!used[static_cast<std::size_t>(idx)]) pick.push_back(idx);
        if (static_cast<Eigen::Index>(pick.size()) == k) break;
      }
      std::sort(pick.begin(), pick.end());
      CMatrix m(k, k);
      for (Eigen::Index j = 0; j < k; ++j) m.col(j) = proj.col(pick[static_cast<std::size_t>(j)]);
      Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const CMatrix w = svd.matrixU() * svd.matrixV().adjoint();
      s.states.middleCols(start, k) = v * w;
      for (Eigen::Index idx : pick) used[static_cast<std::size_t>(idx)] = true;
    }
    start = end;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const CVector ov = reference->adjoint() * s.states.col(j);
    Eigen::Index best = 0;
    ov.cwiseAbs().maxCoeff(&best);
    const double mag = std::abs(ov(best));
    if (mag > 0.0) s.states.col(j) *= std::conj(ov(best)) / mag;
  }
  return s;
}

CMatrix build_siv_hamiltonian(const SivParams& p) {
  p.validate();
  const CMatrix i2 = identity(2);
  const CMatrix lz = pauli_y();
  CMatrix h = -p.lambda * tensor(lz, spin_op(2));
  h += tensor(0.5 * (p.gamma_x * pauli_z() - p.gamma_y * pauli_x()), i2);
  h += p.f * p.gamma_L() * p.B.bz * tensor(lz, i2);
  h += p.gamma_s * tensor(i2, p.B.bx * spin_op(0) + p.B.by * spin_op(1) + p.B.bz * spin_op(2));
  return h;
}

CMatrix label_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  CVector ep(2), em(2), up(2), dn(2);
  ep << r, cplx(0.0, r);
  em << r, cplx(0.0, -r);
  up << 1.0, 0.0;
  dn << 0.0, 1.0;
  auto kron = [](const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
  };
  CMatrix u(4, 4);
  u.col(0) = kron(em, dn);
  u.col(1) = kron(ep, up);
  u.col(2) = kron(ep, dn);
  u.col(3) = kron(em, up);
  return u;
}

std::array<double, 4> eigenenergies_longitudinal(const SivParams& p) {
  p.validate();
  if (p.B.bx != 0.0 || p.B.by != 0.0) {
    throw ContractViolation("eigenenergies_longitudinal: transverse field component present");
  }
  const double zs = p.gamma_s * p.B.bz;
  const double dp = p.delta_plus();
  const double dm = p.delta_minus();
  return {0.5 * (-zs - dp), 0.5 * (zs - dm), 0.5 * (-zs + dp), 0.5 * (zs + dm)};
}

CMatrix siv_label_hamiltonian(const SivParams& p, SivForm form) {
  if (form == SivForm::kExact) {
    const CMatrix u = label_basis();
    return hermitize(u.adjoint() * build_siv_hamiltonian(p) * u);
  }
  if (p.B.by != 0.0) {
    throw ContractViolation("siv_label_hamiltonian: closed form requires B_y = 0");
  }
  SivParams lon = p;
  lon.B.bx = 0.0;
  const auto e = eigenenergies_longitudinal(lon);
  CMatrix h = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) h(i, i) = e[static_cast<std::size_t>(i)];
  const double half_bx = 0.5 * p.gamma_s * p.B.bx;
  h(0, 3) = h(3, 0) = half_bx;
  h(1, 2) = h(2, 1) = half_bx;
  return h;
}

CMatrix orbital_raising() {
  CMatrix lp = CMatrix::Zero(4, 4);
  lp(2, 0) = 1.0;
  lp(1, 3) = 1.0;
  return lp;
}

CMatrix siv_lowering_jump() {
  CMatrix j = CMatrix::Zero(4, 4);
  j(0, 2) = 1.0;
  j(1, 3) = 1.0;
  return j;
}

CMatrix build_full_hamiltonian(const SivParams& p, const PhononModeParams& m, SivForm form) {
  m.validate();
  if (m.n_max < 1) throw ContractViolation("build_full_hamiltonian: n_max must be >= 1");
  const FockSpace fock(m.n_max);
  const CMatrix c = fock.annihilation();
  const CMatrix x = c + c.adjoint();
  const CMatrix lp = orbital_raising();
  const CMatrix lm = lp.adjoint();
  const CMatrix coupling = m.g1 * (lm + lp) - cplx(0.0, m.g2) * (lm - lp);
  CMatrix h = tensor(siv_label_hamiltonian(p, form), identity(fock.dim()));
  h += m.omega_ph * tensor(identity(4), fock.number());
  h += tensor(coupling, x);
  return hermitize(h);
}

CMatrix build_transverse_hamiltonian(const SivParams& p, const PhononModeParams& m) {
  if (p.B.by != 0.0) throw ContractViolation("build_transverse_hamiltonian: B_y must be zero");
  return build_full_hamiltonian(p, m, SivForm::kClosedForm);
}

std::array<int, 2> manifold_levels(Manifold manifold) {
  return manifold == Manifold::kH1 ? std::array<int, 2>{0, 2} : std::array<int, 2>{1, 3};
}

RabiParams rabi_params(const SivParams& p, const PhononModeParams& m, Manifold manifold) {
  m.validate();
  const auto e = eigenenergies_longitudinal(p);
  const auto lv = manifold_levels(manifold);
  RabiParams r;
  r.omega_s = e[static_cast<std::size_t>(lv[1])] - e[static_cast<std::size_t>(lv[0])];
  r.omega_ph = m.omega_ph;
  r.g = m.g();
  r.n_max = m.n_max;
  return r;
}

namespace {

// Two-level operators in the {|g>, |e>} ordering.
CMatrix sz_eff() {
  CMatrix s = CMatrix::Zero(2, 2);
  s(0, 0) = -1.0;
  s(1, 1) = 1.0;
  return s;
}

CMatrix sp_eff() {
  CMatrix s = CMatrix::Zero(2, 2);
  s(1, 0) = 1.0;
  return s;
}

}  // namespace

CMatrix effective_rabi(const SivParams& p, const PhononModeParams& m, Manifold manifold) {
  return effective_rabi(rabi_params(p, m, manifold));
}

CMatrix effective_rabi(const RabiParams& r) {
  const FockSpace fock(r.n_max);
  const CMatrix c = fock.annihilation();
  const CMatrix sp = sp_eff();
  CMatrix h = 0.5 * r.omega_s * tensor(sz_eff(), identity(fock.dim()));
  h += r.omega_ph * tensor(identity(2), fock.number());
  h += tensor(std::conj(r.g) * sp + r.g * sp.adjoint(), c + c.adjoint());
  return hermitize(h);
}

CMatrix canonicalize_rabi(const RabiParams& r) {
  const FockSpace fock(r.n_max);
  const CMatrix c = fock.annihilation();
  const CMatrix x = c + c.adjoint();
  const CMatrix num = fock.number();
  const int d = fock.dim();
  const double ga = std::abs(r.g);
  CMatrix h = CMatrix::Zero(2 * d, 2 * d);
  h.block(0, 0, d, d) = r.omega_ph * num + ga * x;
  h.block(d, d, d, d) = r.omega_ph * num - ga * x;
  h.block(0, d, d, d) = 0.5 * r.omega_s * identity(d);
  h.block(d, 0, d, d) = 0.5 * r.omega_s * identity(d);
  return h;
}

CMatrix jaynes_cummings(const RabiParams& r) {
  const FockSpace fock(r.n_max);
  const CMatrix c = fock.annihilation();
  const CMatrix sp = sp_eff();
  const double theta = std::arg(r.g);
  const cplx ph = std::polar(1.0, theta);
  CMatrix h = 0.5 * r.omega_s * tensor(sz_eff(), identity(fock.dim()));
  h += r.omega_ph * tensor(identity(2), fock.number());
  h += std::abs(r.g) * (ph * tensor(sp, c) + std::conj(ph) * tensor(sp.adjoint(), c.adjoint()));
  return hermitize(h);
}

CMatrix excitation_number(int n_max) {
  const FockSpace fock(n_max);
  return 0.5 * tensor(sz_eff(), identity(fock.dim())) + tensor(identity(2), fock.number());
}

double estimate_phonon_coupling(double d, double l, double w, double t, double omega_ph) {
  if (!(d > 0.0 && l > 0.0 && w > 0.0 && t > 0.0 && omega_ph > 0.0)) {
    throw ContractViolation("estimate_phonon_coupling: inputs must be positive");
  }
  return d / kSoundSpeed * std::sqrt(kHbar * omega_ph / (2.0 * kDiamondDensity * l * w * t));
}

double bose_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) throw DomainError("bose_occupation: omega must be positive");
  if (temperature < 0.0) throw DomainError("bose_occupation: negative temperature");
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(units::kHbarOverKb * omega / temperature);
}

}  // namespace pnm
