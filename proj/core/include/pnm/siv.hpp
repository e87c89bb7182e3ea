#pragma once

#include <array>
#include <string>
#include <vector>

#include "pnm/quantum.hpp"
#include "pnm/units.hpp"

namespace pnm {

struct Field {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;

  // B (cos(phi) sin(theta), sin(phi) sin(theta), cos(theta)).
  static Field spherical(double b, double theta, double phi);
  bool longitudinal() const { return bx == 0.0 && by == 0.0; }
};

// All frequencies are angular (rad/s), hbar = 1.
struct SivParams {
  double lambda = units::ghz(45.0);
  double gamma_x = units::ghz(1.0);
  double gamma_y = units::ghz(1.0);
  double f = 0.1;
  double gamma_s = units::kGammaSpin;
  Field B{};

  double gamma_L() const { return 0.5 * gamma_s; }
  double upsilon() const;
  double delta() const;
  // Delta_{+/-} of the longitudinal closed forms.
  double delta_plus() const;
  double delta_minus() const;
  void validate() const;
};

struct PhononModeParams {
  double omega_ph = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double Q = 1e5;
  double temperature = 0.0;
  int n_max = 15;

  double gamma_ph() const { return omega_ph / Q; }
  cplx g() const { return {g1, g2}; }
  double g_abs() const;
  double theta_g() const;
  void validate() const;
  // Human readable notes when g is not small against omega_ph or not large
  // against gamma_ph.
  std::vector<std::string> regime_warnings() const;
};

struct EnergySpectrum {
  RVector energies;  // ascending
  CMatrix states;    // eigenvectors as columns
};

// Hermitian eigensystem, ascending. When a reference basis is given, vectors
// inside a degenerate cluster (|dE| < tol_rel * scale) are rotated to maximise
// their overlap with it, and every vector's phase is fixed so that its
// largest overlap with the reference is real and positive.
EnergySpectrum eigensystem(const CMatrix& h, const CMatrix* reference = nullptr,
                           double degeneracy_tol = 1e-9);

// Four-level ground-manifold Hamiltonian in the product basis
// {e_x up, e_x down, e_y up, e_y down} (orbital slow, spin fast).
CMatrix build_siv_hamiltonian(const SivParams& p);

// Columns are the zero-field states |1>=|e-,dn>, |2>=|e+,up>, |3>=|e+,dn>,
// |4>=|e-,up> expressed in the product basis.
CMatrix label_basis();

// Closed-form energies E1..E4 for a purely longitudinal field. State |1>,|3>
// (spin down) are split by Delta_+, states |2>,|4> (spin up) by Delta_-.
std::array<double, 4> eigenenergies_longitudinal(const SivParams& p);

enum class SivForm {
  kClosedForm,  // diag(E1..E4) plus transverse spin mixing (b_x/2)
  kExact,       // full four-level Hamiltonian rotated into the label basis
};

// Four-level Hamiltonian in the label basis {|1>..|4>}.
CMatrix siv_label_hamiltonian(const SivParams& p, SivForm form = SivForm::kClosedForm);

// Orbital raising operator L+ = |3><1| + |2><4| in the label basis.
CMatrix orbital_raising();
// Energy-lowering jump inside each spin manifold, |1><3| + |2><4|.
CMatrix siv_lowering_jump();

// H_SiV (x) 1 + omega_ph c^dag c + (c^dag + c)[g1 (L- + L+) - i g2 (L- - L+)]
// on the 4 (n_max+1) dimensional space, system-major.
CMatrix build_full_hamiltonian(const SivParams& p, const PhononModeParams& m,
                               SivForm form = SivForm::kClosedForm);

// Same operator restricted to B = (B_x, 0, B_z), closed-form diagonal.
CMatrix build_transverse_hamiltonian(const SivParams& p, const PhononModeParams& m);

enum class Manifold { kH1, kH2 };  // {|1>,|3>} and {|2>,|4>}

struct RabiParams {
  double omega_s = 0.0;
  double omega_ph = 0.0;
  cplx g{0.0, 0.0};
  int n_max = 0;
};

RabiParams rabi_params(const SivParams& p, const PhononModeParams& m, Manifold manifold);
// Label indices (0-based) of the ground and excited state of a manifold.
std::array<int, 2> manifold_levels(Manifold manifold);

// Effective Rabi model in the basis {|g>, |e>} (x) Fock:
// omega_s/2 S_z + omega_ph c^dag c + (c + c^dag)(g* S+ + g S-).
CMatrix effective_rabi(const SivParams& p, const PhononModeParams& m, Manifold manifold);
CMatrix effective_rabi(const RabiParams& r);
// Phase-free form H_R in the (phi1, phi2) basis.
CMatrix canonicalize_rabi(const RabiParams& r);
// RWA: omega_s/2 S_z + omega_ph c^dag c + |g|(e^{i theta} c S+ + e^{-i theta} c^dag S-).
CMatrix jaynes_cummings(const RabiParams& r);
// S_z/2 + c^dag c in the {|g>, |e>} (x) Fock basis.
CMatrix excitation_number(int n_max);

// g_ph = d / v_s * sqrt(hbar omega_ph / (2 rho l w t)) with v_s = 1.2e4 m/s and
// rho = 3500 kg/m^3. d in rad/s per unit strain, dimensions in metres.
double estimate_phonon_coupling(double d, double l, double w, double t, double omega_ph);

// Bose-Einstein occupation at angular frequency omega and temperature T (K).
double bose_occupation(double omega, double temperature);

}  // namespace pnm
