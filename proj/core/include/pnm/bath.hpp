#pragma once

#include <array>
#include <vector>

#include "pnm/dynamical_map.hpp"
#include "pnm/lindblad.hpp"
#include "pnm/quadrature.hpp"
#include "pnm/quantum.hpp"
#include "pnm/siv.hpp"

namespace pnm {

enum class CrossMode { kFull, kZero };

// J(w) = j0 w^3 / ((w/center)^2 + 1) * (width/2) / ((w - center)^2 + (width/2)^2).
// j0 carries units of 1/(rad/s) so that the integral of J is in rad^2/s^2.
struct BathParams {
  double j0 = 0.0;
  double width = 0.0;
  double center = 0.0;
  double temperature = 0.0;
  double omega_max = 0.0;  // 0 selects 5 * center
  CrossMode cross_mode = CrossMode::kFull;

  double cutoff() const { return omega_max > 0.0 ? omega_max : 5.0 * center; }
  void validate() const;
};

struct CouplingTensors {
  CMatrix a;  // <phi_i| sigma_z (x) 1 |phi_j>
  CMatrix b;  // <phi_i| sigma_x (x) 1 |phi_j>
};

// Ascending eigensystem of the four-level Hamiltonian in the product basis,
// degenerate clusters aligned with the zero-field label states.
EnergySpectrum siv_spectrum(const SivParams& p);
CouplingTensors coupling_tensors(const SivParams& p);
CouplingTensors coupling_tensors(const EnergySpectrum& spectrum);

double spectral_density(double omega, const BathParams& p);
double spectral_integral(const BathParams& p, const QuadOptions& q = {});
// Amplitude such that the integral of J over [0, cutoff] equals target_sum.
double normalize_j0(double target_sum, const BathParams& p);

struct RateSet {
  double g11 = 0, g12 = 0, g21 = 0, g22 = 0, g33 = 0, g34 = 0, g43 = 0, g44 = 0;
};

struct RateOptions {
  double rel_tol = 1e-9;
  int max_panels = 200000;
  double panel_scale = 1.0;  // < 1 shrinks the initial panel width
};

// gamma_11 = 2 int J n sin((w+w')t)/(w+w'), gamma_33 = 2 int J (n+1) sin((w-w')t)/(w-w'),
// and their J_2 / J_3 counterparts, J_1 = J_2 = J, J_3 = J or 0.
RateSet rate_integrals(double omega, double t, const BathParams& p, const RateOptions& opt = {});

// Rates on a (distinct omega) x (uniform time lattice) grid with natural cubic
// splines in t. Immutable after construction.
class RateTable {
 public:
  RateTable(const BathParams& p, std::vector<double> omegas, double t_max, std::size_t points,
            int threads = 0, const RateOptions& opt = {});

  const std::vector<double>& omegas() const { return omegas_; }
  double t_max() const { return t_max_; }
  std::size_t index_of(double omega) const;
  RateSet at(std::size_t omega_index, double t) const;

 private:
  struct Spline {
    std::vector<double> y, m;
    double eval(double h, double t) const;
  };
  std::vector<double> omegas_;
  double t_max_;
  double h_;
  // [omega][kernel] with kernel 0 = n type, 1 = (n+1) type.
  std::vector<std::array<Spline, 2>> splines_;
  CrossMode cross_;
};

struct TlmeCoefficients {
  Eigen::Matrix4d gamma;  // Gamma_ij, i != j
  Eigen::Matrix4d omega;  // Omega_ij
};

// Time-local master equation in the interaction picture of the SiV eigenbasis.
class TlmeModel {
 public:
  TlmeModel(const SivParams& siv, const BathParams& bath, double t_max, std::size_t lattice_points,
            int threads = 0, const RateOptions& opt = {});

  const EnergySpectrum& spectrum() const { return spectrum_; }
  const CouplingTensors& tensors() const { return tensors_; }
  const BathParams& bath() const { return bath_; }
  const RateTable& rates() const { return table_; }

  TlmeCoefficients coefficients(double t) const;
  CMatrix rhs(const CMatrix& rho, double t) const;
  Eigen::Matrix<cplx, 16, 16> superoperator(double t) const;

 private:
  EnergySpectrum spectrum_;
  CouplingTensors tensors_;
  BathParams bath_;
  RateTable table_;
  std::vector<std::pair<int, int>> channels_;
  std::vector<std::size_t> channel_omega_;
  std::size_t zero_index_ = 0;
};

TlmeCoefficients assemble_coefficients(const CouplingTensors& ct, const EnergySpectrum& spectrum,
                                       const std::function<RateSet(double omega)>& rates);

// Generator applied with explicit coefficients.
CMatrix tlme_apply(const CMatrix& rho, const TlmeCoefficients& c);

// Generator with rates computed on demand (no table).
CMatrix tlme_generator(const CMatrix& rho, double t, const CouplingTensors& ct, const BathParams& p,
                       const EnergySpectrum& spectrum);

Trajectory propagate_tlme(const TlmeModel& model, const DensityMatrix& rho0,
                          const std::vector<double>& t_grid, double rtol = 1e-9, double atol = 1e-12);

DynamicalMapTable tlme_dynamical_maps(const TlmeModel& model, const std::vector<double>& t_grid,
                                      double rtol = 1e-9, double atol = 1e-12);

}  // namespace pnm
