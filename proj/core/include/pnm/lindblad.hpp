#pragma once

#include <map>
#include <string>
#include <vector>

#include "pnm/dynamical_map.hpp"
#include "pnm/quantum.hpp"
#include "pnm/siv.hpp"

namespace pnm {

struct Jump {
  CMatrix op;
  double rate = 0.0;
  std::string name;
};

struct LindbladModel {
  CMatrix h;
  std::vector<Jump> jumps;
  int sys_dim = 4;
  int fock_dim = 1;

  int dim() const { return static_cast<int>(h.rows()); }
  void validate() const;
};

// Master-equation model: jumps c, c^dag with gamma_ph (N(omega_ph)+1), gamma_ph N,
// and the SiV lowering/raising pair with gamma_siv (n_delta+1), gamma_siv n_delta.
// N(omega_ph) comes from m.temperature; n_delta is an independent knob.
// Jumps with zero rate are omitted.
LindbladModel build_lindblad(const SivParams& p, const PhononModeParams& m, double gamma_siv,
                             double n_delta, SivForm form = SivForm::kClosedForm);

// Liouvillian superoperator in column-stacking convention.
CMatrix liouvillian(const LindbladModel& model);
// d rho / dt evaluated directly on a matrix.
CMatrix lindblad_rhs(const LindbladModel& model, const CMatrix& rho);

// Basis-state sectors that no term of the model connects; each sector carries
// at least one steady state of its own.
std::vector<std::vector<int>> coupled_sectors(const LindbladModel& model);
LindbladModel restrict_model(const LindbladModel& model, const std::vector<int>& indices);

enum class Integrator {
  kExponential,    // exact exp(L dt) propagator, cached per distinct dt
  kDormandPrince,  // adaptive 5(4) Runge-Kutta on vec(rho)
};

struct PropagateOptions {
  Integrator integrator = Integrator::kExponential;
  double rtol = 1e-8;
  double atol = 1e-10;
  bool keep_full_states = false;  // otherwise only Tr_ph(rho) is stored
  bool restrict_to_sector = true; // drop sectors the initial state never visits
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::map<std::string, std::vector<double>> scalars;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  bool positivity_flag = false;  // set when an eigenvalue fell below -1e-4
};

Trajectory propagate(const LindbladModel& model, const DensityMatrix& rho0,
                     const std::vector<double>& t_grid, const PropagateOptions& opt = {});

// Unique steady state via the Liouvillian kernel. Throws AmbiguityError when
// the kernel is degenerate.
DensityMatrix steady_state(const LindbladModel& model);

// Steady state reached from rho0: resolves degenerate kernels by restricting
// to the sectors rho0 occupies, then by long-time propagation.
DensityMatrix steady_state_from(const LindbladModel& model, const DensityMatrix& rho0);

// Reduced maps for system states prepared as rho_sys (x) phonon_state.
DynamicalMapTable reduced_dynamical_maps(const LindbladModel& model, const CMatrix& phonon_state,
                                         const std::vector<double>& t_grid);

std::vector<double> uniform_grid(double t0, double t1, std::size_t samples);

}  // namespace pnm
