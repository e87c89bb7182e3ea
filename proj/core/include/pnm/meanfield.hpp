#pragma once

#include <vector>

#include "pnm/fitting.hpp"
#include "pnm/measures.hpp"
#include "pnm/quantum.hpp"

namespace pnm {

struct MeanFieldState {
  cplx alpha{0.0, 0.0};  // <c>
  cplx sp{0.0, 0.0};     // <sigma_+>
  double sz = -1.0;      // <sigma_z>

  bool bounded(double slack = 1e-6) const { return std::abs(sz) <= 1.0 + slack && std::abs(sp) <= 1.0 + slack; }
};

struct MeanFieldParams {
  double omega_ph = 0.0;
  double omega_s = 0.0;
  cplx g{0.0, 0.0};
  double gamma_ph = 0.0;
  double gamma = 0.0;  // effective population decay rate
  double sz_eq = 0.0;  // inversion that -Gamma relaxes towards; 0 is the literal form

  void validate() const;
};

enum class Relaxation {
  kLiteral,  // d sz/dt contains -Gamma sz
  kThermal,  // -Gamma (sz - sz_eq) with sz_eq = -1 / (2 N + 1) from the jump rates
};

// Gamma = gamma_siv (2 N(omega_s, T) + 1), gamma_ph = omega_ph / Q.
MeanFieldParams meanfield_params(double omega_ph, double omega_s, cplx g, double Q, double gamma_siv,
                                 double temperature, Relaxation relax = Relaxation::kLiteral);

//   d alpha/dt = -i w_ph alpha - i (g* sp + g sm) - gamma_ph alpha
//   d sp/dt    =  i w_s sp - i g (alpha + alpha*) sz - Gamma/2 sp
//   d sz/dt    =  2 i (alpha + alpha*) (g sm - g* sp) - Gamma (sz - sz_eq)
MeanFieldState meanfield_rhs(const MeanFieldState& s, const MeanFieldParams& p);

struct MeanFieldTrajectory {
  std::vector<double> times;
  std::vector<MeanFieldState> states;
};

MeanFieldTrajectory meanfield_propagate(const MeanFieldState& s0, const MeanFieldParams& p,
                                        const std::vector<double>& t_grid, double rtol = 1e-10,
                                        double atol = 1e-12);

// Bloch vector (2 Re sp, 2 Im sp, sz); the undriven steady value is (0, 0, sz_eq).
std::array<double, 3> bloch_vector(const MeanFieldState& s);

// Samples giving per_period points per period of the fastest (omega_s + omega_ph) wiggle.
std::size_t meanfield_samples(const MeanFieldParams& p, double window, double per_period = 20.0);

// N_D from D(t) = 1/2 |r(t) - (0, 0, sz_eq)| over [0, window] with the two-level
// system starting in |g> (sz = -1). Emits a warning in provenance when
// |alpha0|^2 < 4.
NmResult meanfield_nd(cplx alpha0, const MeanFieldParams& p, double window, std::size_t samples);

}  // namespace pnm
