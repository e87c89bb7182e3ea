#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pnm/dynamical_map.hpp"
#include "pnm/lindblad.hpp"
#include "pnm/quantum.hpp"

namespace pnm {

struct NmResult {
  double value = 0.0;
  std::vector<std::pair<double, double>> intervals;  // maximal rising runs
  double window = 0.0;
  std::size_t samples = 0;
  std::string provenance;
};

// Sum of positive increments of a sampled curve; intervals are the maximal
// runs of consecutive rising samples.
NmResult sum_positive_increments(const std::vector<double>& t, const std::vector<double>& d);

std::vector<double> trace_distance_series(const Trajectory& traj, const DensityMatrix& rho_ss);

// N_D: positive part of dD/dt with D(t) = 1/2 ||rho_s(t) - rho_ss||.
NmResult dynamical_nm(const Trajectory& traj, const DensityMatrix& rho_ss);

// Two-level manifold {|g,n>, |e,n-1>} under the rate equations
//   d rho11/dt = -Gamma rho11 - gamma1 - i Omega rho21 + i Omega* rho12
//   d rho12/dt = -Gamma/2 rho12 + 2 i Omega rho11 - i Omega
struct ManifoldParams {
  cplx omega_n{0.0, 0.0};  // g sqrt(n+1)
  double gamma_big = 0.0;  // gamma_ph (2 N_ph + 1) + Gamma_SiV (2 N_Delta + 1)
  double gamma_1 = 0.0;    // gamma_ph N_ph + Gamma_SiV (N_Delta + 1)
  double gamma_0 = 0.0;    // 3 Gamma / 4
  double mu = 0.0;         // sqrt((2|Omega|)^2 - (Gamma/4)^2), NaN when not real
  double rho11_ss = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;  // printed form with C-1 read as C1; cross-check only

  double omega_abs() const { return std::abs(omega_n); }
  bool mu_real() const;
};

ManifoldParams make_manifold_params(cplx g, int n, double gamma_ph, double n_ph, double gamma_siv,
                                    double n_delta, double rho11_0 = 1.0, cplx rho12_0 = {0.0, 0.0});

struct ManifoldState {
  double rho11 = 0.0;
  cplx rho12{0.0, 0.0};
};

ManifoldState manifold_rate_rhs(const ManifoldParams& p, const ManifoldState& s);
// Exact solution of the affine linear system above (matrix exponential).
ManifoldState manifold_rate_solution(const ManifoldParams& p, double rho11_0, cplx rho12_0, double t);

// |C1 cos(mu t) + C2 sin(mu t)| exp(-Gamma_0 t).
double analytic_trace_distance(const ManifoldParams& p, double t);
// First `count` zeros of f(t) and maxima of D(t) for t > 0.
std::vector<double> analytic_zero_times(const ManifoldParams& p, int count);
std::vector<double> analytic_maxima_times(const ManifoldParams& p, int count);
// Geometric sum of rising arcs with |f(t_max)| ~ 1/2 and
// t_n = (n pi - pi/2 + alpha1) / mu:
//   1/4 exp(-alpha1 Gamma_0 / mu) csch(Gamma_0 pi / (2 mu)).
double analytic_nd(const ManifoldParams& p);

// (theta1, theta2, phi1, phi2) of the orbital and spin Bloch vectors.
using BlochAngles = std::array<double, 4>;
using BlpPoint = std::array<double, 8>;

std::array<double, 8> blp_lower_bounds();
std::array<double, 8> blp_upper_bounds();
bool in_blp_box(const BlpPoint& x);

// Pure product state |orb><orb| (x) |spin><spin| written in the label basis
// {|1>..|4>}, with |orb> = cos(t1/2)|e_x> + e^{i p1} sin(t1/2)|e_y> and
// |spin> = cos(t2/2)|up> + e^{i p2} sin(t2/2)|down>.
DensityMatrix initial_state_from_angles(const BlochAngles& x);

// Positive increments of D(rho1(t), rho2(t)) over the table's samples.
double blp_functional(const DynamicalMapTable& maps, const BlochAngles& x1, const BlochAngles& x2);
double blp_functional(const DynamicalMapTable& maps, const BlpPoint& x);
NmResult blp_result(const DynamicalMapTable& maps, const BlpPoint& x);

// Builds the reduced maps for an observation window and sample count.
using MapFactory = std::function<DynamicalMapTable(double window, std::size_t samples)>;

}  // namespace pnm
