#pragma once

#include <limits>
#include <random>

#include "doctest.h"

#include "pnm/quantum.hpp"
#include "pnm/siv.hpp"
#include "pnm/sweep.hpp"
#include "pnm/units.hpp"

namespace pnm::test {

// Zero-field SiV with lambda = 45 GHz and gamma_x = gamma_y = 1 GHz.
inline SivParams reference_siv() {
  SivParams p;
  p.lambda = units::ghz(45.0);
  p.gamma_x = units::ghz(1.0);
  p.gamma_y = units::ghz(1.0);
  return p;
}

// Resonant mode with g = 1e-3 omega_s, Q = 1e5 and the SiV in |1>, phonon in |n0>.
inline SingleModeConfig reference_single_mode(int n0 = 1, int n_max = 10) {
  SingleModeConfig c;
  c.siv = reference_siv();
  const double ws = c.siv.delta();
  c.mode.omega_ph = ws;
  c.mode.g1 = 1e-3 * ws;
  c.mode.Q = 1e5;
  c.mode.n_max = n_max;
  c.gamma_siv = units::mhz(1.78);
  c.n_delta = 10.0;
  c.fock_n0 = n0;
  c.initial_level = 0;
  return c;
}

inline CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  }
  return 0.5 * (m + m.adjoint());
}

inline CMatrix random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  CMatrix r = a * a.adjoint();
  r /= r.trace().real();
  return 0.5 * (r + r.adjoint());
}

// Relative comparison without doctest's default absolute floor of 1.
inline doctest::Approx rel(double v) { return doctest::Approx(v).scale(std::numeric_limits<double>::min()); }

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace pnm::test
