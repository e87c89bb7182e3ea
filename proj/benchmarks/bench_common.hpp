#pragma once

#include "pnm/siv.hpp"
#include "pnm/sweep.hpp"
#include "pnm/units.hpp"

namespace pnm::bench {

inline SingleModeConfig resonant_mode(int n_max) {
  SingleModeConfig c;
  c.siv.lambda = units::ghz(45.0);
  c.siv.gamma_x = units::ghz(1.0);
  c.siv.gamma_y = units::ghz(1.0);
  const double ws = c.siv.delta_plus();
  c.mode.omega_ph = ws;
  c.mode.g1 = 1e-3 * ws;
  c.mode.Q = 1e5;
  c.mode.n_max = n_max;
  c.gamma_siv = units::mhz(1.78);
  c.n_delta = 10.0;
  c.fock_n0 = 1;
  return c;
}

}  // namespace pnm::bench
