#pragma once

#include <functional>
#include <vector>

#include "pnm/quantum.hpp"

namespace pnm {

using OdeRhs = std::function<void(double t, const CVector& y, CVector& dydt)>;

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 selects a step automatically
  double max_step = 0.0;      // 0 means unbounded
  long max_steps = 50'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_calls = 0;
};

// Dormand-Prince 5(4) with step-size control and 4th order dense output.
// Returns the solution at every entry of t_out (ascending, t_out[0] is the
// initial time). Throws NumericalError carrying the last accepted time when
// the step size underflows or the state stops being finite.
std::vector<CVector> integrate_dopri5(const OdeRhs& rhs, const CVector& y0,
                                      const std::vector<double>& t_out,
                                      const OdeOptions& opt = {}, OdeStats* stats = nullptr);

using OdeObserver = std::function<void(std::size_t k, const CVector& y)>;

// Same integrator, handing each output to observe(k, y) instead of storing it.
void integrate_dopri5_observe(const OdeRhs& rhs, const CVector& y0, const std::vector<double>& t_out,
                              const OdeObserver& observe, const OdeOptions& opt = {},
                              OdeStats* stats = nullptr);

}  // namespace pnm
