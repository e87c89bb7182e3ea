#include "pnm/meanfield.hpp"

#include <cmath>
#include <numbers>

#include "pnm/errors.hpp"
#include "pnm/ode.hpp"
#include "pnm/siv.hpp"

namespace pnm {

void MeanFieldParams::validate() const {
  if (!(omega_ph > 0.0) || !(omega_s > 0.0)) throw ContractViolation("MeanFieldParams: frequencies must be positive");
  if (gamma_ph < 0.0 || gamma < 0.0) throw ContractViolation("MeanFieldParams: negative damping");
}

MeanFieldParams meanfield_params(double omega_ph, double omega_s, cplx g, double Q, double gamma_siv,
                                 double temperature, Relaxation relax) {
  if (!(Q > 0.0)) throw ContractViolation("meanfield_params: Q must be positive");
  MeanFieldParams p;
  p.omega_ph = omega_ph;
  p.omega_s = omega_s;
  p.g = g;
  p.gamma_ph = std::isinf(Q) ? 0.0 : omega_ph / Q;
  const double n = bose_occupation(omega_s, temperature);
  p.gamma = gamma_siv * (2.0 * n + 1.0);
  if (relax == Relaxation::kThermal) p.sz_eq = -1.0 / (2.0 * n + 1.0);
  p.validate();
  return p;
}

MeanFieldState meanfield_rhs(const MeanFieldState& s, const MeanFieldParams& p) {
  const cplx i(0.0, 1.0);
  const cplx sm = std::conj(s.sp);
  const double x = 2.0 * s.alpha.real();
  MeanFieldState d;
  d.alpha = -i * p.omega_ph * s.alpha - i * (std::conj(p.g) * s.sp + p.g * sm) - p.gamma_ph * s.alpha;
  d.sp = i * p.omega_s * s.sp - i * p.g * x * s.sz - 0.5 * p.gamma * s.sp;
  d.sz = (2.0 * i * x * (p.g * sm - std::conj(p.g) * s.sp)).real() - p.gamma * (s.sz - p.sz_eq);
  return d;
}

namespace {

CVector pack(const MeanFieldState& s) {
  CVector y(3);
  y << s.alpha, s.sp, cplx(s.sz, 0.0);
  return y;
}

MeanFieldState unpack(const CVector& y) { return {y(0), y(1), y(2).real()}; }

}  // namespace

MeanFieldTrajectory meanfield_propagate(const MeanFieldState& s0, const MeanFieldParams& p,
                                        const std::vector<double>& t_grid, double rtol, double atol) {
  p.validate();
  OdeOptions oo;
  oo.rtol = rtol;
  oo.atol = atol;
  const OdeRhs rhs = [&](double, const CVector& y, CVector& dy) {
    MeanFieldState s = unpack(y);
    // sz is real; keep the imaginary slot pinned at zero.
    dy = pack(meanfield_rhs(s, p));
  };
  const auto ys = integrate_dopri5(rhs, pack(s0), t_grid, oo);
  MeanFieldTrajectory tr;
  tr.times = t_grid;
  tr.states.reserve(ys.size());
  for (const auto& y : ys) {
    const MeanFieldState s = unpack(y);
    if (!s.bounded()) throw NumericalError("meanfield_propagate: left the Bloch ball");
    tr.states.push_back(s);
  }
  return tr;
}

std::array<double, 3> bloch_vector(const MeanFieldState& s) {
  return {2.0 * s.sp.real(), 2.0 * s.sp.imag(), s.sz};
}

std::size_t meanfield_samples(const MeanFieldParams& p, double window, double per_period) {
  const double fast = p.omega_s + p.omega_ph;
  return static_cast<std::size_t>(std::ceil(window * fast / (2.0 * std::numbers::pi) * per_period)) + 1;
}

NmResult meanfield_nd(cplx alpha0, const MeanFieldParams& p, double window, std::size_t samples) {
  if (!(window > 0.0)) throw ContractViolation("meanfield_nd: window must be positive");
  if (samples < 16) throw ResolutionError("meanfield_nd: fewer than 16 samples");
  p.validate();
  const std::vector<double> grid = uniform_grid(0.0, window, samples);
  MeanFieldState s0;
  s0.alpha = alpha0;
  OdeOptions oo;
  oo.rtol = 1e-10;
  oo.atol = 1e-12;
  const OdeRhs rhs = [&](double, const CVector& y, CVector& dy) { dy = pack(meanfield_rhs(unpack(y), p)); };
  // Streamed: resolving the counter-rotating wiggles needs millions of samples.
  NmResult res;
  res.samples = samples;
  res.window = window;
  double prev = 0.0;
  double last = 0.0;
  bool rising = false;
  double start = 0.0;
  integrate_dopri5_observe(rhs, pack(s0), grid, [&](std::size_t k, const CVector& y) {
    const MeanFieldState s = unpack(y);
    if (!s.bounded()) throw NumericalError("meanfield_nd: left the Bloch ball", grid[k]);
    const auto r = bloch_vector(s);
    const double dz = r[2] - p.sz_eq;
    const double d = 0.5 * std::sqrt(r[0] * r[0] + r[1] * r[1] + dz * dz);
    if (k > 0) {
      if (d > prev) {
        res.value += d - prev;
        if (!rising) {
          rising = true;
          start = grid[k - 1];
        }
      } else if (rising) {
        rising = false;
        res.intervals.emplace_back(start, grid[k - 1]);
      }
    }
    prev = d;
    last = d;
  }, oo);
  if (rising) res.intervals.emplace_back(start, grid.back());
  res.provenance = "meanfield |alpha0|=" + std::to_string(std::abs(alpha0));
  if (std::norm(alpha0) < 4.0) res.provenance += " (warning: |alpha0|^2 < 4, outside the mean-field regime)";
  if (last > 1e-3) res.provenance += " (warning: final D above 1e-3)";
  return res;
}

}  // namespace pnm
