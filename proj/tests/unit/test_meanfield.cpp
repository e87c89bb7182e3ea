#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "pnm/errors.hpp"
#include "pnm/meanfield.hpp"
#include "pnm/siv.hpp"
#include "pnm/units.hpp"

using namespace pnm;

namespace {

MeanFieldParams resonant(double g_ratio, Relaxation relax, double temperature = 7.0) {
  const double w = units::ghz(45.0);
  return meanfield_params(w, w, {g_ratio * w, 0.0}, 1e5, units::mhz(1.78), temperature, relax);
}

}  // namespace

TEST_SUITE("meanfield") {

TEST_CASE("parameters") {
  const MeanFieldParams p = resonant(1e-3, Relaxation::kThermal);
  const double n = bose_occupation(p.omega_s, 7.0);
  CHECK(p.gamma == test::rel(units::mhz(1.78) * (2 * n + 1)));
  CHECK(p.gamma_ph == test::rel(p.omega_ph / 1e5));
  CHECK(p.sz_eq == test::rel(-1.0 / (2 * n + 1)));
  CHECK(resonant(1e-3, Relaxation::kLiteral).sz_eq == 0.0);
  CHECK_THROWS_AS(meanfield_params(1.0, 1.0, {0.1, 0.0}, 0.0, 1.0, 1.0), ContractViolation);
}

TEST_CASE("uncoupled evolution has closed forms") {
  MeanFieldParams p = resonant(1e-3, Relaxation::kThermal);
  p.g = {0.0, 0.0};
  const MeanFieldState s0{{2.0, 0.5}, {0.0, 0.0}, -1.0};
  const double t_end = 3.0 / p.gamma;
  const auto tr = meanfield_propagate(s0, p, {0.0, 0.5 * t_end, t_end});
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const double t = tr.times[k];
    const cplx alpha = s0.alpha * std::exp(cplx(-p.gamma_ph, -p.omega_ph) * t);
    // About 1e4 rad of phase accumulate at rtol 1e-10.
    CHECK(std::abs(tr.states[k].alpha - alpha) < 5e-6 * std::abs(s0.alpha));
    CHECK(tr.states[k].sz == test::rel(p.sz_eq + (-1.0 - p.sz_eq) * std::exp(-p.gamma * t)).epsilon(1e-8));
    CHECK(std::abs(tr.states[k].sp) < 1e-12);
  }
}

TEST_CASE("the relaxed state is a fixed point") {
  const MeanFieldParams p = resonant(1e-3, Relaxation::kThermal);
  const MeanFieldState fp{{0.0, 0.0}, {0.0, 0.0}, p.sz_eq};
  const MeanFieldState d = meanfield_rhs(fp, p);
  CHECK(std::abs(d.alpha) == 0.0);
  CHECK(std::abs(d.sp) == 0.0);
  CHECK(d.sz == 0.0);
  const auto b = bloch_vector(fp);
  CHECK(b[2] == p.sz_eq);
}

TEST_CASE("zero field amplitude gives no backflow") {
  const MeanFieldParams p = resonant(1e-2, Relaxation::kThermal);
  const double window = 50.0 / std::abs(p.g);
  const NmResult r = meanfield_nd({0.0, 0.0}, p, window, meanfield_samples(p, window));
  CHECK(r.value == 0.0);
  CHECK(r.provenance.find("warning") != std::string::npos);
}

TEST_CASE("trajectories stay in the Bloch ball and N_D grows with the drive") {
  const MeanFieldParams p = resonant(1e-2, Relaxation::kThermal);
  const double window = 100.0 / std::abs(p.g);
  const std::size_t n = meanfield_samples(p, window);
  CHECK(n > 16);
  const auto tr = meanfield_propagate({{6.0, 0.0}, {0.0, 0.0}, -1.0}, p, std::vector<double>{0.0, window / 2, window});
  for (const auto& s : tr.states) CHECK(s.bounded());
  double prev = -1.0;
  for (double a0 : {2.0, 4.0, 8.0}) {
    const double nd = meanfield_nd({a0, 0.0}, p, window, n).value;
    CHECK(nd > prev);
    prev = nd;
  }
  CHECK_THROWS_AS(meanfield_nd({2.0, 0.0}, p, window, 8), ResolutionError);
}

TEST_CASE("literal relaxation shows no backflow") {
  // Relaxation towards sz = 0 with the reference point (0, 0, 0): D(t) only decays.
  const MeanFieldParams p = resonant(1e-2, Relaxation::kLiteral);
  const double window = 100.0 / std::abs(p.g);
  CHECK(meanfield_nd({6.0, 0.0}, p, window, meanfield_samples(p, window)).value < 1e-6);
}

}  // TEST_SUITE
