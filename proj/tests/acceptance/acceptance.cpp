// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Usage: pnm_acceptance [criterion ids...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pnm/bath.hpp"
#include "pnm/fitting.hpp"
#include "pnm/lindblad.hpp"
#include "pnm/meanfield.hpp"
#include "pnm/measures.hpp"
#include "pnm/optimize.hpp"
#include "pnm/parallel.hpp"
#include "pnm/siv.hpp"
#include "pnm/sweep.hpp"
#include "pnm/units.hpp"

using namespace pnm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

SivParams fig_siv() {
  SivParams p;
  p.lambda = units::ghz(45.0);
  p.gamma_x = units::ghz(1.0);
  p.gamma_y = units::ghz(1.0);
  p.f = 0.1;
  p.gamma_s = units::kTwoPi * 28e9;
  return p;
}

// Resonant single mode: g = 1e-3 omega_s, Q = 1e5, Gamma_SiV = 2 pi 1.78 MHz, N(Delta) = 10.
SingleModeConfig fig2_config(int n0 = 1) {
  SingleModeConfig c;
  c.siv = fig_siv();
  const double ws = c.siv.delta_plus();
  c.mode.omega_ph = ws;
  c.mode.g1 = 1e-3 * ws;
  c.mode.Q = 1e5;
  c.mode.n_max = 10;
  c.gamma_siv = units::mhz(1.78);
  c.n_delta = 10.0;
  c.fock_n0 = n0;
  c.initial_level = 0;
  c.window = 150.0;
  c.samples = 6000;
  return c;
}

ManifoldParams fig2_manifold(int n, double n_delta = 10.0) {
  const SingleModeConfig c = fig2_config();
  return make_manifold_params(c.mode.g(), n, c.mode.gamma_ph(), 0.0, c.gamma_siv, n_delta);
}

Outcome criterion_contrast() {
  SingleModeConfig res = fig2_config();
  SingleModeConfig off = res;
  off.mode.omega_ph = 2.0 * res.siv.delta_plus();
  const double nr = single_mode_nd(res).nd.value;
  const double no = single_mode_nd(off).nd.value;
  const bool magnitude = nr >= 1.0;
  const bool contrast = no <= 0.05 * nr;
  return {magnitude && contrast, "N_D(res)=" + fmt(nr) + (magnitude ? " >= 1.0" : " < 1.0") +
                                     ", N_D(2ws)=" + fmt(no) + (contrast ? " <= " : " > ") + "0.05*N_D(res)"};
}

Outcome criterion_analytic() {
  const double an = analytic_nd(fig2_manifold(0));
  const double num = single_mode_nd(fig2_config()).nd.value;
  const bool a_ok = std::abs(an - 0.98) <= 0.05;
  const bool n_ok = num >= 1.0 && num <= 1.7;
  return {a_ok && n_ok, "analytic_nd=" + fmt(an) + " (target 0.98+-0.05), numeric N_D=" + fmt(num) +
                            " (target [1.0, 1.7])"};
}

Outcome criterion_linear_coupling() {
  SingleModeConfig c = fig2_config();
  c.mode.n_max = 8;
  c.window = 30.0;
  c.samples = 1000;
  const double ws0 = c.siv.delta_plus();
  const std::vector<double> ratios{0.5e-3, 1e-3, 2e-3};
  std::vector<double> gs;
  for (double r : ratios) gs.push_back(r * ws0);
  const std::vector<double> bz = uniform_grid(-10.0, 10.0, 21);
  const SweepResult res = nd_vs_bz(c, bz, gs);
  std::vector<double> peaks;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < bz.size(); ++j) best = std::max(best, res.at(i, j));
    peaks.push_back(best);
  }
  const LinearFit f = fit_linear_through_origin(ratios, peaks);
  return {f.r_squared > 0.99, "peaks=(" + fmt(peaks[0]) + ", " + fmt(peaks[1]) + ", " + fmt(peaks[2]) +
                                  "), R^2=" + fmt(f.r_squared, 5) + " (target > 0.99)"};
}

Outcome criterion_fock() {
  // |g| >> Gamma_0 with N(Delta) = 0: Gamma_0 / |g| ~ 0.04.
  const double base = analytic_nd(fig2_manifold(0, 0.0));
  bool ratios_ok = true;
  std::string detail = "ratios:";
  for (int n : {1, 3, 8}) {
    const double r = analytic_nd(fig2_manifold(n, 0.0)) / base;
    const double target = std::sqrt(n + 1.0);
    ratios_ok = ratios_ok && std::abs(r / target - 1.0) <= 0.05;
    detail += " n=" + std::to_string(n) + ":" + fmt(r) + "/" + fmt(target);
  }
  std::vector<double> nd;
  for (int n0 : {0, 1, 2}) nd.push_back(single_mode_nd(fig2_config(n0)).nd.value);
  const bool mono = nd[0] < nd[1] && nd[1] < nd[2];
  detail += "; full N_D(n0=0,1,2)=(" + fmt(nd[0]) + ", " + fmt(nd[1]) + ", " + fmt(nd[2]) + ")" +
            (mono ? " increasing" : " not increasing");
  return {ratios_ok && mono, detail};
}

Outcome criterion_meanfield() {
  const double ws = fig_siv().delta_plus();
  const cplx g{1e-3 * ws, 0.0};
  const std::vector<double> alphas = uniform_grid(2.0, 12.0, 6);
  const std::vector<double> temps{5.0, 7.0, 9.0};
  std::vector<std::vector<double>> nd(temps.size(), std::vector<double>(alphas.size()));
  parallel_for(temps.size() * alphas.size(), 0, [&](std::size_t idx) {
    const std::size_t i = idx / alphas.size(), j = idx % alphas.size();
    const MeanFieldParams p = meanfield_params(ws, ws, g, 1e5, units::mhz(1.78), temps[i], Relaxation::kThermal);
    const double window = 400.0 / std::abs(g);
    nd[i][j] = meanfield_nd({alphas[j], 0.0}, p, window, meanfield_samples(p, window, 20.0)).value;
  });
  std::vector<LinearFit> fits;
  for (const auto& row : nd) fits.push_back(fit_linear_through_origin(alphas, row));
  const LinearFit& main = fits[1];
  const bool slope_ok = main.slope >= 0.70 && main.slope <= 0.88 && main.r_squared > 0.98;
  const bool decreasing = fits[0].slope > fits[1].slope && fits[1].slope > fits[2].slope;
  return {slope_ok && decreasing, "a(7K)=" + fmt(main.slope) + " R^2=" + fmt(main.r_squared, 5) +
                                      " (target [0.70, 0.88], > 0.98); a(5,7,9K)=(" + fmt(fits[0].slope) + ", " +
                                      fmt(fits[1].slope) + ", " + fmt(fits[2].slope) + ")" +
                                      (decreasing ? " decreasing" : " not decreasing")};
}

Outcome criterion_blp_temperature() {
  BathSweepConfig cfg;
  cfg.siv = fig_siv();
  const double delta = cfg.siv.delta();
  cfg.bath.center = delta;
  cfg.bath.width = 0.1 * delta;
  cfg.bath.j0 = 4.55 / delta;
  cfg.bath.omega_max = 5.0 * delta;
  cfg.window = 60.0 / delta;
  cfg.lattice_points = 1201;
  cfg.search.low = {60.0 / delta, 600};
  cfg.search.high = {60.0 / delta, 3000};
  cfg.search.opt.de.pop_size = 40;
  cfg.search.opt.de.max_gen = 25;
  cfg.search.opt.top_k = 3;
  cfg.search.opt.seed = 20240611;
  // Nine points across the decay region plus the 2 K end point.
  std::vector<double> temps;
  for (int k = 0; k < 9; ++k) temps.push_back(0.1 + 0.15 * k);
  temps.push_back(2.0);
  SweepOptions so;
  const TemperatureScan scan = blp_vs_temperature(cfg, temps, so);
  const auto& v = scan.sweep.values;
  bool decreasing = true;
  for (std::size_t k = 1; k < v.size(); ++k) decreasing = decreasing && v[k] < v[k - 1];
  const bool drop = v.back() < 0.05 * v.front();
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const bool fit_ok = scan.fit && scan.fit->converged && scan.fit->mse < 5e-2 * (*mx - *mn);
  std::string detail = "N_BLP=(";
  for (std::size_t k = 0; k < v.size(); ++k) detail += (k ? ", " : "") + fmt(v[k], 3);
  detail += ")";
  detail += decreasing ? " decreasing" : " not decreasing";
  detail += drop ? ", drop ok" : ", drop too small";
  if (scan.fit) {
    detail += ", fit a=" + fmt(scan.fit->a) + " b=" + fmt(scan.fit->b) + " c=" + fmt(scan.fit->c) +
              " mse=" + fmt(scan.fit->mse) + (scan.fit->converged ? "" : " (not converged)");
  } else {
    detail += ", fit failed: " + scan.fit_error;
  }
  return {decreasing && drop && fit_ok, detail};
}

Outcome criterion_ring() {
  const SivParams siv = fig_siv();
  PhononModeParams mode;
  mode.omega_ph = siv.delta_plus();
  mode.g1 = 1e-3 * mode.omega_ph;
  mode.Q = 1e5;
  mode.n_max = 4;
  GridSpec grid;
  const std::size_t count = 15;
  grid.axes = {GridAxis{"bx", 0.0, 200.0, count}, GridAxis{"bz", 0.0, 200.0, count}};
  const SweepResult res = spectrum_ratio_map(siv, mode, grid, 20, 17);
  std::vector<double> radii;
  auto radius = [&](std::size_t i, std::size_t j) { return std::hypot(res.axis_values[0][i], res.axis_values[1][j]); };
  auto visit = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    const double v = res.at(i, j) - 1.0, w = res.at(k, l) - 1.0;
    if (std::isfinite(v) && std::isfinite(w) && v * w < 0.0) {
      radii.push_back(radius(i, j) + (radius(k, l) - radius(i, j)) * v / (v - w));
    }
  };
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      if (j + 1 < count) visit(i, j, i, j + 1);
      if (i + 1 < count) visit(i, j, i + 1, j);
    }
  }
  bool near = false;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double r : radii) {
    near = near || std::abs(r - 100.0) <= 20.0;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const std::string span = radii.empty() ? "none" : "[" + fmt(lo) + ", " + fmt(hi) + "] T";
  return {near, std::to_string(radii.size()) + " unit crossings, radii " + span + " (target 100+-20 T)"};
}

// Property suites -----------------------------------------------------------

struct SuiteLog {
  bool ok = true;
  std::vector<std::string> failures;
  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

void snapshot_invariants(SuiteLog& log) {
  SingleModeConfig c = fig2_config();
  c.mode.n_max = 6;
  c.window = 30.0;
  c.samples = 600;
  const NdRun r = single_mode_nd(c);
  double tr = 0.0, herm = 0.0, neg = 0.0;
  for (const auto& s : r.trajectory.states) {
    const DensityCheck d = s.check();
    tr = std::max(tr, d.trace_error);
    herm = std::max(herm, d.hermiticity_error);
    neg = std::max(neg, -d.min_eigenvalue);
  }
  log.check(tr < 1e-9 && herm < 1e-10 && neg < 1e-8,
            "snapshots: trace " + fmt(tr) + " herm " + fmt(herm) + " neg " + fmt(neg));
}

void contractivity(SuiteLog& log) {
  // Fixed-rate four-level map: SiV at g = 0 without the phonon mode.
  const SingleModeConfig c = fig2_config();
  LindbladModel m;
  m.h = siv_label_hamiltonian(c.siv, SivForm::kClosedForm);
  m.sys_dim = 4;
  m.fock_dim = 1;
  m.jumps.push_back({siv_lowering_jump(), c.gamma_siv * (c.n_delta + 1.0), "J_minus"});
  m.jumps.push_back({siv_lowering_jump().adjoint(), c.gamma_siv * c.n_delta, "J_plus"});
  const std::vector<double> grid = uniform_grid(0.0, 3.0 / c.gamma_siv, 60);
  std::mt19937_64 rng(101);
  std::normal_distribution<double> gauss;
  auto random_state = [&] {
    CMatrix a(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
    }
    CMatrix r = a * a.adjoint();
    r /= r.trace().real();
    return DensityMatrix(CMatrix(0.5 * (r + r.adjoint())));
  };
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const Trajectory a = propagate(m, random_state(), grid);
    const Trajectory b = propagate(m, random_state(), grid);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double d = trace_distance(a.states[k], b.states[k]);
      worst = std::max(worst, d - prev);
      prev = d;
    }
  }
  log.check(worst <= 1e-10, "contractivity: largest increase " + fmt(worst));
}

void zero_coupling(SuiteLog& log) {
  SingleModeConfig c = fig2_config();
  c.mode.g1 = 0.0;
  c.mode.n_max = 4;
  c.window = 30.0;
  c.samples = 600;
  const double nd = single_mode_nd(c).nd.value;
  log.check(nd < 1e-6, "g=0 N_D " + fmt(nd));
  MixedResolutionOptions o;
  o.de.pop_size = 16;
  o.de.max_gen = 10;
  o.seed = 5;
  const OptResult r = mixed_resolution_maximize(single_mode_map_factory(c), {30.0, 300}, {30.0, 600}, o);
  log.check(-r.best_value < 1e-6, "g=0 BLP " + fmt(-r.best_value));
}

void rate_integrals_suite(SuiteLog& log) {
  BathParams b;
  b.center = fig_siv().delta();
  b.width = 0.1 * b.center;
  b.j0 = 4.55 / b.center;
  b.temperature = 1.0;
  double worst0 = 0.0;
  for (double w : {-b.center, 0.0, b.center}) {
    const RateSet r = rate_integrals(w, 0.0, b);
    for (double v : {r.g11, r.g12, r.g21, r.g22, r.g33, r.g34, r.g43, r.g44}) worst0 = std::max(worst0, std::abs(v));
  }
  log.check(worst0 == 0.0, "rates at t=0 " + fmt(worst0));
  const double t = 50.0 / b.width;
  const double n = 1.0 / std::expm1(units::kHbarOverKb * b.center / b.temperature);
  const double golden = 2.0 * std::numbers::pi * spectral_density(b.center, b) * (n + 1.0);
  const double g33 = rate_integrals(b.center, t, b).g33;
  log.check(std::abs(g33 / golden - 1.0) <= 0.02, "golden-rule plateau ratio " + fmt(g33 / golden));
}

void closed_forms(SuiteLog& log) {
  SivParams p = fig_siv();
  double worst = 0.0;
  for (double bz : {-50.0, -3.0, 0.0, 0.7, 12.0, 100.0}) {
    p.B = Field{0.0, 0.0, bz};
    auto e = eigenenergies_longitudinal(p);
    std::sort(e.begin(), e.end());
    const RVector ev = hermitian_eigenvalues(build_siv_hamiltonian(p));
    for (int k = 0; k < 4; ++k) {
      worst = std::max(worst, std::abs(ev(k) - e[static_cast<std::size_t>(k)]) / p.delta());
    }
  }
  log.check(worst < 1e-6, "closed forms vs eigensolve " + fmt(worst));
}

void reflection_invariance(SuiteLog& log) {
  SivParams p = fig_siv();
  PhononModeParams m;
  m.omega_ph = p.delta_plus();
  m.g1 = 1e-3 * m.omega_ph;
  m.Q = 1e5;
  m.n_max = 4;
  double worst = 0.0;
  for (const auto& [bx, bz] : std::vector<std::pair<double, double>>{{3.0, 5.0}, {40.0, -7.0}, {0.5, 120.0}}) {
    p.B = Field{bx, 0.0, bz};
    const RVector a = hermitian_eigenvalues(build_full_hamiltonian(p, m));
    for (const auto& flip : {Field{-bx, 0.0, bz}, Field{bx, 0.0, -bz}, Field{-bx, 0.0, -bz}}) {
      SivParams q = p;
      q.B = flip;
      const RVector b = hermitian_eigenvalues(build_full_hamiltonian(q, m));
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff());
    }
  }
  log.check(worst < 1e-9, "spectrum reflection invariance " + fmt(worst));
}

void determinism(SuiteLog& log) {
  SingleModeConfig c = fig2_config();
  c.mode.n_max = 3;
  const DynamicalMapTable maps = single_mode_map_factory(c)(20.0, 300);
  DeOptions de;
  de.pop_size = 16;
  de.max_gen = 8;
  const OptResult a = differential_evolution(blp_problem(maps, 77, 0, 1), de);
  const OptResult b = differential_evolution(blp_problem(maps, 77, 0, 4), de);
  log.check(a.best_x == b.best_x && a.best_value == b.best_value, "DE not bitwise reproducible");

  GridSpec grid;
  grid.axes = {GridAxis{"bx", 0.0, 0.02, 2}, GridAxis{"bz", 0.0, 0.02, 2}};
  grid.base_seed = 9;
  BlpSearchConfig search;
  search.low = {20.0, 100};
  search.high = {20.0, 200};
  search.opt.de.pop_size = 8;
  search.opt.de.max_gen = 3;
  SweepOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const SweepResult s1 = blp_map(c, grid, search, one);
  const SweepResult s2 = blp_map(c, grid, search, many);
  log.check(s1.values == s2.values, "BLP sweep not bitwise reproducible");
}

Outcome criterion_invariants() {
  SuiteLog log;
  snapshot_invariants(log);
  contractivity(log);
  zero_coupling(log);
  rate_integrals_suite(log);
  closed_forms(log);
  reflection_invariance(log);
  determinism(log);
  if (log.ok) return {true, "all property suites hold"};
  std::string detail;
  for (const auto& f : log.failures) detail += (detail.empty() ? "" : "; ") + f;
  return {false, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "resonance contrast", 120.0, criterion_contrast},
      {2, "analytic vs numeric N_D", 120.0, criterion_analytic},
      {3, "linear coupling scaling", 600.0, criterion_linear_coupling},
      {4, "Fock enhancement", 300.0, criterion_fock},
      {5, "mean-field scaling", 300.0, criterion_meanfield},
      {6, "BLP temperature law", 3600.0, criterion_blp_temperature},
      {7, "ring diagnostic", 300.0, criterion_ring},
      {8, "invariant suites", 300.0, criterion_invariants},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && selected.count(c.id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d (%s): %s; runtime %.1f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " EXCEEDED");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
