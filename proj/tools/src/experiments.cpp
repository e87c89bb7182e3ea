#include "pnm_cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>

#include "json.hpp"
#include "pnm/bath.hpp"
#include "pnm/errors.hpp"
#include "pnm/lindblad.hpp"
#include "pnm/meanfield.hpp"
#include "pnm/parallel.hpp"
#include "pnm/sweep.hpp"
#include "pnm/units.hpp"
#include "pnm_cli/output.hpp"

namespace pnm::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

double ghz_key(Config& c, const std::string& key) { return units::ghz(c.number(key)); }

SivParams read_siv(Config& c) {
  SivParams p;
  p.lambda = ghz_key(c, "siv.lambda_ghz");
  p.gamma_x = ghz_key(c, "siv.gamma_x_ghz");
  p.gamma_y = ghz_key(c, "siv.gamma_y_ghz");
  p.f = c.number("siv.f");
  p.gamma_s = units::kTwoPi * 1e9 * c.number("siv.gamma_s_ghz_per_t");
  p.B = Field{c.number("siv.bx_t"), c.number("siv.by_t"), c.number("siv.bz_t")};
  p.validate();
  return p;
}

// Splitting of the {|1>, |3>} manifold for the longitudinal part of the field.
double omega_s_of(const SivParams& p) {
  SivParams q = p;
  q.B = Field{0.0, 0.0, p.B.bz};
  return q.delta_plus();
}

double read_frequency(Config& c, const std::string& ghz, const std::string& ratio, double reference) {
  const std::string k = c.one_of(ghz, ratio);
  return k == ghz ? ghz_key(c, ghz) : c.number(ratio) * reference;
}

PhononModeParams read_mode(Config& c, double omega_s, bool with_g = true, bool with_temperature = true) {
  PhononModeParams m;
  m.omega_ph = read_frequency(c, "mode.omega_ph_ghz", "mode.omega_ph_ratio", omega_s);
  if (with_g) {
    const double g = read_frequency(c, "mode.g_ghz", "mode.g_ratio", omega_s);
    const double phase = c.number("mode.g_phase_rad");
    m.g1 = g * std::cos(phase);
    m.g2 = g * std::sin(phase);
  }
  m.Q = c.number("mode.q");
  if (with_temperature) m.temperature = c.number("mode.temperature_k");
  m.n_max = static_cast<int>(c.integer_or("numerics.n_max", 10));
  m.validate();
  return m;
}

SingleModeConfig read_single_mode(Config& c, bool with_g = true) {
  SingleModeConfig s;
  s.siv = read_siv(c);
  s.mode = read_mode(c, omega_s_of(s.siv), with_g);
  s.gamma_siv = units::mhz(c.number("dissipation.gamma_siv_mhz"));
  s.n_delta = c.number("dissipation.n_delta");
  s.fock_n0 = static_cast<int>(c.integer("mode.n0"));
  s.initial_level = static_cast<int>(c.integer("siv.initial_level")) - 1;
  if (s.initial_level > 3) throw ConfigError("siv.initial_level must be 1..4");
  s.window = c.number_or("numerics.window", 30.0);
  s.samples = static_cast<std::size_t>(c.integer_or("numerics.samples", 1000));
  return s;
}

BathParams read_bath(Config& c, const SivParams& siv, bool with_temperature) {
  BathParams b;
  const double delta = siv.delta();
  b.center = delta;
  b.j0 = c.number("bath.j0_times_delta") / delta;
  b.width = c.number("bath.width_over_delta") * delta;
  b.omega_max = c.number_or("bath.cutoff_over_delta", 5.0) * delta;
  const std::string cross = c.text_or("bath.cross_mode", "full");
  if (cross == "full") {
    b.cross_mode = CrossMode::kFull;
  } else if (cross == "zero") {
    b.cross_mode = CrossMode::kZero;
  } else {
    throw ConfigError("bath.cross_mode must be 'full' or 'zero'");
  }
  if (with_temperature) b.temperature = c.number("mode.temperature_k");
  b.validate();
  return b;
}

struct OptimizerConfig {
  std::string algorithm;
  BlpSearchConfig search;
  AnnealSchedule anneal;
};

OptimizerConfig read_optimizer(Config& c, std::uint64_t seed, double default_window) {
  OptimizerConfig o;
  o.algorithm = c.text_or("optimizer.algorithm", "de");
  if (o.algorithm != "de" && o.algorithm != "sa") throw ConfigError("optimizer.algorithm must be 'de' or 'sa'");
  o.search.opt.de.pop_size = static_cast<int>(c.integer_or("optimizer.pop", 40));
  o.search.opt.de.max_gen = static_cast<int>(c.integer_or("optimizer.generations", 25));
  o.search.opt.de.f_weight = c.number_or("optimizer.f_weight", 0.8);
  o.search.opt.de.cr = c.number_or("optimizer.cr", 0.7);
  o.search.opt.top_k = static_cast<int>(c.integer_or("optimizer.top_k", 3));
  o.search.opt.seed = seed;
  o.search.low.window = c.number_or("optimizer.low_window", default_window);
  o.search.low.samples = static_cast<std::size_t>(c.integer_or("optimizer.low_samples", 300));
  o.search.high.window = c.number_or("optimizer.high_window", default_window);
  o.search.high.samples = static_cast<std::size_t>(c.integer_or("optimizer.high_samples", 1000));
  o.anneal.stages = o.search.opt.de.max_gen;
  o.anneal.moves_per_stage = o.search.opt.de.pop_size;
  return o;
}

std::uint64_t read_seed(Config& c, const RunOptions& opt) {
  if (opt.seed) {
    if (c.has("optimizer.seed")) c.number("optimizer.seed");
    return *opt.seed;
  }
  return static_cast<std::uint64_t>(c.integer_or("optimizer.seed", 12345));
}

struct Emission {
  CsvTable table{{}};
  json results = json::object();
  json convergence = json::object();
  bool ok = true;
};

std::string fmt_label(double v) { return format_double(v); }

// Experiments. Each reads its keys first, then computes.
using Runner = std::function<Emission(Config&, const RunOptions&, std::function<void()>)>;

Emission trace_distance_exp(Config& c, const RunOptions&, const std::function<void()>& ready) {
  SingleModeConfig base = read_single_mode(c);
  if (!c.has("mode.omega_ph_ratio")) throw ConfigError("trace-distance needs mode.omega_ph_ratio");
  const double ratio_res = c.number("mode.omega_ph_ratio");
  const double ratio_off = c.number("experiment.offresonant_ratio");
  ready();
  const double ws = omega_s_of(base.siv);
  SingleModeConfig off = base;
  off.mode.omega_ph = ratio_off * ws;
  base.mode.omega_ph = ratio_res * ws;
  const NdRun r1 = single_mode_nd(base);
  const NdRun r2 = single_mode_nd(off);
  Emission e;
  e.table = CsvTable({"t_dimensionless", "D_resonant", "D_offresonant"});
  const double unit = base.mode.g_abs() > 0.0 ? base.mode.g_abs() : 1e-3 * base.mode.omega_ph;
  for (std::size_t k = 0; k < r1.distance.size(); ++k) {
    e.table.add_row(std::vector<double>{r1.trajectory.times[k] * unit, r1.distance[k], r2.distance[k]});
  }
  e.results["N_D_resonant"] = r1.nd.value;
  e.results["N_D_offresonant"] = r2.nd.value;
  e.results["provenance"] = {r1.nd.provenance, r2.nd.provenance};
  e.convergence["max_trace_drift"] = std::max(r1.trajectory.max_trace_drift, r2.trajectory.max_trace_drift);
  e.convergence["min_eigenvalue"] = std::min(r1.trajectory.min_eigenvalue, r2.trajectory.min_eigenvalue);
  e.convergence["final_D"] = {r1.distance.back(), r2.distance.back()};
  e.convergence["steady_state_reached"] = r1.distance.back() < 1e-3 && r2.distance.back() < 1e-3;
  return e;
}

Emission nd_bz_exp(Config& c, const RunOptions& opt, const std::function<void()>& ready) {
  SingleModeConfig base = read_single_mode(c, false);
  if (!base.siv.B.longitudinal()) throw ConfigError("nd-bz needs siv.bx_t = siv.by_t = 0");
  const double ws0 = [&] {
    SivParams z = base.siv;
    z.B = Field{};
    return z.delta_plus();
  }();
  std::vector<double> gs = c.list("grid.g_ratios");
  const double bmin = c.number("grid.bz_min_t"), bmax = c.number("grid.bz_max_t");
  const auto count = static_cast<std::size_t>(c.integer("grid.count"));
  if (count < 2 || !(bmax > bmin)) throw ConfigError("nd-bz grid needs count >= 2 and bz_max_t > bz_min_t");
  ready();
  const std::vector<double> bz = uniform_grid(bmin, bmax, count);
  std::vector<double> g_abs;
  for (double r : gs) g_abs.push_back(r * ws0);
  SweepOptions so;
  so.threads = opt.threads;
  const SweepResult res = nd_vs_bz(base, bz, g_abs, so);
  std::vector<std::string> cols{"bz_T"};
  for (double r : gs) cols.push_back("N_D_g_ratio_" + fmt_label(r));
  Emission e;
  e.table = CsvTable(cols);
  for (std::size_t j = 0; j < bz.size(); ++j) {
    std::vector<double> row{bz[j]};
    for (std::size_t i = 0; i < gs.size(); ++i) row.push_back(res.at(i, j));
    e.table.add_row(row);
  }
  std::vector<double> peaks, peak_bz;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < bz.size(); ++j) {
      if (res.at(i, j) > res.at(i, best)) best = j;
    }
    peaks.push_back(res.at(i, best));
    peak_bz.push_back(bz[best]);
  }
  e.results["peak_N_D"] = peaks;
  e.results["peak_bz_T"] = peak_bz;
  if (gs.size() >= 3) {
    const LinearFit f = fit_linear_through_origin(gs, peaks);
    e.results["peak_fit"] = {{"slope", f.slope}, {"half_width_95", f.half_width}, {"r_squared", f.r_squared}};
  }
  std::size_t invalid = 0;
  for (const auto& r : res.records) invalid += r.status != "ok";
  e.convergence["invalid_points"] = invalid;
  e.ok = invalid == 0;
  return e;
}

Emission blp_map_exp(Config& c, const RunOptions& opt, const std::function<void()>& ready) {
  SingleModeConfig base = read_single_mode(c);
  const std::uint64_t seed = read_seed(c, opt);
  const OptimizerConfig o = read_optimizer(c, seed, base.window);
  GridSpec grid;
  const auto count = static_cast<std::size_t>(c.integer("grid.count"));
  grid.axes = {GridAxis{"bx", 0.0, c.number("grid.bx_max_t"), count},
               GridAxis{"bz", 0.0, c.number("grid.bz_max_t"), count}};
  grid.base_seed = seed;
  grid.validate();
  const std::string out_dir = opt.out_dir.empty() ? c.text_or("output.path", ".") : opt.out_dir;
  ready();
  if (o.algorithm != "de") throw ConfigError("blp-map supports optimizer.algorithm = de only");
  SweepOptions so;
  so.threads = opt.threads;
  so.checkpoint_path = (std::filesystem::path(out_dir) / "blp-map.checkpoint.jsonl").string();
  const SweepResult res = blp_map(base, grid, o.search, so);
  Emission e;
  e.table = CsvTable({"bx_T", "bz_T", "N_BLP"});
  const auto& bx = res.axis_values[0];
  const auto& bzv = res.axis_values[1];
  for (std::size_t i = 0; i < bx.size(); ++i) {
    for (std::size_t j = 0; j < bzv.size(); ++j) e.table.add_row(std::vector<double>{bx[i], bzv[j], res.at(i, j)});
  }
  json pts = json::array();
  std::size_t invalid = 0;
  for (const auto& r : res.records) {
    pts.push_back({{"index", r.index}, {"seed", r.seed}, {"evaluations", r.evaluations}, {"status", r.status},
                   {"wall_seconds", r.wall_seconds}, {"provenance", r.message}});
    invalid += r.status != "ok";
  }
  e.results["points"] = pts;
  e.results["checkpoint"] = so.checkpoint_path;
  e.convergence["invalid_points"] = invalid;
  if (res.metadata.count("resumed_points") != 0) e.convergence["resumed_points"] = res.metadata.at("resumed_points");
  e.ok = invalid == 0;
  return e;
}

Emission blp_temp_exp(Config& c, const RunOptions& opt, const std::function<void()>& ready) {
  BathSweepConfig cfg;
  cfg.siv = read_siv(c);
  cfg.bath = read_bath(c, cfg.siv, false);
  const double delta = cfg.siv.delta();
  const double window = c.number_or("numerics.window", 60.0);
  cfg.window = window / delta;
  cfg.lattice_points = static_cast<std::size_t>(c.integer_or("numerics.lattice_points", 1201));
  const std::uint64_t seed = read_seed(c, opt);
  OptimizerConfig o = read_optimizer(c, seed, window);
  o.search.low.window /= delta;
  o.search.high.window /= delta;
  cfg.search = o.search;
  const auto count = static_cast<std::size_t>(c.integer("grid.count"));
  const double tmin = c.number("grid.t_min_k"), tmax = c.number("grid.t_max_k");
  if (count < 2 || !(tmax > tmin)) throw ConfigError("blp-temp grid needs count >= 2 and t_max_k > t_min_k");
  ready();
  const std::vector<double> temps = uniform_grid(tmin, tmax, count);
  Emission e;
  e.table = CsvTable({"temperature_K", "N_BLP"});
  std::vector<double> values;
  if (o.algorithm == "de") {
    SweepOptions so;
    so.threads = opt.threads;
    const TemperatureScan scan = blp_vs_temperature(cfg, temps, so);
    values = scan.sweep.values;
    if (scan.fit) {
      const TanhFit& f = *scan.fit;
      e.results["fit"] = {{"a", f.a}, {"b", f.b}, {"c", f.c}, {"sigma", f.sigma}, {"mse", f.mse},
                          {"converged", f.converged}, {"iterations", f.iterations}};
    } else {
      e.results["fit_error"] = scan.fit_error;
    }
    json pts = json::array();
    for (const auto& r : scan.sweep.records) {
      pts.push_back({{"temperature_K", r.coords[0]}, {"seed", r.seed}, {"evaluations", r.evaluations},
                     {"status", r.status}, {"provenance", r.message}});
    }
    e.results["points"] = pts;
  } else {
    std::vector<double> xs;
    for (std::size_t k = 0; k < temps.size(); ++k) {
      BathParams b = cfg.bath;
      b.temperature = temps[k];
      const TlmeModel model(cfg.siv, b, std::max(cfg.window, cfg.search.high.window), cfg.lattice_points, opt.threads);
      const DynamicalMapTable maps = tlme_dynamical_maps(model, uniform_grid(0.0, cfg.search.high.window,
                                                                             cfg.search.high.samples));
      const OptResult r = simulated_annealing(blp_problem(maps, seed ^ k, 0, 1), o.anneal);
      values.push_back(-r.best_value);
    }
    try {
      const TanhFit f = fit_tanh(temps, values);
      e.results["fit"] = {{"a", f.a}, {"b", f.b}, {"c", f.c}, {"sigma", f.sigma}, {"mse", f.mse},
                          {"converged", f.converged}, {"iterations", f.iterations}};
    } catch (const Error& err) {
      e.results["fit_error"] = err.what();
    }
  }
  for (std::size_t k = 0; k < temps.size(); ++k) e.table.add_row(std::vector<double>{temps[k], values[k]});
  e.results["delta_rad_per_s"] = delta;
  return e;
}

Emission meanfield_exp(Config& c, const RunOptions& opt, const std::function<void()>& ready) {
  const SivParams siv = read_siv(c);
  const double ws = omega_s_of(siv);
  const PhononModeParams mode = read_mode(c, ws, true, false);
  const double gamma_siv = units::mhz(c.number("dissipation.gamma_siv_mhz"));
  const std::string relax_name = c.text("meanfield.relaxation");
  Relaxation relax;
  if (relax_name == "literal") {
    relax = Relaxation::kLiteral;
  } else if (relax_name == "thermal") {
    relax = Relaxation::kThermal;
  } else {
    throw ConfigError("meanfield.relaxation must be 'literal' or 'thermal'");
  }
  const double amin = c.number("grid.alpha_min"), amax = c.number("grid.alpha_max");
  const auto count = static_cast<std::size_t>(c.integer("grid.count"));
  if (count < 3 || !(amax > amin)) throw ConfigError("meanfield grid needs count >= 3 and alpha_max > alpha_min");
  const std::vector<double> temps = c.list("grid.temperatures_k");
  const double window = c.number_or("numerics.window", 400.0);
  const double per_period = c.number_or("numerics.samples_per_period", 20.0);
  ready();
  const std::vector<double> alphas = uniform_grid(amin, amax, count);
  const double unit = mode.g_abs() > 0.0 ? 1.0 / mode.g_abs() : 1.0 / (1e-3 * mode.omega_ph);
  std::vector<std::vector<double>> nd(temps.size(), std::vector<double>(alphas.size()));
  parallel_for(temps.size() * alphas.size(), opt.threads, [&](std::size_t idx) {
    const std::size_t i = idx / alphas.size(), j = idx % alphas.size();
    const MeanFieldParams p = meanfield_params(mode.omega_ph, ws, mode.g(), mode.Q, gamma_siv, temps[i], relax);
    nd[i][j] = meanfield_nd({alphas[j], 0.0}, p, window * unit, meanfield_samples(p, window * unit, per_period)).value;
  });
  std::vector<std::string> cols{"alpha0"};
  for (double t : temps) cols.push_back("N_D_T_" + fmt_label(t) + "K");
  Emission e;
  e.table = CsvTable(cols);
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    std::vector<double> row{alphas[j]};
    for (std::size_t i = 0; i < temps.size(); ++i) row.push_back(nd[i][j]);
    e.table.add_row(row);
  }
  json fits = json::array();
  for (std::size_t i = 0; i < temps.size(); ++i) {
    const LinearFit f = fit_linear_through_origin(alphas, nd[i]);
    fits.push_back({{"temperature_K", temps[i]}, {"slope", f.slope}, {"ci95", {f.lower(), f.upper()}},
                    {"r_squared", f.r_squared}});
  }
  e.results["fits"] = fits;
  return e;
}

Emission spectrum_map_exp(Config& c, const RunOptions& opt, const std::function<void()>& ready) {
  const SivParams siv = read_siv(c);
  const PhononModeParams mode = read_mode(c, omega_s_of(siv), true, false);
  const auto count = static_cast<std::size_t>(c.integer("grid.count"));
  const double bmax = c.number("grid.b_max_t");
  const int n = static_cast<int>(c.integer("grid.level_n"));
  const int m = static_cast<int>(c.integer("grid.level_m"));
  ready();
  GridSpec grid;
  grid.axes = {GridAxis{"bx", 0.0, bmax, count}, GridAxis{"bz", 0.0, bmax, count}};
  SweepOptions so;
  so.threads = opt.threads;
  const SweepResult res = spectrum_ratio_map(siv, mode, grid, n, m, so);
  Emission e;
  e.table = CsvTable({"bx_T", "bz_T", "omega_ph_over_gap"});
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      e.table.add_row(std::vector<double>{res.axis_values[0][i], res.axis_values[1][j], res.at(i, j)});
    }
  }
  // Radii where the ratio crosses 1 between neighbouring grid points.
  std::vector<double> radii;
  auto radius = [&](std::size_t i, std::size_t j) { return std::hypot(res.axis_values[0][i], res.axis_values[1][j]); };
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      const double v = res.at(i, j) - 1.0;
      if (j + 1 < count) {
        const double w = res.at(i, j + 1) - 1.0;
        if (std::isfinite(v) && std::isfinite(w) && v * w < 0.0) {
          radii.push_back(radius(i, j) + (radius(i, j + 1) - radius(i, j)) * v / (v - w));
        }
      }
      if (i + 1 < count) {
        const double w = res.at(i + 1, j) - 1.0;
        if (std::isfinite(v) && std::isfinite(w) && v * w < 0.0) {
          radii.push_back(radius(i, j) + (radius(i + 1, j) - radius(i, j)) * v / (v - w));
        }
      }
    }
  }
  e.results["unit_crossing_radii_T"] = radii;
  std::size_t infinite = 0;
  for (const auto& r : res.records) infinite += r.status == "infinite";
  e.convergence["infinite_points"] = infinite;
  return e;
}

Emission rates_dump_exp(Config& c, const RunOptions& opt, const std::function<void()>& ready) {
  const SivParams siv = read_siv(c);
  const BathParams bath = read_bath(c, siv, true);
  const double delta = siv.delta();
  const double window = c.number_or("numerics.window", 20.0);
  const auto samples = static_cast<std::size_t>(c.integer_or("numerics.samples", 201));
  ready();
  const EnergySpectrum sp = siv_spectrum(siv);
  std::vector<double> omegas;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double w = sp.energies(j) - sp.energies(i);
      bool seen = false;
      for (double o : omegas) seen = seen || std::abs(o - w) <= 1e-9 * delta;
      if (!seen) omegas.push_back(w);
    }
  }
  std::sort(omegas.begin(), omegas.end());
  const std::vector<double> ts = uniform_grid(0.0, window / delta, samples);
  std::vector<std::string> cols{"delta_t"};
  for (double w : omegas) {
    cols.push_back("gamma11_w_" + fmt_label(w / delta));
    cols.push_back("gamma33_w_" + fmt_label(w / delta));
  }
  std::vector<std::vector<double>> rows(ts.size(), std::vector<double>(cols.size()));
  parallel_for(ts.size(), opt.threads, [&](std::size_t k) {
    rows[k][0] = ts[k] * delta;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      const RateSet r = rate_integrals(omegas[i], ts[k], bath);
      rows[k][1 + 2 * i] = r.g11 / delta;
      rows[k][2 + 2 * i] = r.g33 / delta;
    }
  });
  Emission e;
  e.table = CsvTable(cols);
  for (const auto& r : rows) e.table.add_row(r);
  e.results["units"] = "rates in units of Delta, time as Delta t";
  e.results["spectral_integral_over_delta2"] = spectral_integral(bath) / (delta * delta);
  return e;
}

Emission validate_exp(Config& c, const RunOptions&, const std::function<void()>& ready) {
  std::vector<CheckResult> checks;
  std::function<void()> run_checks = [&] { checks = validation_suite(c); };
  // validation_suite reads its own keys; it calls back only after reading.
  run_checks();
  (void)ready;
  Emission e;
  e.table = CsvTable({"check", "residual", "tolerance", "pass"});
  json arr = json::array();
  for (const auto& k : checks) {
    e.table.add_row(std::vector<std::string>{k.name, format_double(k.residual), format_double(k.tolerance),
                                             k.pass ? "1" : "0"});
    arr.push_back({{"check", k.name}, {"residual", k.residual}, {"tolerance", k.tolerance}, {"pass", k.pass}});
    e.ok = e.ok && k.pass;
  }
  e.results["checks"] = arr;
  return e;
}

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r{
      {"trace-distance", trace_distance_exp}, {"nd-bz", nd_bz_exp},
      {"blp-map", blp_map_exp},               {"blp-temp", blp_temp_exp},
      {"meanfield-scaling", meanfield_exp},   {"spectrum-map", spectrum_map_exp},
      {"rates-dump", rates_dump_exp},         {"validate", validate_exp},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : runners()) n.push_back(k);
    return n;
  }();
  return names;
}

std::vector<CheckResult> validation_suite(Config& c) {
  SingleModeConfig cfg = read_single_mode(c);
  const BathParams bath = read_bath(c, cfg.siv, false);
  const double trunc_tol = c.number_or("numerics.truncation_tol", 1e-4);
  c.require_all_consumed();

  std::vector<CheckResult> out;
  auto add = [&](std::string name, double residual, double tol) {
    out.push_back({std::move(name), residual, tol, residual <= tol});
  };

  const CMatrix h = build_full_hamiltonian(cfg.siv, cfg.mode);
  add("hamiltonian_hermiticity", hermiticity_error(h) / std::max(1.0, h.norm()), 1e-12);

  {
    SivParams lon = cfg.siv;
    lon.B = Field{0.0, 0.0, cfg.siv.B.bz};
    const auto closed = eigenenergies_longitudinal(lon);
    std::array<double, 4> sorted_closed = closed;
    std::sort(sorted_closed.begin(), sorted_closed.end());
    const RVector ev = hermitian_eigenvalues(build_siv_hamiltonian(lon));
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
      worst = std::max(worst, std::abs(ev(k) - sorted_closed[static_cast<std::size_t>(k)]) / lon.delta());
    }
    add("closed_form_vs_eigensolve", worst, 1e-6);
  }

  {
    SingleModeConfig g0 = cfg;
    g0.mode.g1 = g0.mode.g2 = 0.0;
    const LindbladModel model = build_lindblad(g0.siv, g0.mode, g0.gamma_siv, g0.n_delta, g0.form);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    const int nf = g0.mode.n_max + 1;
    const CMatrix phonon = FockSpace(g0.mode.n_max).projector(std::min(g0.fock_n0, g0.mode.n_max));
    double worst = 0.0;
    const double tu = cfg.mode.g_abs() > 0.0 ? 1.0 / cfg.mode.g_abs() : 1.0 / (1e-3 * cfg.mode.omega_ph);
    const std::vector<double> grid = uniform_grid(0.0, cfg.window * tu, 200);
    for (int trial = 0; trial < 5; ++trial) {
      CVector psi(4);
      for (int k = 0; k < 4; ++k) psi(k) = cplx(gauss(rng), gauss(rng));
      psi.normalize();
      const DensityMatrix rho0(tensor(psi * psi.adjoint(), phonon), "random");
      const DensityMatrix ss_full = steady_state_from(model, rho0);
      const DensityMatrix ss(partial_trace_phonon(ss_full.op(), 4, nf));
      const Trajectory tr = propagate(model, rho0, grid);
      worst = std::max(worst, sum_positive_increments(grid, trace_distance_series(tr, ss)).value);
    }
    add("contractivity_at_g0", worst, 1e-8);
  }

  {
    double worst = 0.0;
    for (double w : {-bath.center, 0.0, bath.center}) {
      const RateSet r = rate_integrals(w, 0.0, bath);
      for (double v : {r.g11, r.g12, r.g21, r.g22, r.g33, r.g34, r.g43, r.g44}) worst = std::max(worst, std::abs(v));
    }
    add("rates_zero_at_t0", worst, 0.0);
  }

  {
    const NdRun small = single_mode_nd(cfg);
    SingleModeConfig big = cfg;
    big.mode.n_max = 2 * cfg.mode.n_max + 1;
    const NdRun large = single_mode_nd(big);
    double worst = 0.0;
    for (std::size_t k = 0; k < small.distance.size(); ++k) {
      worst = std::max(worst, std::abs(small.distance[k] - large.distance[k]));
    }
    add("truncation_convergence", worst, trunc_tol);

    double trace = 0.0, herm = 0.0, neg = 0.0;
    for (const auto& s : small.trajectory.states) {
      const DensityCheck d = s.check();
      trace = std::max(trace, d.trace_error);
      herm = std::max(herm, d.hermiticity_error);
      neg = std::max(neg, -d.min_eigenvalue);
    }
    add("snapshot_trace", trace, 1e-9);
    add("snapshot_hermiticity", herm, 1e-10);
    add("snapshot_positivity", std::max(neg, 0.0), 1e-8);
  }
  return out;
}

int exit_code_for_kind(const std::string& kind) {
  if (kind == "config_error" || kind == "contract_violation" || kind == "dimension_error" || kind == "domain_error") {
    return kExitValidation;
  }
  return kExitNumerical;
}

std::string error_json(const std::string& kind, const std::string& message, int exit_code) {
  json j;
  j["error"] = {{"kind", kind}, {"message", message}, {"exit_code", exit_code}};
  return j.dump();
}

RunOutcome run(const RunOptions& opt) {
  Config cfg = Config::from_file(opt.config_path);
  return run(std::move(cfg), opt);
}

RunOutcome run(Config cfg, const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& o : opt.overrides) cfg.apply_override(o);
  const std::string name = cfg.text("experiment.name");
  if (opt.subcommand != "run" && !opt.subcommand.empty() && opt.subcommand != name) {
    throw ConfigError("subcommand '" + opt.subcommand + "' does not match experiment.name '" + name + "'");
  }
  const auto it = runners().find(name);
  if (it == runners().end()) throw ConfigError("unknown experiment '" + name + "'");
  const std::string format = cfg.text_or("output.format", "csv");
  if (format != "csv") throw ConfigError("output.format must be 'csv'");
  std::string out_dir = opt.out_dir;
  if (out_dir.empty()) {
    out_dir = cfg.text_or("output.path", ".");
  } else if (cfg.has("output.path")) {
    cfg.text("output.path");
  }
  const int threads = resolve_threads(opt.threads);
  RunOptions ro = opt;
  ro.threads = threads;
  ro.out_dir = out_dir;

  Emission e = it->second(cfg, ro, [&] { cfg.require_all_consumed(); });
  std::filesystem::create_directories(out_dir);
  const std::string stem = (std::filesystem::path(out_dir) / name).string();
  RunOutcome outcome;
  outcome.csv_path = stem + ".csv";
  outcome.json_path = stem + ".json";
  e.table.write(outcome.csv_path);

  json meta;
  meta["experiment"] = name;
  meta["version"] = kVersion;
  meta["config_origin"] = cfg.origin();
  meta["resolved_config"] = cfg.resolved();
  meta["resolved_config_text"] = cfg.resolved_text();
  meta["config_hash"] = config_hash(cfg.resolved_text());
  meta["threads"] = threads;
  meta["csv"] = outcome.csv_path;
  meta["columns"] = e.table.columns();
  meta["results"] = e.results;
  meta["convergence"] = e.convergence;
  meta["status"] = e.ok ? "ok" : "failed";
  meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text_atomic(outcome.json_path, meta.dump(2) + "\n");
  outcome.exit_code = e.ok ? kExitOk : kExitValidation;
  return outcome;
}

}  // namespace pnm::cli
