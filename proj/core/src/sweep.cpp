#include "pnm/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include "pnm/checkpoint.hpp"
#include "pnm/errors.hpp"
#include "pnm/lindblad.hpp"
#include "pnm/parallel.hpp"

namespace pnm {

std::vector<double> GridAxis::values() const {
  if (count < 2) throw ContractViolation("GridAxis: count must be >= 2");
  return uniform_grid(min, max, count);
}

void GridSpec::validate() const {
  if (axes.empty() || axes.size() > 2) throw ContractViolation("GridSpec: one or two axes");
  for (const auto& a : axes) {
    if (a.count < 2) throw ContractViolation("GridSpec: axis '" + a.name + "' needs count >= 2");
    if (!(a.max > a.min)) throw ContractViolation("GridSpec: axis '" + a.name + "' has max <= min");
  }
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.count;
  return n;
}

std::vector<std::size_t> GridSpec::shape() const {
  std::vector<std::size_t> s;
  for (const auto& a : axes) s.push_back(a.count);
  return s;
}

std::vector<double> GridSpec::coords(std::size_t index) const {
  std::vector<double> c(axes.size());
  std::size_t rem = index;
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::size_t i = rem % axes[k].count;
    rem /= axes[k].count;
    c[k] = axes[k].values()[i];
  }
  return c;
}

std::vector<std::size_t> SweepResult::shape() const {
  std::vector<std::size_t> s;
  for (const auto& v : axis_values) s.push_back(v.size());
  return s;
}

double SweepResult::at(std::size_t i, std::size_t j) const {
  const std::size_t cols = axis_values.size() > 1 ? axis_values[1].size() : 1;
  return values.at(i * cols + j);
}

SweepResult run_grid(const GridSpec& spec, const PointFunction& fn, const SweepOptions& opt) {
  spec.validate();
  const std::size_t n = spec.size();
  std::map<std::size_t, PointRecord> done;
  if (!opt.checkpoint_path.empty() && opt.resume) done = load_checkpoint(opt.checkpoint_path);
  std::unique_ptr<CheckpointWriter> writer;
  if (!opt.checkpoint_path.empty()) writer = std::make_unique<CheckpointWriter>(opt.checkpoint_path);

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = done.find(i);
    if (it == done.end() || it->second.seed != spec.seed_for(i)) todo.push_back(i);
  }

  std::vector<PointRecord> records(n);
  for (const auto& [i, r] : done) {
    if (i < n && r.seed == spec.seed_for(i)) records[i] = r;
  }
  parallel_for(todo.size(), opt.threads, [&](std::size_t k) {
    const std::size_t i = todo[k];
    const std::vector<double> c = spec.coords(i);
    const auto start = std::chrono::steady_clock::now();
    PointRecord r;
    try {
      r = fn(i, c, spec.seed_for(i));
    } catch (const std::exception& e) {
      r = PointRecord{};
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.status = "invalid";
      r.message = e.what();
    }
    r.index = i;
    r.coords = c;
    r.seed = spec.seed_for(i);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (writer) writer->append(r);
    records[i] = std::move(r);
  });

  SweepResult res;
  for (const auto& a : spec.axes) {
    res.axis_names.push_back(a.name);
    res.axis_values.push_back(a.values());
  }
  res.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.values[i] = records[i].value;
  res.records = std::move(records);
  res.metadata["base_seed"] = std::to_string(spec.base_seed);
  res.metadata["points"] = std::to_string(n);
  res.metadata["resumed_points"] = std::to_string(n - todo.size());
  return res;
}

SweepResult reflect_quadrant(const SweepResult& q) {
  if (q.axis_values.size() != 2) throw ContractViolation("reflect_quadrant: needs a two-axis map");
  for (const auto& ax : q.axis_values) {
    if (ax.front() < 0.0) throw ContractViolation("reflect_quadrant: map must lie in the first quadrant");
  }
  auto mirror = [](const std::vector<double>& ax, std::vector<std::size_t>& src) {
    std::vector<double> full;
    const std::size_t skip = ax.front() == 0.0 ? 1 : 0;
    for (std::size_t k = ax.size(); k-- > skip;) {
      full.push_back(-ax[k]);
      src.push_back(k);
    }
    for (std::size_t k = 0; k < ax.size(); ++k) {
      full.push_back(ax[k]);
      src.push_back(k);
    }
    return full;
  };
  SweepResult r;
  r.axis_names = q.axis_names;
  std::vector<std::size_t> si, sj;
  r.axis_values.push_back(mirror(q.axis_values[0], si));
  r.axis_values.push_back(mirror(q.axis_values[1], sj));
  const std::size_t qc = q.axis_values[1].size();
  for (std::size_t i : si) {
    for (std::size_t j : sj) r.values.push_back(q.values[i * qc + j]);
  }
  r.records = q.records;
  r.metadata = q.metadata;
  r.metadata["reflected"] = "true";
  return r;
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

double time_unit(const PhononModeParams& m) {
  // Windows are expressed in units of 1/|g|; at g = 0 the scale falls back to 1e-3 omega_ph.
  const double g = m.g_abs();
  return g > 0.0 ? 1.0 / g : 1.0 / (1e-3 * m.omega_ph);
}

CMatrix fock_projector(const PhononModeParams& m, int n0) {
  if (n0 < 0 || n0 > m.n_max) throw ContractViolation("initial Fock state outside the truncation");
  return FockSpace(m.n_max).projector(n0);
}

}  // namespace

NdRun single_mode_nd(const SingleModeConfig& cfg) {
  const LindbladModel model = build_lindblad(cfg.siv, cfg.mode, cfg.gamma_siv, cfg.n_delta, cfg.form);
  if (cfg.initial_level < 0 || cfg.initial_level > 3) throw ContractViolation("initial_level must be 0..3");
  CMatrix sys = CMatrix::Zero(4, 4);
  sys(cfg.initial_level, cfg.initial_level) = 1.0;
  const DensityMatrix rho0(tensor(sys, fock_projector(cfg.mode, cfg.fock_n0)), "initial");
  const DensityMatrix ss_full = steady_state_from(model, rho0);
  const DensityMatrix ss(partial_trace_phonon(ss_full.op(), 4, cfg.mode.n_max + 1), "steady_state");
  const std::vector<double> grid = uniform_grid(0.0, cfg.window * time_unit(cfg.mode), cfg.samples);
  Trajectory tr = propagate(model, rho0, grid);
  std::vector<double> d = trace_distance_series(tr, ss);
  NmResult nd = sum_positive_increments(grid, d);
  nd.provenance = "single-mode |" + std::to_string(cfg.initial_level + 1) + ">|n=" + std::to_string(cfg.fock_n0) + ">";
  if (d.back() > 1e-3) nd.provenance += " (warning: final D " + std::to_string(d.back()) + " above 1e-3)";
  return NdRun{std::move(tr), ss, std::move(d), std::move(nd)};
}

SweepResult nd_vs_bz(const SingleModeConfig& cfg, const std::vector<double>& bz_grid,
                     const std::vector<double>& g_list, const SweepOptions& opt) {
  if (!cfg.siv.B.longitudinal()) throw ContractViolation("nd_vs_bz: field must be longitudinal");
  if (bz_grid.empty() || g_list.empty()) throw ContractViolation("nd_vs_bz: empty grid");
  const std::size_t nb = bz_grid.size();
  std::vector<PointRecord> recs(nb * g_list.size());
  parallel_for(recs.size(), opt.threads, [&](std::size_t idx) {
    SingleModeConfig c = cfg;
    c.mode.g1 = g_list[idx / nb];
    c.mode.g2 = 0.0;
    c.siv.B = Field{0.0, 0.0, bz_grid[idx % nb]};
    PointRecord& r = recs[idx];
    r.index = idx;
    r.coords = {g_list[idx / nb], bz_grid[idx % nb]};
    const auto start = std::chrono::steady_clock::now();
    try {
      const NdRun run = single_mode_nd(c);
      r.value = run.nd.value;
      r.message = run.nd.provenance;
    } catch (const std::exception& e) {
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.status = "invalid";
      r.message = e.what();
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  SweepResult res;
  res.axis_names = {"g", "bz"};
  res.axis_values = {g_list, bz_grid};
  for (const auto& r : recs) res.values.push_back(r.value);
  res.records = std::move(recs);
  return res;
}

MapFactory single_mode_map_factory(const SingleModeConfig& cfg) {
  auto model = std::make_shared<LindbladModel>(build_lindblad(cfg.siv, cfg.mode, cfg.gamma_siv, cfg.n_delta, cfg.form));
  const CMatrix phonon = fock_projector(cfg.mode, cfg.fock_n0);
  const double unit = time_unit(cfg.mode);
  return [model, phonon, unit](double window, std::size_t samples) {
    return reduced_dynamical_maps(*model, phonon, uniform_grid(0.0, window * unit, samples));
  };
}

SweepResult blp_map(const SingleModeConfig& cfg, const GridSpec& quadrant, const BlpSearchConfig& search,
                    const SweepOptions& opt) {
  if (quadrant.axes.size() != 2) throw ContractViolation("blp_map: grid needs axes (B_x, B_z)");
  for (const auto& a : quadrant.axes) {
    if (a.min < 0.0) throw ContractViolation("blp_map: grid must cover B_x, B_z >= 0 only");
  }
  // Points run in parallel, so each optimisation is serial.
  const PointFunction fn = [&](std::size_t, const std::vector<double>& c, std::uint64_t seed) {
    SingleModeConfig pc = cfg;
    pc.siv.B = Field{c[0], 0.0, c[1]};
    MixedResolutionOptions mo = search.opt;
    mo.seed = seed;
    mo.threads = 1;
    const OptResult r = mixed_resolution_maximize(single_mode_map_factory(pc), search.low, search.high, mo);
    PointRecord rec;
    rec.value = -r.best_value;
    rec.evaluations = r.evaluations;
    rec.message = r.provenance;
    return rec;
  };
  SweepResult q = run_grid(quadrant, fn, opt);
  return reflect_quadrant(q);
}

SweepResult spectrum_ratio_map(const SivParams& siv, const PhononModeParams& mode, const GridSpec& grid, int n,
                               int m, const SweepOptions& opt) {
  if (grid.axes.size() != 2) throw ContractViolation("spectrum_ratio_map: grid needs axes (B_x, B_z)");
  const int dim = 4 * (mode.n_max + 1);
  if (n < 1 || m < 1 || n > dim || m > dim || n == m) throw ContractViolation("spectrum_ratio_map: bad level pair");
  const double scale = 1e-12 * siv.delta();
  const PointFunction fn = [&](std::size_t, const std::vector<double>& c, std::uint64_t) {
    SivParams p = siv;
    p.B = Field{c[0], 0.0, c[1]};
    // Sorted eigenvalues are continuous in B, so ascending order needs no relabelling.
    const RVector e = hermitian_eigenvalues(build_transverse_hamiltonian(p, mode));
    const double gap = e(n - 1) - e(m - 1);
    PointRecord r;
    if (std::abs(gap) < scale) {
      r.value = std::numeric_limits<double>::infinity();
      r.status = "infinite";
    } else {
      r.value = mode.omega_ph / gap;
    }
    return r;
  };
  SweepResult res = run_grid(grid, fn, opt);
  res.metadata["levels"] = std::to_string(n) + "," + std::to_string(m);
  return res;
}

TemperatureScan blp_vs_temperature(const BathSweepConfig& cfg, const std::vector<double>& temperatures,
                                   const SweepOptions& opt) {
  if (temperatures.size() < 2) throw ContractViolation("blp_vs_temperature: need at least 2 temperatures");
  if (!(cfg.window > 0.0)) throw ContractViolation("blp_vs_temperature: window must be positive");
  const double t_max = std::max({cfg.window, cfg.search.low.window, cfg.search.high.window});
  std::vector<PointRecord> recs(temperatures.size());
  // Temperatures run one at a time; the rate tables and the optimiser use the threads.
  for (std::size_t k = 0; k < temperatures.size(); ++k) {
    PointRecord& r = recs[k];
    r.index = k;
    r.coords = {temperatures[k]};
    r.seed = cfg.search.opt.seed ^ static_cast<std::uint64_t>(k);
    const auto start = std::chrono::steady_clock::now();
    try {
      BathParams b = cfg.bath;
      b.temperature = temperatures[k];
      auto model = std::make_shared<TlmeModel>(cfg.siv, b, t_max, cfg.lattice_points, opt.threads, cfg.rates);
      const MapFactory factory = [model](double window, std::size_t samples) {
        return tlme_dynamical_maps(*model, uniform_grid(0.0, window, samples));
      };
      MixedResolutionOptions mo = cfg.search.opt;
      mo.seed = r.seed;
      mo.threads = opt.threads;
      const OptResult res = mixed_resolution_maximize(factory, cfg.search.low, cfg.search.high, mo);
      r.value = -res.best_value;
      r.evaluations = res.evaluations;
      r.message = res.provenance;
    } catch (const std::exception& e) {
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.status = "invalid";
      r.message = e.what();
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  TemperatureScan scan;
  scan.sweep.axis_names = {"temperature"};
  scan.sweep.axis_values = {temperatures};
  std::vector<double> xs, ys;
  for (const auto& r : recs) {
    scan.sweep.values.push_back(r.value);
    if (r.status == "ok") {
      xs.push_back(r.coords[0]);
      ys.push_back(r.value);
    }
  }
  scan.sweep.records = std::move(recs);
  try {
    scan.fit = fit_tanh(xs, ys);
  } catch (const std::exception& e) {
    scan.fit_error = e.what();
  }
  return scan;
}

}  // namespace pnm
