#include "pnm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "pnm/errors.hpp"
#include "pnm/parallel.hpp"

namespace pnm {

void OptProblem::validate() const {
  if (!objective) throw ContractViolation("OptProblem: missing objective");
  if (lower.empty() || lower.size() != upper.size()) throw DimensionError("OptProblem: bound sizes differ");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw ContractViolation("OptProblem: lower bound above upper bound");
  }
  if (budget < 0) throw ContractViolation("OptProblem: negative budget");
}

OptProblem blp_problem(const DynamicalMapTable& maps, std::uint64_t seed, long budget, int threads) {
  OptProblem p;
  const auto lo = blp_lower_bounds();
  const auto hi = blp_upper_bounds();
  p.lower.assign(lo.begin(), lo.end());
  p.upper.assign(hi.begin(), hi.end());
  p.objective = [&maps](const std::vector<double>& x) {
    BlpPoint b;
    std::copy(x.begin(), x.end(), b.begin());
    return -blp_functional(maps, b);
  };
  p.seed = seed;
  p.budget = budget;
  p.threads = threads;
  return p;
}

double reflect_into(double x, double lo, double hi) {
  const double w = hi - lo;
  if (w <= 0.0) return lo;
  double y = std::fmod(x - lo, 2.0 * w);
  if (y < 0.0) y += 2.0 * w;
  if (y > w) y = 2.0 * w - y;
  return lo + y;
}

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<double> score(const OptProblem& p, const std::vector<std::vector<double>>& xs) {
  std::vector<double> f(xs.size());
  parallel_for(xs.size(), p.threads, [&](std::size_t i) { f[i] = p.objective(xs[i]); });
  return f;
}

}  // namespace

OptResult differential_evolution(const OptProblem& p, const DeOptions& opt) {
  p.validate();
  if (opt.pop_size < 8) throw ContractViolation("differential_evolution: pop_size must be >= 8");
  if (!(opt.cr > 0.0 && opt.cr <= 1.0)) throw ContractViolation("differential_evolution: cr must lie in (0, 1]");
  if (!(opt.f_weight > 0.0 && opt.f_weight <= 2.0))
    throw ContractViolation("differential_evolution: f_weight must lie in (0, 2]");
  if (opt.max_gen < 0) throw ContractViolation("differential_evolution: negative max_gen");

  const std::size_t d = p.dim();
  const auto np = static_cast<std::size_t>(opt.pop_size);
  OptResult r;
  r.seed = p.seed;

  std::vector<std::vector<double>> pop(np, std::vector<double>(d));
  {
    auto rng = stream(p.seed, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& x : pop) {
      for (std::size_t j = 0; j < d; ++j) x[j] = p.lower[j] + u(rng) * (p.upper[j] - p.lower[j]);
    }
  }
  if (p.budget > 0 && static_cast<long>(np) > p.budget)
    throw ContractViolation("differential_evolution: budget smaller than one population");
  std::vector<double> fit = score(p, pop);
  r.evaluations = static_cast<long>(np);

  auto best_index = [&] { return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin()); };
  r.history.emplace_back(0, fit[best_index()]);

  for (int gen = 1; gen <= opt.max_gen; ++gen) {
    if (p.budget > 0 && r.evaluations + static_cast<long>(np) > p.budget) {
      r.converged = false;
      r.warnings.push_back("evaluation budget exhausted at generation " + std::to_string(gen));
      break;
    }
    auto rng = stream(p.seed, static_cast<std::uint64_t>(gen));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, np - 1);
    std::uniform_int_distribution<std::size_t> pick_dim(0, d - 1);
    std::vector<std::vector<double>> trial(np, std::vector<double>(d));
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t a, b, c;
      do a = pick(rng); while (a == i);
      do b = pick(rng); while (b == i || b == a);
      do c = pick(rng); while (c == i || c == a || c == b);
      const std::size_t jrand = pick_dim(rng);
      for (std::size_t j = 0; j < d; ++j) {
        const bool cross = u(rng) < opt.cr || j == jrand;
        double v = cross ? pop[a][j] + opt.f_weight * (pop[b][j] - pop[c][j]) : pop[i][j];
        trial[i][j] = std::clamp(v, p.lower[j], p.upper[j]);
      }
    }
    const std::vector<double> tf = score(p, trial);
    r.evaluations += static_cast<long>(np);
    for (std::size_t i = 0; i < np; ++i) {
      if (tf[i] <= fit[i]) {
        pop[i] = std::move(trial[i]);
        fit[i] = tf[i];
      }
    }
    r.history.emplace_back(gen, fit[best_index()]);
  }

  const std::size_t bi = best_index();
  r.best_x = pop[bi];
  r.best_value = fit[bi];
  std::vector<std::size_t> order(np);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return fit[x] < fit[y]; });
  for (std::size_t i : order) r.population.emplace_back(pop[i], fit[i]);
  std::ostringstream os;
  os << "de pop=" << opt.pop_size << " F=" << opt.f_weight << " CR=" << opt.cr << " gen=" << opt.max_gen
     << " seed=" << p.seed;
  r.provenance = os.str();
  return r;
}

OptResult simulated_annealing(const OptProblem& p, const AnnealSchedule& s) {
  p.validate();
  if (s.t0 < 0.0 || !(s.cooling > 0.0 && s.cooling < 1.0) || s.stages < 1 || s.moves_per_stage < 1 ||
      !(s.step > 0.0)) {
    throw ContractViolation("simulated_annealing: invalid schedule");
  }
  const std::size_t d = p.dim();
  OptResult r;
  r.seed = p.seed;
  auto rng = stream(p.seed, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> x(d);
  for (std::size_t j = 0; j < d; ++j) x[j] = p.lower[j] + u(rng) * (p.upper[j] - p.lower[j]);
  double fx = p.objective(x);
  r.evaluations = 1;
  r.best_x = x;
  double best = fx;
  r.history.emplace_back(0, best);

  double temp = s.t0;
  for (int stage = 1; stage <= s.stages; ++stage) {
    for (int m = 0; m < s.moves_per_stage; ++m) {
      if (p.budget > 0 && r.evaluations >= p.budget) {
        r.converged = false;
        break;
      }
      std::vector<double> y(d);
      for (std::size_t j = 0; j < d; ++j) {
        y[j] = reflect_into(x[j] + s.step * (p.upper[j] - p.lower[j]) * gauss(rng), p.lower[j], p.upper[j]);
      }
      const double fy = p.objective(y);
      ++r.evaluations;
      const double draw = u(rng);
      const bool accept = fy <= fx || (temp > 0.0 && draw < std::exp(-(fy - fx) / temp));
      if (accept) {
        x = std::move(y);
        fx = fy;
        if (fx < best) {
          best = fx;
          r.best_x = x;
        }
      }
    }
    r.history.emplace_back(stage, best);
    if (!r.converged) {
      r.warnings.push_back("evaluation budget exhausted at stage " + std::to_string(stage));
      break;
    }
    temp *= s.cooling;
  }
  r.best_value = best;
  std::ostringstream os;
  os << "sa t0=" << s.t0 << " cooling=" << s.cooling << " stages=" << s.stages << " moves=" << s.moves_per_stage
     << " seed=" << p.seed;
  r.provenance = os.str();
  return r;
}

OptResult mixed_resolution_maximize(const MapFactory& factory, const Resolution& low, const Resolution& high,
                                    const MixedResolutionOptions& opt) {
  if (!(low.samples < high.samples)) throw ContractViolation("mixed_resolution_maximize: low.samples >= high.samples");
  if (opt.top_k < 0) throw ContractViolation("mixed_resolution_maximize: negative top_k");
  const DynamicalMapTable hi_maps = factory(high.window, high.samples);

  OptResult r;
  if (low.samples < 16) {
    r = differential_evolution(blp_problem(hi_maps, opt.seed, opt.budget, opt.threads), opt.de);
    r.warnings.push_back("low resolution of " + std::to_string(low.samples) +
                         " samples cannot resolve backflow; optimised at high resolution directly");
    r.provenance = "mixed-resolution fallback (high only): " + r.provenance;
    return r;
  }

  const DynamicalMapTable lo_maps = factory(low.window, low.samples);
  const OptResult stage1 = differential_evolution(blp_problem(lo_maps, opt.seed, opt.budget, opt.threads), opt.de);

  // Candidates: the stage-1 optimum plus up to top_k distinct runners-up.
  std::vector<std::vector<double>> cand;
  std::vector<double> low_values;
  for (const auto& [x, f] : stage1.population) {
    if (cand.size() >= static_cast<std::size_t>(opt.top_k) + 1) break;
    if (std::find(cand.begin(), cand.end(), x) != cand.end()) continue;
    cand.push_back(x);
    low_values.push_back(f);
  }
  const OptProblem hp = blp_problem(hi_maps, opt.seed, 0, opt.threads);
  const std::vector<double> hv = score(hp, cand);
  const std::size_t bi = static_cast<std::size_t>(std::min_element(hv.begin(), hv.end()) - hv.begin());

  r = stage1;
  r.best_x = cand[bi];
  r.best_value = hv[bi];
  r.evaluations = stage1.evaluations + static_cast<long>(cand.size());
  if (bi != 0) r.warnings.push_back("rank inversion: runner-up " + std::to_string(bi) + " won at high resolution");
  std::ostringstream os;
  os << "stage1[" << stage1.provenance << " window=" << low.window << " samples=" << low.samples
     << " best=" << -stage1.best_value << "] stage2[window=" << high.window << " samples=" << high.samples
     << " candidates=" << cand.size() << " best=" << -r.best_value << "]";
  r.provenance = os.str();
  return r;
}

}  // namespace pnm
