#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pnm/measures.hpp"

namespace pnm {

using Objective = std::function<double(const std::vector<double>&)>;

// Minimisation problem over a box.
struct OptProblem {
  Objective objective;
  std::vector<double> lower;
  std::vector<double> upper;
  long budget = 0;  // maximum evaluations, 0 = unlimited
  std::uint64_t seed = 0;
  int threads = 1;

  std::size_t dim() const { return lower.size(); }
  void validate() const;
};

// Box of the eight Bloch angles with objective -BLP(x).
OptProblem blp_problem(const DynamicalMapTable& maps, std::uint64_t seed, long budget = 0, int threads = 1);

struct OptResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  long evaluations = 0;
  std::vector<std::pair<int, double>> history;  // (generation, best so far)
  std::uint64_t seed = 0;
  bool converged = true;
  std::vector<std::string> warnings;
  std::string provenance;
  // Final population sorted by value (DE only).
  std::vector<std::pair<std::vector<double>, double>> population;
};

struct DeOptions {
  int pop_size = 120;
  double f_weight = 0.8;
  double cr = 0.7;
  int max_gen = 60;
};

// DE/rand/1/bin with clamp repair. Trial vectors are drawn serially from a
// per-generation RNG stream, then scored in parallel.
OptResult differential_evolution(const OptProblem& p, const DeOptions& opt = {});

struct AnnealSchedule {
  double t0 = 1.0;
  double cooling = 0.95;  // geometric factor per stage
  int stages = 100;
  int moves_per_stage = 50;
  double step = 0.1;  // proposal sigma as a fraction of the box width
};

// Metropolis moves with box-reflected Gaussian proposals. t0 = 0 gives pure descent.
OptResult simulated_annealing(const OptProblem& p, const AnnealSchedule& s = {});

struct Resolution {
  double window = 0.0;
  std::size_t samples = 0;
};

struct MixedResolutionOptions {
  DeOptions de;
  int top_k = 3;
  std::uint64_t seed = 0;
  int threads = 1;
  long budget = 0;
};

// Stage 1 optimises -BLP on low-resolution maps; stage 2 re-scores the best
// and the top_k runners-up on high-resolution maps and keeps the best.
OptResult mixed_resolution_maximize(const MapFactory& factory, const Resolution& low, const Resolution& high,
                                    const MixedResolutionOptions& opt = {});

// Reflects a point back into [lo, hi].
double reflect_into(double x, double lo, double hi);

}  // namespace pnm
