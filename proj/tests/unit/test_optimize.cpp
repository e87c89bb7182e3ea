#include <cmath>
#include <numbers>

#include "common.hpp"
#include "doctest.h"
#include "pnm/errors.hpp"
#include "pnm/optimize.hpp"

using namespace pnm;

namespace {

OptProblem quadratic(std::uint64_t seed, int threads = 1) {
  OptProblem p;
  p.objective = [](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - 0.3 * static_cast<double>(i)) * (x[i] - 0.3 * static_cast<double>(i));
    return s;
  };
  p.lower.assign(4, -5.0);
  p.upper.assign(4, 5.0);
  p.seed = seed;
  p.threads = threads;
  return p;
}

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("DE finds the minimum of a shifted quadratic") {
  DeOptions o;
  o.pop_size = 40;
  o.max_gen = 200;
  const OptResult r = differential_evolution(quadratic(7), o);
  CHECK(r.best_value < 1e-8);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.best_x[i] == doctest::Approx(0.3 * static_cast<double>(i)).epsilon(1e-3));
  CHECK(r.evaluations == 40L * 201L);
  CHECK(r.best_value == r.population.front().second);
  REQUIRE(r.population.size() == 40);
  for (std::size_t k = 1; k < r.population.size(); ++k) CHECK(r.population[k - 1].second <= r.population[k].second);
}

TEST_CASE("DE on Rastrigin reaches the global basin") {
  OptProblem p;
  p.objective = [](const std::vector<double>& x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
  };
  p.lower.assign(2, -5.12);
  p.upper.assign(2, 5.12);
  p.seed = 11;
  DeOptions o;
  o.pop_size = 60;
  o.max_gen = 300;
  const OptResult r = differential_evolution(p, o);
  CHECK(r.best_value < 1e-6);
}

TEST_CASE("DE history is monotone and every point is feasible") {
  OptProblem p = quadratic(3);
  std::vector<std::vector<double>> seen;
  const Objective inner = p.objective;
  p.objective = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < p.lower[i] || x[i] > p.upper[i]) throw std::logic_error("infeasible point");
    }
    return inner(x);
  };
  DeOptions o;
  o.pop_size = 16;
  o.max_gen = 30;
  const OptResult r = differential_evolution(p, o);
  for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k].second <= r.history[k - 1].second);
}

TEST_CASE("DE is deterministic for a seed and independent of the thread count") {
  DeOptions o;
  o.pop_size = 20;
  o.max_gen = 25;
  const OptResult a = differential_evolution(quadratic(99, 1), o);
  const OptResult b = differential_evolution(quadratic(99, 4), o);
  CHECK(a.best_x == b.best_x);
  CHECK(a.best_value == b.best_value);
  const OptResult c = differential_evolution(quadratic(100, 1), o);
  CHECK(c.best_x != a.best_x);
}

TEST_CASE("DE on a constant objective returns a point in the box") {
  OptProblem p;
  p.objective = [](const std::vector<double>&) { return 2.5; };
  p.lower = {0.0, 1.0};
  p.upper = {1.0, 3.0};
  DeOptions o;
  o.pop_size = 8;
  o.max_gen = 5;
  const OptResult r = differential_evolution(p, o);
  CHECK(r.best_value == 2.5);
  CHECK(r.best_x[0] >= 0.0);
  CHECK(r.best_x[1] <= 3.0);
}

TEST_CASE("DE budget and argument checks") {
  OptProblem p = quadratic(1);
  p.budget = 100;
  DeOptions o;
  o.pop_size = 20;
  o.max_gen = 50;
  const OptResult r = differential_evolution(p, o);
  CHECK(r.evaluations <= 100);
  CHECK_FALSE(r.warnings.empty());
  p.budget = 5;
  CHECK_THROWS_AS(differential_evolution(p, o), ContractViolation);
  o.pop_size = 4;
  CHECK_THROWS_AS(differential_evolution(quadratic(1), o), ContractViolation);
  OptProblem bad = quadratic(1);
  bad.upper.pop_back();
  CHECK_THROWS_AS(bad.validate(), DimensionError);
}

TEST_CASE("simulated annealing") {
  AnnealSchedule s;
  s.stages = 200;
  s.moves_per_stage = 40;
  s.step = 0.05;
  const OptResult r = simulated_annealing(quadratic(5), s);
  // Fixed-width proposals (sigma 0.5) limit the final precision.
  CHECK(r.best_value < 2e-2);

  // Zero temperature accepts only improvements.
  const OptProblem p = quadratic(6);
  s.t0 = 0.0;
  const OptResult d = simulated_annealing(p, s);
  for (std::size_t k = 1; k < d.history.size(); ++k) CHECK(d.history[k].second <= d.history[k - 1].second);
  s.cooling = 1.0;
  CHECK_THROWS_AS(simulated_annealing(p, s), ContractViolation);
}

TEST_CASE("reflect_into") {
  CHECK(reflect_into(0.5, 0.0, 1.0) == 0.5);
  CHECK(reflect_into(1.2, 0.0, 1.0) == test::rel(0.8));
  CHECK(reflect_into(-0.3, 0.0, 1.0) == test::rel(0.3));
  const double far = reflect_into(7.3, 0.0, 1.0);
  CHECK(far >= 0.0);
  CHECK(far <= 1.0);
}

TEST_CASE("mixed resolution search") {
  const SingleModeConfig c = test::reference_single_mode(1, 3);
  const MapFactory f = single_mode_map_factory(c);
  MixedResolutionOptions o;
  o.de.pop_size = 16;
  o.de.max_gen = 6;
  o.seed = 4;
  const OptResult r = mixed_resolution_maximize(f, {20.0, 200}, {20.0, 600}, o);
  CHECK(-r.best_value > 0.0);
  CHECK(-r.best_value == test::rel(blp_functional(f(20.0, 600), [&] {
                                          BlpPoint x{};
                                          std::copy(r.best_x.begin(), r.best_x.end(), x.begin());
                                          return x;
                                        }())));
  CHECK(r.provenance.find("stage2") != std::string::npos);

  const OptResult fb = mixed_resolution_maximize(f, {20.0, 10}, {20.0, 200}, o);
  REQUIRE_FALSE(fb.warnings.empty());
  CHECK(fb.warnings.back().find("cannot resolve") != std::string::npos);
  CHECK_THROWS_AS(mixed_resolution_maximize(f, {20.0, 600}, {20.0, 600}, o), ContractViolation);
}

}  // TEST_SUITE
