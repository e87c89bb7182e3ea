#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pnm/bath.hpp"
#include "pnm/fitting.hpp"
#include "pnm/measures.hpp"
#include "pnm/optimize.hpp"
#include "pnm/siv.hpp"

namespace pnm {

struct GridAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 2;

  std::vector<double> values() const;
};

// One or two axes; the first axis is the slow (row) index.
struct GridSpec {
  std::vector<GridAxis> axes;
  std::uint64_t base_seed = 0;

  void validate() const;
  std::size_t size() const;
  std::vector<std::size_t> shape() const;
  std::vector<double> coords(std::size_t index) const;
  std::uint64_t seed_for(std::size_t index) const { return base_seed ^ static_cast<std::uint64_t>(index); }
};

struct PointRecord {
  std::size_t index = 0;
  std::vector<double> coords;
  double value = 0.0;
  std::uint64_t seed = 0;
  long evaluations = 0;
  double wall_seconds = 0.0;
  std::string status = "ok";  // ok | invalid | infinite
  std::string message;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> axis_values;
  std::vector<double> values;  // row-major over axis_values
  std::vector<PointRecord> records;
  std::map<std::string, std::string> metadata;

  std::vector<std::size_t> shape() const;
  double at(std::size_t i, std::size_t j = 0) const;
};

using PointFunction = std::function<PointRecord(std::size_t index, const std::vector<double>& coords,
                                                std::uint64_t seed)>;

struct SweepOptions {
  int threads = 0;
  std::string checkpoint_path;  // empty disables checkpointing
  bool resume = true;
};

// Evaluates every grid point in parallel. Exceptions from a point mark it
// invalid and the sweep continues. Completed points found in the checkpoint
// file are reused when resuming.
SweepResult run_grid(const GridSpec& spec, const PointFunction& fn, const SweepOptions& opt = {});

// Mirrors a first-quadrant map across both axes. A zero coordinate is shared
// rather than duplicated.
SweepResult reflect_quadrant(const SweepResult& quadrant);

// FNV-1a 64-bit digest, hex encoded.
std::string config_hash(const std::string& text);

// Single-mode experiment in the longitudinal or transverse field.
struct SingleModeConfig {
  SivParams siv;
  PhononModeParams mode;
  double gamma_siv = 0.0;
  double n_delta = 0.0;
  int fock_n0 = 1;
  int initial_level = 0;       // label index of the initial SiV state
  double window = 30.0;        // in units of 1/|g|
  std::size_t samples = 1000;
  SivForm form = SivForm::kClosedForm;
};

struct NdRun {
  Trajectory trajectory;
  DensityMatrix steady;
  std::vector<double> distance;
  NmResult nd;
};

NdRun single_mode_nd(const SingleModeConfig& cfg);

// N_D over (g, B_z). Axis 0 is g (rad/s), axis 1 is B_z (T).
SweepResult nd_vs_bz(const SingleModeConfig& cfg, const std::vector<double>& bz_grid,
                     const std::vector<double>& g_list, const SweepOptions& opt = {});

// Reduced maps of the single-mode model; window in units of 1/|g|.
MapFactory single_mode_map_factory(const SingleModeConfig& cfg);

struct BlpSearchConfig {
  Resolution low{30.0, 300};
  Resolution high{30.0, 1000};
  MixedResolutionOptions opt;
};

// N_BLP over the (B_x, B_z) first quadrant, then reflected.
SweepResult blp_map(const SingleModeConfig& cfg, const GridSpec& quadrant, const BlpSearchConfig& search,
                    const SweepOptions& opt = {});

// omega_ph / (E_n - E_m) of the full transverse-field Hamiltonian, with
// levels numbered from 1 in ascending energy. Axes are (B_x, B_z).
SweepResult spectrum_ratio_map(const SivParams& siv, const PhononModeParams& mode, const GridSpec& grid, int n,
                               int m, const SweepOptions& opt = {});

struct BathSweepConfig {
  SivParams siv;
  BathParams bath;  // temperature is overwritten per point
  double window = 0.0;  // seconds
  std::size_t lattice_points = 2001;
  BlpSearchConfig search;  // windows interpreted in seconds
  RateOptions rates;
};

struct TemperatureScan {
  SweepResult sweep;
  std::optional<TanhFit> fit;
  std::string fit_error;
};

// N_BLP of the structured-bath model at each temperature, then a tanh fit.
TemperatureScan blp_vs_temperature(const BathSweepConfig& cfg, const std::vector<double>& temperatures,
                                   const SweepOptions& opt = {});

}  // namespace pnm
