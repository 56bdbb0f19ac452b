#pragma once
// Strict JSON configuration for the CLI and the experiment drivers.
//
// Parsing is strict: unknown keys anywhere in the document are rejected, so
// a typo cannot silently fall back to a default. from_json validates every
// numeric invariant it can check without running anything (positive dt,
// horizon on the step grid, declared constants at least as large as the
// tight values implied by the model, ordered grids, ...).

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdelab/integrator.hpp"
#include "spdelab/model.hpp"
#include "spdelab/transport.hpp"

namespace spdelab {

struct RunConfig {
  std::uint64_t seed = 1;
  double dt = 1e-3;
  double horizon = 1.0;
  int members = 2;
  int threads = 1;
  InitialLaw initial = InitialLaw::point({});
};

enum class ExperimentKind {
  contraction,
  concentration,
  certificates,
  galerkin,
  moments,
  rates
};

const char* experiment_kind_name(ExperimentKind k);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::rates;

  // contraction
  std::vector<double> x0, y0;
  std::vector<double> obs_times;
  double rate_fraction = 0.75;

  // concentration / certificates
  LipschitzObservable observable;
  std::vector<double> r_grid;

  // certificates
  std::vector<double> lambda_grid;
  int samples = 0;
  double burn_in = 0.0;
  double spacing = 0.0;
  int block_size = 5;
  int bootstrap_replicates = 400;

  // galerkin
  std::vector<int> levels;
  int n_reference = 0;
  double tolerance_ratio = 0.1;

  // moments
  std::vector<int> mode_counts;
  double ratio_cap = 1.5;

  // rates
  double r_max = 1.0;
  double lambda_max = 10.0;
  int grid_points = 81;
};

struct Config {
  ModelSpec model;
  RunConfig run;
  ExperimentConfig experiment;

  static Config from_json(const nlohmann::json& j);
  static Config from_file(const std::string& path);

  // Normalized echo of the configuration (defaults resolved, interval mark
  // measures materialized). Feeding the echo back through from_json yields
  // the same echo.
  nlohmann::json to_json() const;
};

}  // namespace spdelab
