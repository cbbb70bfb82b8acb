#pragma once

#include <string>

#include "bhscat/estimator.hpp"
#include "bhscat/randfield.hpp"

namespace bhscat {

/// Declarative experiment description; see configs/config_schema.json.
struct ExperimentConfig {
  int dim = 2;
  double order_m = 1.5;
  double sigma = 0.0;

  Box domain;                 // D
  std::vector<Bump> bumps;    // mu parameterization

  // Measurement geometry: `count` points on a circle (2D) or sphere (3D).
  Point meas_center;
  double meas_radius = 2.0;
  int meas_count = 8;

  // Field lattice: the synthesis box is D expanded by `margin` per side; the
  // solver sub-grid gets `solver_nodes` cells across D.
  double margin = 0.75;
  int solver_nodes = 64;

  BandSpec band;
  int ensemble = 1;
  std::uint64_t seed = 1;
  SolverOptions solver;

  // Inversion block.
  int recon_n = 32;
  bool lambda_discrepancy = true;
  double lambda_value = 1e-6;
  double noise_estimate = 0.0;

  int threads = 0;  // 0: BHSCAT_THREADS env or hardware default
  std::string out_dir = "out";
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_json(const ExperimentConfig& c);

/// Field-level validation with actionable messages; throws ConfigError.
void validate_config(const ExperimentConfig& c);

/// Derived pieces.
StrengthProfile strength_from_config(const ExperimentConfig& c);
GridSpec field_grid_from_config(const ExperimentConfig& c);
std::vector<Point> measurement_points(const ExperimentConfig& c);
int resolve_threads(const ExperimentConfig& c);

}  // namespace bhscat
