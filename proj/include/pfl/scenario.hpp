// scenario.hpp -- run configuration: schema, parsing, validation.
//
// Configs are JSON. Schema (see README for the full registry):
//   scenario   one of: standing-profile | traveling-front | circle-mcf |
//              circle-forced | drift-circle | ms-undercooling | grain-boundary
//   dim        1..3 (scenario-dependent)
//   extent     [Lx, ...] box [0,L] per axis, uniform spacing required
//   cells      [nx, ...]            -- explicit grid, fixed across the sweep
//   cells_rule {"h_over_eps": a}    -- per-eps grid with h ~ a * eps
//   epsilon    number or list (sweeps need >= 3, geometrically spaced)
//   dt_rule    {"kind":"cfl","gamma_h":g1,"gamma_eps":g2} or
//              {"kind":"fixed","dt":v}
//   scheme     "semi-implicit" (default) | "explicit"
//   horizon, output_interval, output_dir, seed, extinction_study
//   forcing / initial: scenario-specific blocks (see parse_config)
#pragma once

#include "pfl/grid.hpp"
#include "pfl/radial.hpp"
#include "pfl/solver.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace pfl {

enum class ScenarioKind {
  StandingProfile,
  TravelingFront,
  CircleMcf,
  CircleForced,
  DriftCircle,
  MsUndercooling,
  GrainBoundary,
};

std::string kind_name(ScenarioKind k);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::CircleMcf;
  int dim = 2;
  std::array<double, 3> extent{1, 1, 1};
  bool cells_scaled = false;        // true: per-eps grid from h_over_eps
  double h_over_eps = 0.25;
  std::array<int, 3> cells{0, 0, 0};
  std::vector<double> epsilons;
  StepperConfig stepper;            // dt rule, scheme, solver tolerances
  double horizon = 0.0;
  double output_interval = 0.0;
  std::string output_dir = "out";
  std::uint32_t seed = 1;
  bool extinction_study = false;

  // forcing parameters (scenario-specific)
  double theta = 0.0;               // circle-forced: g = theta sqrt(2W)
  double front_f = 0.0;             // traveling-front: g = f sqrt(2W)
  std::array<double, 3> drift_b{0, 0, 0};  // drift-circle: g = eps b.grad u + f sqrt(2W)
  double drift_f = 0.0;

  // initial geometry
  std::array<double, 3> center{0, 0, 0};
  double radius = 0.0;
  double front_pos = 0.0;           // plane position along x
  int plus_side = -1;               // +1: {u=+1} at x > front_pos, -1: at x <

  // coupled initial data
  double theta0 = 0.0;              // ms-undercooling uniform bulk value
  double conc_amp = 0.0;            // grain-boundary radial concentration bump
  double conc_width = 0.0;

  nlohmann::ordered_json raw;       // parsed source, echoed into summaries
};

struct Validation {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Parse or throw std::invalid_argument with a precise message (unknown keys,
// wrong types, missing required fields). load_config additionally throws
// std::runtime_error when the file cannot be opened.
ScenarioConfig parse_config(const nlohmann::ordered_json& j);
ScenarioConfig load_config(const std::string& path);

// Collect every validation problem (does not stop at the first).
Validation validate(const ScenarioConfig& cfg);
// Additional requirements for sweep mode (>= 3 epsilons, geometric spacing).
Validation validate_sweep(const ScenarioConfig& cfg);

Grid make_grid(const ScenarioConfig& cfg, double eps);

// Sharp-interface oracle for ball scenarios; false when no closed-form
// normal-velocity law applies (e.g. drift forcing).
bool radial_oracle_for(const ScenarioConfig& cfg, RadialOracle& out);

}  // namespace pfl
