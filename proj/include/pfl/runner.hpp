// runner.hpp -- execution of one (scenario, eps) run: stepping, sampled
// diagnostics rows, runtime guards, artifacts.
//
// Guards while stepping:
//  * solver breakdown / non-finite field  -> status 3, partial artifacts
//  * interface within 5 eps of the boundary -> clean stop ("margin")
//  * interface vanished                     -> clean stop ("extinction")
// Samples are taken every output_interval (steps are clipped to land on
// sample times exactly), plus t = 0 and the stop time.
#pragma once

#include "pfl/coupled.hpp"
#include "pfl/diagnostics.hpp"
#include "pfl/scenario.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace pfl {

// One sampled diagnostics row. Quantities that do not apply to the scenario
// hold NaN (empty cells in CSV, null in JSON).
struct DiagRow {
  double t = 0, dt = 0, steps = 0, cg_iters = 0;
  double energy = 0, max_energy = 0, max_abs_u = 0;
  double lambda = 0, lambda1 = 0, action = 0, squares = 0, kinetic = 0;
  double action_rel = 0;          // |action - lambda| / max(lambda, E0)
  double dissipation_rel = 0;     // |E - E0 - (lambda - squares)/2| / (E0 + lambda/2)
  double energy_bound_ratio = 0;  // max_energy / (E0 + lambda/2)
  double disc_l1 = 0, disc_rel = 0, willmore = 0;
  double proj_residual = 0, proj_kinetic = 0;
  double radius_est = 0, radius_oracle = 0, radius_err_rel = 0;
  double front_pos = 0, front_oracle = 0;
  double pairing_max = 0, firstvar_max = 0, density_ratio = 0;
  double conserved_mass = 0, conserved_rel = 0, identity_rel = 0;
  double conc_mass = 0, conc_rel = 0, lyapunov = 0, lyap_violation_rel = 0;

  // Stable column registry shared by the CSV writer and the JSON summary.
  static const std::vector<std::pair<std::string, double DiagRow::*>>& columns();
};

void write_rows_csv(const std::string& path, const std::vector<DiagRow>& rows);

struct Assertion {
  std::string name;
  double measured = 0;
  double bound = 0;
  std::string relation;  // "<=", ">=" -- measured <relation> bound
  bool pass = false;
};

Assertion make_assertion(const std::string& name, double measured,
                         const std::string& relation, double bound);

struct RunResult {
  int status = 0;  // 0 completed, 3 runtime failure
  std::string message;
  std::string stop_reason;  // horizon | extinction | margin | failure
  double eps = 0;
  double t_end = 0;
  long steps = 0;
  double energy0 = 0;
  double extinction_measured = 0;  // NaN unless an extinction was observed
  double front_speed_est = 0;      // NaN unless a 1D front fit succeeded
  std::string front_speed_error;
  SolverTallies tallies;
  double max_energy = 0, max_abs_u = 0;
  double coupled_sup = 0;  // sup |theta| or sup |c| over samples (coupled runs)
  std::vector<DiagRow> rows;
  std::vector<double> brakke_slack, l2flow, bulk_residual;
  std::vector<Assertion> assertions;
  nlohmann::ordered_json summary;
};

// Execute one run. If out_dir is nonempty, writes record.csv, summary.json,
// interface_*.csv and initial/final snapshots there (creating directories).
RunResult run_scenario(const ScenarioConfig& cfg, double eps, std::string out_dir);

// JSON verdict text, byte-stable across reruns of the same config.
std::string summary_text(const nlohmann::ordered_json& j);

}  // namespace pfl
