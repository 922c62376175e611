#include "pfl/runner.hpp"

#include "pfl/interface.hpp"
#include "pfl/ops.hpp"
#include "pfl/potential.hpp"
#include "pfl/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace pfl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ForcingSpec build_forcing(const ScenarioConfig& cfg) {
  ForcingSpec f;
  switch (cfg.kind) {
    case ScenarioKind::StandingProfile:
    case ScenarioKind::CircleMcf:
      f.kind = ForcingSpec::Kind::Zero;
      break;
    case ScenarioKind::TravelingFront:
      f.kind = ForcingSpec::Kind::ScaledScalar;
      f.theta = constant_fn(cfg.front_f);
      break;
    case ScenarioKind::CircleForced:
      f.kind = ForcingSpec::Kind::ScaledScalar;
      f.theta = constant_fn(cfg.theta);
      break;
    case ScenarioKind::DriftCircle:
      f.kind = ForcingSpec::Kind::DriftPotential;
      f.b = constant_vec_fn(cfg.drift_b);
      f.f = constant_fn(cfg.drift_f);
      break;
    default:
      break;  // coupled steppers own their forcing
  }
  return f;
}

ScalarField build_initial_u(const ScenarioConfig& cfg, const Grid& grid, double eps) {
  ProfileSpec p;
  if (cfg.kind == ScenarioKind::StandingProfile ||
      cfg.kind == ScenarioKind::TravelingFront) {
    p.kind = ProfileSpec::Kind::Plane;
    p.point = {cfg.front_pos, 0, 0};
    p.normal = {static_cast<double>(cfg.plus_side), 0, 0};
  } else {
    p.kind = ProfileSpec::Kind::Ball;
    p.center = cfg.center;
    p.radius = cfg.radius;
  }
  return well_prepared_initial(grid, p, eps);
}

ScalarField build_initial_conc(const ScenarioConfig& cfg, const Grid& grid) {
  // compactly supported C^2 radial bump around the domain center
  std::array<double, 3> ctr{0, 0, 0};
  for (int d = 0; d < grid.dim(); ++d) ctr[d] = 0.5 * grid.extent(d);
  const double w = cfg.conc_width, amp = cfg.conc_amp;
  return sample(grid, [&](const double* x) {
    double r2 = 0;
    for (int d = 0; d < grid.dim(); ++d) r2 += (x[d] - ctr[d]) * (x[d] - ctr[d]);
    const double s = std::sqrt(r2) / w;
    if (s >= 1.0) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * s);
    return amp * c * c * c * c;
  });
}

struct InterfaceProbe {
  bool empty = true;
  double wall_distance = std::numeric_limits<double>::infinity();
  double radius = kNaN;         // circle/sphere fit
  double front = kNaN;          // 1D crossing nearest to the previous front
  std::vector<std::array<double, 3>> pts;  // up to 8 spread interface points
};

InterfaceProbe probe_interface(const ScalarField& u, double prev_front) {
  const Grid& g = u.grid;
  InterfaceProbe pr;
  const InterfaceSet set = extract_interface(u);
  pr.empty = set.empty();
  if (pr.empty) return pr;

  std::vector<std::array<double, 3>> all;
  if (g.dim() == 2) {
    for (const auto& pl : set.lines)
      for (const auto& p : pl.pts) all.push_back({p[0], p[1], 0.0});
  } else {
    all = set.points;
  }
  for (const auto& p : all) {
    for (int d = 0; d < g.dim(); ++d)
      pr.wall_distance = std::min({pr.wall_distance, p[d], g.extent(d) - p[d]});
  }
  const std::size_t stride = std::max<std::size_t>(1, all.size() / 8);
  for (std::size_t i = 0; i < all.size() && pr.pts.size() < 8; i += stride)
    pr.pts.push_back(all[i]);

  if (g.dim() == 1) {
    double best = all[0][0];
    for (const auto& p : all)
      if (std::abs(p[0] - prev_front) < std::abs(best - prev_front)) best = p[0];
    pr.front = best;
  } else {
    const InterfaceMetrics m = interface_metrics(set);
    if (m.has_fit) pr.radius = m.radius;
  }
  return pr;
}

nlohmann::ordered_json assertion_json(const Assertion& a) {
  nlohmann::ordered_json j;
  j["name"] = a.name;
  j["measured"] = a.measured;
  j["relation"] = a.relation;
  j["bound"] = a.bound;
  j["pass"] = a.pass;
  return j;
}

}  // namespace

const std::vector<std::pair<std::string, double DiagRow::*>>& DiagRow::columns() {
  static const std::vector<std::pair<std::string, double DiagRow::*>> cols = {
      {"t", &DiagRow::t},
      {"dt", &DiagRow::dt},
      {"steps", &DiagRow::steps},
      {"cg_iters", &DiagRow::cg_iters},
      {"energy", &DiagRow::energy},
      {"max_energy", &DiagRow::max_energy},
      {"max_abs_u", &DiagRow::max_abs_u},
      {"lambda", &DiagRow::lambda},
      {"lambda1", &DiagRow::lambda1},
      {"action", &DiagRow::action},
      {"squares", &DiagRow::squares},
      {"kinetic", &DiagRow::kinetic},
      {"action_rel", &DiagRow::action_rel},
      {"dissipation_rel", &DiagRow::dissipation_rel},
      {"energy_bound_ratio", &DiagRow::energy_bound_ratio},
      {"disc_l1", &DiagRow::disc_l1},
      {"disc_rel", &DiagRow::disc_rel},
      {"willmore", &DiagRow::willmore},
      {"proj_residual", &DiagRow::proj_residual},
      {"proj_kinetic", &DiagRow::proj_kinetic},
      {"radius_est", &DiagRow::radius_est},
      {"radius_oracle", &DiagRow::radius_oracle},
      {"radius_err_rel", &DiagRow::radius_err_rel},
      {"front_pos", &DiagRow::front_pos},
      {"front_oracle", &DiagRow::front_oracle},
      {"pairing_max", &DiagRow::pairing_max},
      {"firstvar_max", &DiagRow::firstvar_max},
      {"density_ratio", &DiagRow::density_ratio},
      {"conserved_mass", &DiagRow::conserved_mass},
      {"conserved_rel", &DiagRow::conserved_rel},
      {"identity_rel", &DiagRow::identity_rel},
      {"conc_mass", &DiagRow::conc_mass},
      {"conc_rel", &DiagRow::conc_rel},
      {"lyapunov", &DiagRow::lyapunov},
      {"lyap_violation_rel", &DiagRow::lyap_violation_rel},
  };
  return cols;
}

void write_rows_csv(const std::string& path, const std::vector<DiagRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("csv: cannot open " + path);
  os.precision(17);
  const auto& cols = DiagRow::columns();
  for (std::size_t c = 0; c < cols.size(); ++c)
    os << cols[c].first << (c + 1 < cols.size() ? "," : "\n");
  for (const DiagRow& r : rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double v = r.*(cols[c].second);
      if (std::isfinite(v)) os << v;
      os << (c + 1 < cols.size() ? "," : "\n");
    }
  }
}

Assertion make_assertion(const std::string& name, double measured,
                         const std::string& relation, double bound) {
  Assertion a{name, measured, bound, relation, false};
  if (relation == "<=")
    a.pass = measured <= bound;
  else if (relation == ">=")
    a.pass = measured >= bound;
  else
    throw std::invalid_argument("assertion relation must be <= or >=");
  // non-finite measurements never pass
  if (!std::isfinite(measured)) a.pass = false;
  return a;
}

RunResult run_scenario(const ScenarioConfig& cfg, double eps, std::string out_dir) {
  {
    Validation v = validate(cfg);
    if (!v.ok()) {
      std::string msg = "invalid config:";
      for (const auto& e : v.errors) msg += "\n  - " + e;
      throw std::invalid_argument(msg);
    }
  }
  const Grid grid = make_grid(cfg, eps);
  const bool is_ms = cfg.kind == ScenarioKind::MsUndercooling;
  const bool is_grain = cfg.kind == ScenarioKind::GrainBoundary;
  const bool is_1d = grid.dim() == 1;

  RunResult R;
  R.eps = eps;

  // steppers and state
  std::unique_ptr<AcStepper> ac;
  std::unique_ptr<MsStepper> ms;
  std::unique_ptr<GrainStepper> grain;
  SolverState plain_state;
  MsState ms_state;
  GrainState grain_state;
  SolverState* st = nullptr;

  ScalarField u0 = build_initial_u(cfg, grid, eps);
  if (is_ms) {
    ms = std::make_unique<MsStepper>(grid, eps, cfg.stepper);
    ScalarField th0(grid);
    th0.a.setConstant(cfg.theta0);
    ms_state = ms->make_state(std::move(u0), std::move(th0));
    st = &ms_state.ac;
  } else if (is_grain) {
    grain = std::make_unique<GrainStepper>(grid, eps, cfg.stepper);
    grain_state = grain->make_state(std::move(u0), build_initial_conc(cfg, grid));
    st = &grain_state.ac;
  } else {
    ac = std::make_unique<AcStepper>(grid, eps, build_forcing(cfg), cfg.stepper);
    plain_state = AcStepper::make_state(grid, eps, std::move(u0));
    st = &plain_state;
  }
  R.energy0 = st->energy;

  RadialOracle oracle;
  const bool has_oracle = radial_oracle_for(cfg, oracle);

  Battery battery = make_battery(grid, cfg.horizon, cfg.seed);
  BatteryAccumulator acc(grid, battery);

  const StepContext* ctx = is_ms      ? &ms->context()
                           : is_grain ? &grain->context()
                                      : &ac->context();

  R.extinction_measured = kNaN;
  R.front_speed_est = kNaN;
  double prev_front = cfg.front_pos;
  std::vector<std::pair<double, double>> front_samples;
  VectorField vel;
  double proj_ratio_max = 0.0;
  StepInfo last_info;

  auto sample = [&](double t) {
    DiagRow r;
    r.t = t;
    r.dt = st->steps ? last_info.dt : kNaN;
    r.steps = static_cast<double>(st->steps);
    r.cg_iters = st->steps ? last_info.cg_iterations : kNaN;
    r.energy = st->energy;
    r.max_energy = st->max_energy;
    r.max_abs_u = st->max_abs_u;
    const SolverTallies& tl = st->tallies;
    r.lambda = tl.lambda;
    r.lambda1 = tl.lambda1;
    r.action = tl.action;
    r.squares = tl.squares;
    r.kinetic = tl.kinetic;
    r.action_rel = std::abs(tl.action - tl.lambda) / std::max(tl.lambda, R.energy0);
    const double scale = R.energy0 + 0.5 * tl.lambda;
    r.dissipation_rel =
        std::abs(st->energy - R.energy0 - 0.5 * (tl.lambda - tl.squares)) / scale;
    r.energy_bound_ratio = st->max_energy / scale;
    r.disc_l1 = discrepancy_l1(grid, st->u.a, eps);
    r.disc_rel = r.disc_l1 / std::max(st->energy, 1e-300);
    r.willmore = willmore_energy(grid, st->u.a, eps);

    if (st->steps > 0) {
      diffuse_velocity(grid, *ctx->dtu, *ctx->u_mid, vel);
      double kin = 0.0;
      r.proj_residual = projection_residual(grid, vel, *ctx->u_mid, eps, &kin);
      r.proj_kinetic = kin;
      if (kin > 0) proj_ratio_max = std::max(proj_ratio_max, r.proj_residual / kin);
    } else {
      r.proj_residual = r.proj_kinetic = kNaN;
    }

    const InterfaceProbe pr = probe_interface(st->u, prev_front);
    r.radius_est = pr.radius;
    r.radius_oracle = has_oracle ? radial_radius(oracle, t) : kNaN;
    r.radius_err_rel = (std::isfinite(pr.radius) && has_oracle && r.radius_oracle > 0)
                           ? std::abs(pr.radius - r.radius_oracle) / r.radius_oracle
                           : kNaN;
    r.front_pos = pr.front;
    if (is_1d && std::isfinite(pr.front)) {
      prev_front = pr.front;
      front_samples.emplace_back(t, pr.front);
    }
    if (cfg.kind == ScenarioKind::TravelingFront)
      r.front_oracle = cfg.front_pos - cfg.plus_side * cfg.front_f * t;
    else if (cfg.kind == ScenarioKind::StandingProfile)
      r.front_oracle = cfg.front_pos;
    else
      r.front_oracle = kNaN;

    double fv = 0.0, pairing = 0.0;
    for (const VectorTestFn& eta : battery.eta) {
      fv = std::max(fv, std::abs(first_variation(st->u, eps, eta)));
      pairing = std::max(pairing, curvature_pairing_residual(st->u, eps, eta));
    }
    r.firstvar_max = battery.eta.empty() ? kNaN : fv;
    r.pairing_max = battery.eta.empty() ? kNaN : pairing;

    std::vector<std::array<double, 3>> centers;
    std::array<double, 3> mid{0, 0, 0};
    for (int d = 0; d < grid.dim(); ++d) mid[d] = 0.5 * grid.extent(d);
    centers.push_back(mid);
    for (const auto& p : pr.pts) centers.push_back(p);
    r.density_ratio = density_ratio_sup(st->u, eps, centers);

    if (is_ms) {
      r.conserved_mass = ms->conserved_mass(ms_state);
      r.conserved_rel = std::abs(r.conserved_mass - ms_state.conserved0) /
                        std::max(std::abs(ms_state.conserved0), 1e-300);
      r.identity_rel =
          std::abs(ms->energy_identity_residual(ms_state)) / ms_state.anchor0;
      R.coupled_sup = std::max(R.coupled_sup, ms_state.theta.a.abs().maxCoeff());
      r.conc_mass = r.conc_rel = r.lyapunov = r.lyap_violation_rel = kNaN;
    } else if (is_grain) {
      r.conc_mass = grain->conc_mass(grain_state);
      r.conc_rel = std::abs(r.conc_mass - grain_state.mass0) /
                   std::max(std::abs(grain_state.mass0), 1e-300);
      r.lyapunov = grain_state.lyapunov;
      r.lyap_violation_rel =
          grain_state.violation_max / std::max(std::abs(grain_state.lyapunov0), 1e-300);
      R.coupled_sup = std::max(R.coupled_sup, grain_state.conc.a.abs().maxCoeff());
      r.conserved_mass = r.conserved_rel = r.identity_rel = kNaN;
    } else {
      r.conserved_mass = r.conserved_rel = r.identity_rel = kNaN;
      r.conc_mass = r.conc_rel = r.lyapunov = r.lyap_violation_rel = kNaN;
    }
    R.rows.push_back(r);
    return pr;
  };

  // artifacts
  const bool write = !out_dir.empty();
  if (write) std::filesystem::create_directories(out_dir);
  auto snapshot_state = [&](const std::string& tag) {
    if (!write) return;
    Snapshot s;
    s.grid = grid;
    s.time = st->t;
    s.eps = eps;
    s.fields.emplace_back("u", st->u.a);
    if (is_ms) s.fields.emplace_back("theta", ms_state.theta.a);
    if (is_grain) s.fields.emplace_back("conc", grain_state.conc.a);
    write_snapshot(out_dir + "/snapshot_" + tag + ".bin", s);
    write_interface_csv(out_dir + "/interface_" + tag + ".csv",
                        extract_interface(st->u));
  };

  sample(0.0);
  snapshot_state("initial");

  const double dt_base = cfg.stepper.default_dt(grid, eps);
  const double tiny = 1e-12 * std::max(cfg.horizon, dt_base);
  R.stop_reason = "horizon";
  long ks = 1;
  bool failed = false;
  while (st->t < cfg.horizon - tiny) {
    const double target = std::min(cfg.horizon, ks * cfg.output_interval);
    const double dt = std::min(dt_base, target - st->t);
    if (dt <= tiny) {  // fp guard: land exactly on the target
      ++ks;
      continue;
    }
    try {
      if (is_ms) {
        last_info = ms->step(ms_state, dt);
        acc.accumulate(*ctx);
        acc.accumulate_bulk(*ctx, ms->theta_before(), ms_state.theta.a);
      } else if (is_grain) {
        last_info = grain->step(grain_state, dt);
        acc.accumulate(*ctx);
      } else {
        last_info = ac->step(plain_state, dt);
        acc.accumulate(*ctx);
      }
    } catch (const StepFailure& e) {
      R.status = 3;
      R.stop_reason = "failure";
      R.message = e.what();
      failed = true;
      break;
    }
    if (st->t >= target - tiny) {
      ++ks;
      const InterfaceProbe pr = sample(st->t);
      if (pr.empty) {
        R.stop_reason = "extinction";
        R.extinction_measured = st->t;
        break;
      }
      if (pr.wall_distance < 5.0 * eps) {
        R.stop_reason = "margin";
        break;
      }
    }
  }
  if (!failed && (R.rows.empty() || R.rows.back().t < st->t - tiny)) sample(st->t);
  R.t_end = st->t;
  R.steps = st->steps;
  R.tallies = st->tallies;
  R.max_energy = st->max_energy;
  R.max_abs_u = st->max_abs_u;
  snapshot_state("final");

  // front speed fit (1D scenarios)
  if (is_1d && front_samples.size() >= 2) {
    try {
      R.front_speed_est = front_speed(front_samples, grid.spacing());
    } catch (const std::exception& e) {
      R.front_speed_error = e.what();
    }
  }

  R.brakke_slack = acc.brakke_slack(R.tallies.lambda);
  R.l2flow = acc.l2flow_residual();
  if (is_ms) R.bulk_residual = acc.bulk_residual();

  // structural assertions evaluated on every run
  if (!failed && !R.rows.empty()) {
    const DiagRow& fin = R.rows.back();
    R.assertions.push_back(
        make_assertion("energy-bound", fin.energy_bound_ratio, "<=", 1.02));
    R.assertions.push_back(
        make_assertion("dissipation-closure", fin.dissipation_rel, "<=", 0.02));
    R.assertions.push_back(
        make_assertion("projection-residual", proj_ratio_max, "<=", 1e-20));
    double slack_min = std::numeric_limits<double>::infinity();
    for (double s : R.brakke_slack) slack_min = std::min(slack_min, s);
    R.assertions.push_back(
        make_assertion("brakke-slack", slack_min, ">=", -1e-2 * R.energy0));
    double sup_theta = -1.0;  // sup of the sqrt(2W)-scaled forcing amplitude
    if (cfg.kind == ScenarioKind::TravelingFront) sup_theta = std::abs(cfg.front_f);
    if (cfg.kind == ScenarioKind::CircleForced) sup_theta = std::abs(cfg.theta);
    if (is_ms) sup_theta = R.coupled_sup;
    if (sup_theta >= 0.0 && R.t_end > 0.0)
      R.assertions.push_back(make_assertion(
          "forcing-budget", R.tallies.lambda, "<=",
          4.0 * sup_theta * sup_theta * R.t_end * R.max_energy + 1e-300));
    if (is_grain) {
      R.assertions.push_back(make_assertion(
          "max-principle", R.max_abs_u, "<=", 1.0 + eps * R.coupled_sup + 1e-8));
    } else if (is_ms || cfg.kind == ScenarioKind::StandingProfile ||
               cfg.kind == ScenarioKind::TravelingFront ||
               cfg.kind == ScenarioKind::CircleMcf ||
               cfg.kind == ScenarioKind::CircleForced) {
      // forcing vanishes at the wells: |u| <= 1 up to solver tolerance
      R.assertions.push_back(
          make_assertion("max-principle", R.max_abs_u, "<=", 1.0 + 1e-8));
    }
  }

  // summary
  nlohmann::ordered_json j;
  j["schema"] = "pfl-run-1";
  j["scenario"] = kind_name(cfg.kind);
  j["eps"] = eps;
  j["config"] = cfg.raw;
  j["grid"] = {{"dim", grid.dim()},
               {"cells", {grid.cells()[0], grid.cells()[1], grid.cells()[2]}},
               {"spacing", grid.spacing()}};
  j["status"] = R.status;
  j["stop_reason"] = R.stop_reason;
  if (!R.message.empty()) j["message"] = R.message;
  j["t_end"] = R.t_end;
  j["steps"] = R.steps;
  j["energy0"] = R.energy0;
  j["max_energy"] = R.max_energy;
  j["max_abs_u"] = R.max_abs_u;
  j["tallies"] = {{"action", R.tallies.action},
                  {"lambda", R.tallies.lambda},
                  {"lambda1", R.tallies.lambda1},
                  {"squares", R.tallies.squares},
                  {"kinetic", R.tallies.kinetic}};
  j["extinction_measured"] = R.extinction_measured;
  j["front_speed"] = R.front_speed_est;
  if (!R.front_speed_error.empty()) j["front_speed_error"] = R.front_speed_error;
  if (!R.rows.empty()) {
    nlohmann::ordered_json fin;
    for (const auto& [name, member] : DiagRow::columns())
      fin[name] = R.rows.back().*member;
    j["final"] = fin;
  }
  j["battery"] = {{"brakke_slack", R.brakke_slack},
                  {"l2flow", R.l2flow},
                  {"bulk_residual", R.bulk_residual}};
  nlohmann::ordered_json as = nlohmann::ordered_json::array();
  for (const auto& a : R.assertions) as.push_back(assertion_json(a));
  j["assertions"] = as;
  R.summary = std::move(j);

  if (write) {
    write_rows_csv(out_dir + "/record.csv", R.rows);
    std::ofstream os(out_dir + "/summary.json");
    os << summary_text(R.summary) << "\n";
  }
  return R;
}

std::string summary_text(const nlohmann::ordered_json& j) { return j.dump(2); }

}  // namespace pfl
