#include "pfl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pfl {
namespace {

using json = nlohmann::ordered_json;

ScenarioKind kind_from(const std::string& s) {
  if (s == "standing-profile") return ScenarioKind::StandingProfile;
  if (s == "traveling-front") return ScenarioKind::TravelingFront;
  if (s == "circle-mcf") return ScenarioKind::CircleMcf;
  if (s == "circle-forced") return ScenarioKind::CircleForced;
  if (s == "drift-circle") return ScenarioKind::DriftCircle;
  if (s == "ms-undercooling") return ScenarioKind::MsUndercooling;
  if (s == "grain-boundary") return ScenarioKind::GrainBoundary;
  throw std::invalid_argument(
      "config: unknown scenario '" + s +
      "' (expected standing-profile, traveling-front, circle-mcf, circle-forced, "
      "drift-circle, ms-undercooling or grain-boundary)");
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

double num(const json& j, const std::string& key) {
  if (!j.contains(key)) fail("missing required key '" + key + "'");
  if (!j.at(key).is_number()) fail("'" + key + "' must be a number");
  return j.at(key).get<double>();
}

double num_or(const json& j, const std::string& key, double dflt) {
  return j.contains(key) ? num(j, key) : dflt;
}

template <class T>
void fixed_array(const json& j, const std::string& key, int want, T* out) {
  if (!j.contains(key)) fail("missing required key '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_array() || static_cast<int>(v.size()) != want)
    fail("'" + key + "' must be an array of length " + std::to_string(want));
  for (int d = 0; d < want; ++d) out[d] = v[d].get<T>();
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, val] : j.items())
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
}

}  // namespace

std::string kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::StandingProfile: return "standing-profile";
    case ScenarioKind::TravelingFront: return "traveling-front";
    case ScenarioKind::CircleMcf: return "circle-mcf";
    case ScenarioKind::CircleForced: return "circle-forced";
    case ScenarioKind::DriftCircle: return "drift-circle";
    case ScenarioKind::MsUndercooling: return "ms-undercooling";
    case ScenarioKind::GrainBoundary: return "grain-boundary";
  }
  return "?";
}

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) fail("top level must be an object");
  check_keys(j,
             {"scenario", "dim", "extent", "cells", "cells_rule", "epsilon", "dt_rule",
              "scheme", "horizon", "output_interval", "output_dir", "seed",
              "extinction_study", "forcing", "initial"},
             "top level");
  ScenarioConfig c;
  c.raw = j;
  if (!j.contains("scenario")) fail("missing required key 'scenario'");
  c.kind = kind_from(j.at("scenario").get<std::string>());
  for (const char* req : {"dim", "extent", "epsilon", "horizon"})
    if (!j.contains(req)) fail(std::string("missing required key '") + req + "'");

  c.dim = j.at("dim").get<int>();
  if (c.dim < 1 || c.dim > 3) fail("'dim' must be 1, 2 or 3");
  fixed_array(j, "extent", c.dim, c.extent.data());

  if (j.contains("cells") == j.contains("cells_rule"))
    fail("exactly one of 'cells' or 'cells_rule' is required");
  if (j.contains("cells")) {
    fixed_array(j, "cells", c.dim, c.cells.data());
  } else {
    const auto& r = j.at("cells_rule");
    check_keys(r, {"h_over_eps"}, "'cells_rule'");
    c.cells_scaled = true;
    c.h_over_eps = num(r, "h_over_eps");
  }

  if (j.at("epsilon").is_array())
    c.epsilons = j.at("epsilon").get<std::vector<double>>();
  else
    c.epsilons = {num(j, "epsilon")};

  if (j.contains("dt_rule")) {
    const auto& r = j.at("dt_rule");
    check_keys(r, {"kind", "gamma_h", "gamma_eps", "dt"}, "'dt_rule'");
    const std::string k = r.at("kind").get<std::string>();
    if (k == "cfl") {
      c.stepper.dt_rule = StepperConfig::DtRule::Cfl;
      c.stepper.gamma_h = num_or(r, "gamma_h", 0.2);
      c.stepper.gamma_eps = num_or(r, "gamma_eps", 0.2);
    } else if (k == "fixed") {
      c.stepper.dt_rule = StepperConfig::DtRule::Fixed;
      c.stepper.fixed_dt = num(r, "dt");
    } else {
      fail("dt_rule.kind must be 'cfl' or 'fixed'");
    }
  }
  if (j.contains("scheme")) {
    const std::string s = j.at("scheme").get<std::string>();
    if (s == "semi-implicit") c.stepper.scheme = StepperConfig::Scheme::SemiImplicit;
    else if (s == "explicit") c.stepper.scheme = StepperConfig::Scheme::Explicit;
    else fail("'scheme' must be 'semi-implicit' or 'explicit'");
  }

  c.horizon = num(j, "horizon");
  c.output_interval = num_or(j, "output_interval", c.horizon / 20.0);
  c.output_dir = j.contains("output_dir") ? j.at("output_dir").get<std::string>() : "out";
  c.seed = j.contains("seed") ? j.at("seed").get<std::uint32_t>() : 1u;
  c.extinction_study =
      j.contains("extinction_study") && j.at("extinction_study").get<bool>();

  const json forcing = j.contains("forcing") ? j.at("forcing") : json::object();
  const json initial = j.contains("initial") ? j.at("initial") : json::object();
  switch (c.kind) {
    case ScenarioKind::StandingProfile:
      check_keys(forcing, {}, "'forcing' (standing-profile takes none)");
      check_keys(initial, {"front_pos", "plus_side"}, "'initial'");
      c.front_pos = num_or(initial, "front_pos", 0.5 * c.extent[0]);
      c.plus_side = static_cast<int>(num_or(initial, "plus_side", 1));
      break;
    case ScenarioKind::TravelingFront:
      check_keys(forcing, {"f"}, "'forcing'");
      c.front_f = num(forcing, "f");
      check_keys(initial, {"front_pos", "plus_side"}, "'initial'");
      c.front_pos = num_or(initial, "front_pos", 0.5 * c.extent[0]);
      c.plus_side = static_cast<int>(num_or(initial, "plus_side", -1));
      break;
    case ScenarioKind::CircleMcf:
      check_keys(forcing, {}, "'forcing' (circle-mcf takes none)");
      check_keys(initial, {"center", "radius"}, "'initial'");
      fixed_array(initial, "center", c.dim, c.center.data());
      c.radius = num(initial, "radius");
      break;
    case ScenarioKind::CircleForced:
      check_keys(forcing, {"theta"}, "'forcing'");
      c.theta = num(forcing, "theta");
      check_keys(initial, {"center", "radius"}, "'initial'");
      fixed_array(initial, "center", c.dim, c.center.data());
      c.radius = num(initial, "radius");
      break;
    case ScenarioKind::DriftCircle:
      check_keys(forcing, {"b", "f"}, "'forcing'");
      fixed_array(forcing, "b", c.dim, c.drift_b.data());
      c.drift_f = num_or(forcing, "f", 0.0);
      check_keys(initial, {"center", "radius"}, "'initial'");
      fixed_array(initial, "center", c.dim, c.center.data());
      c.radius = num(initial, "radius");
      break;
    case ScenarioKind::MsUndercooling:
      check_keys(forcing, {}, "'forcing' (ms-undercooling is driven by theta)");
      check_keys(initial, {"center", "radius", "theta0"}, "'initial'");
      fixed_array(initial, "center", c.dim, c.center.data());
      c.radius = num(initial, "radius");
      c.theta0 = num_or(initial, "theta0", 0.0);
      break;
    case ScenarioKind::GrainBoundary:
      check_keys(forcing, {}, "'forcing' (grain-boundary is driven by c)");
      check_keys(initial, {"center", "radius", "conc_amp", "conc_width"}, "'initial'");
      fixed_array(initial, "center", c.dim, c.center.data());
      c.radius = num(initial, "radius");
      c.conc_amp = num_or(initial, "conc_amp", 0.0);
      c.conc_width = num_or(initial, "conc_width", 0.25 * c.extent[0]);
      break;
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    j = json::parse(is, nullptr, true, true);  // allow comments
  } catch (const std::exception& e) {
    throw std::invalid_argument("config: JSON parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

namespace {

// Closest distance from the initial interface to the domain boundary.
double boundary_margin(const ScenarioConfig& c) {
  if (c.kind == ScenarioKind::StandingProfile || c.kind == ScenarioKind::TravelingFront)
    return std::min(c.front_pos, c.extent[0] - c.front_pos);
  double wall = c.extent[0];
  for (int d = 0; d < c.dim; ++d)
    wall = std::min({wall, c.center[d], c.extent[d] - c.center[d]});
  return wall - c.radius;
}

}  // namespace

bool radial_oracle_for(const ScenarioConfig& cfg, RadialOracle& out) {
  switch (cfg.kind) {
    case ScenarioKind::CircleMcf:
      out = RadialOracle{cfg.dim, 0.0, cfg.radius};
      return true;
    case ScenarioKind::CircleForced:
      out = RadialOracle{cfg.dim, cfg.theta, cfg.radius};
      return true;
    default:
      return false;
  }
}

Grid make_grid(const ScenarioConfig& cfg, double eps) {
  std::array<int, 3> cells = cfg.cells;
  if (cfg.cells_scaled) {
    for (int d = 0; d < cfg.dim; ++d) {
      const double target = cfg.h_over_eps * eps;
      cells[d] = std::max(2, static_cast<int>(std::lround(cfg.extent[d] / target)));
    }
  }
  return Grid(cfg.dim, cells, cfg.extent);
}

Validation validate(const ScenarioConfig& c) {
  Validation v;
  auto err = [&v](const std::string& m) { v.errors.push_back(m); };
  auto warn = [&v](const std::string& m) { v.warnings.push_back(m); };
  std::ostringstream os;

  // dimensionality per scenario
  const int d = c.dim;
  switch (c.kind) {
    case ScenarioKind::StandingProfile:
    case ScenarioKind::TravelingFront:
      if (d != 1) err(kind_name(c.kind) + " requires dim = 1 (got " + std::to_string(d) + ")");
      break;
    case ScenarioKind::CircleMcf:
      if (d != 2 && d != 3) err("circle-mcf requires dim = 2 or 3");
      break;
    default:
      if (d != 2) err(kind_name(c.kind) + " requires dim = 2");
      break;
  }

  for (int a = 0; a < c.dim; ++a)
    if (!(c.extent[a] > 0))
      err("extent[" + std::to_string(a) + "] must be positive");

  if (c.epsilons.empty()) err("epsilon list is empty");
  for (double e : c.epsilons)
    if (!(e > 0)) err("epsilon values must be positive");

  if (c.cells_scaled) {
    if (!(c.h_over_eps > 0) || c.h_over_eps > 0.5)
      err("cells_rule.h_over_eps must be in (0, 0.5]");
  } else {
    for (int a = 0; a < c.dim; ++a)
      if (c.cells[a] < 8) err("cells[" + std::to_string(a) + "] must be at least 8");
    // uniform spacing across axes
    if (std::all_of(c.cells.begin(), c.cells.begin() + c.dim,
                    [](int n) { return n >= 2; })) {
      const double h0 = c.extent[0] / c.cells[0];
      for (int a = 1; a < c.dim; ++a) {
        const double ha = c.extent[a] / c.cells[a];
        if (std::abs(ha - h0) > 1e-12 * h0) {
          os.str("");
          os << "spacing must be uniform across axes: extent/cells gives " << h0
             << " on axis 0 but " << ha << " on axis " << a;
          err(os.str());
        }
      }
    }
  }

  // resolution per epsilon: require h <= eps/2 (error) and flag h > eps/4;
  // past eps/3 the diffuse profile is effectively unresolved.
  for (double e : c.epsilons) {
    if (!(e > 0)) continue;
    double h = 0.0;
    if (c.cells_scaled) {
      h = c.h_over_eps * e;  // up to rounding
    } else if (c.cells[0] >= 2) {
      h = c.extent[0] / c.cells[0];
    } else {
      continue;
    }
    os.str("");
    os << "eps = " << e << ": h = " << h;
    if (h > 0.5 * e) {
      err(os.str() + " exceeds eps/2; the interface profile cannot be represented");
    } else if (h > e / 3.0) {
      warn(os.str() + " exceeds eps/3; results will be strongly under-resolved (target h <= eps/4)");
    } else if (h > 0.25 * e) {
      warn(os.str() + " exceeds the target resolution h <= eps/4");
    }
  }

  if (!(c.horizon > 0)) err("horizon must be positive");
  if (!(c.output_interval > 0) || c.output_interval > c.horizon)
    err("output_interval must lie in (0, horizon]");

  if (c.stepper.dt_rule == StepperConfig::DtRule::Fixed && !(c.stepper.fixed_dt > 0))
    err("dt_rule.dt must be positive");

  // initial geometry margin: interface at least 5 eps from the boundary
  const double margin = boundary_margin(c);
  for (double e : c.epsilons) {
    if (!(e > 0)) continue;
    if (margin < 5.0 * e) {
      os.str("");
      os << "initial interface is " << margin << " from the boundary, below 5 eps = "
         << 5.0 * e << " for eps = " << e;
      err(os.str());
    }
  }
  if (c.kind == ScenarioKind::CircleMcf || c.kind == ScenarioKind::CircleForced ||
      c.kind == ScenarioKind::DriftCircle || c.kind == ScenarioKind::MsUndercooling ||
      c.kind == ScenarioKind::GrainBoundary) {
    if (!(c.radius > 0)) err("initial.radius must be positive");
  }

  // horizon vs oracle extinction
  RadialOracle oracle;
  if (radial_oracle_for(c, oracle) && !c.extinction_study) {
    const double text = extinction_time(oracle);
    if (c.horizon >= text) {
      os.str("");
      os << "horizon " << c.horizon << " reaches past the oracle extinction time " << text
         << "; set extinction_study: true if that is intended";
      err(os.str());
    }
  }

  if (c.kind == ScenarioKind::GrainBoundary) {
    if (c.conc_width <= 0) err("initial.conc_width must be positive");
  }

  // explicit scheme stability at the configured dt
  if (c.stepper.scheme == StepperConfig::Scheme::Explicit &&
      c.stepper.dt_rule == StepperConfig::DtRule::Fixed) {
    for (double e : c.epsilons) {
      const double h = c.cells_scaled ? c.h_over_eps * e
                                      : (c.cells[0] >= 2 ? c.extent[0] / c.cells[0] : 0.0);
      if (h > 0 && c.stepper.fixed_dt > h * h / (2.0 * c.dim)) {
        os.str("");
        os << "explicit scheme with dt = " << c.stepper.fixed_dt
           << " violates the stability bound h^2/(2 dim) = " << h * h / (2.0 * c.dim)
           << " for eps = " << e;
        err(os.str());
      }
    }
  }
  return v;
}

Validation validate_sweep(const ScenarioConfig& c) {
  Validation v = validate(c);
  if (c.epsilons.size() < 3) {
    v.errors.push_back("sweep requires at least 3 epsilon values (got " +
                       std::to_string(c.epsilons.size()) + ")");
    return v;
  }
  bool sorted = true;
  for (std::size_t i = 1; i < c.epsilons.size(); ++i)
    if (c.epsilons[i] >= c.epsilons[i - 1]) sorted = false;
  if (!sorted) {
    v.errors.push_back("sweep epsilon list must be strictly decreasing");
    return v;
  }
  const double r0 = c.epsilons[1] / c.epsilons[0];
  for (std::size_t i = 1; i + 1 < c.epsilons.size(); ++i) {
    const double r = c.epsilons[i + 1] / c.epsilons[i];
    if (std::abs(r - r0) > 0.05 * r0) {
      std::ostringstream os;
      os << "sweep epsilons must be geometrically spaced: ratio " << r << " at position "
         << i + 1 << " differs from " << r0;
      v.errors.push_back(os.str());
      break;
    }
  }
  return v;
}

}  // namespace pfl
