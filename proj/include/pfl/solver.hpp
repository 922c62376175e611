// solver.hpp -- semi-implicit / explicit stepping for
//   eps du/dt = eps lap u - W'(u)/eps + g.
//
// The semi-implicit scheme treats the laplacian implicitly (SPD solve, CG)
// and W', g explicitly at the pre-step state:
//   (I - dt lap) u+ = u + dt (g/eps - W'(u)/eps^2).
// Time tallies use midpoint-in-time quadrature: the chemical potential inside
// the action residual and the dissipation bookkeeping is evaluated at
// u_mid = (u + u+)/2, the scheme-consistent midpoint.
#pragma once

#include "pfl/forcing.hpp"
#include "pfl/grid.hpp"
#include "pfl/linsolve.hpp"
#include "pfl/ops.hpp"
#include "pfl/potential.hpp"

#include <stdexcept>
#include <string>

namespace pfl {

struct StepperConfig {
  enum class Scheme { SemiImplicit, Explicit };
  enum class DtRule { Cfl, Fixed };
  Scheme scheme = Scheme::SemiImplicit;
  DtRule dt_rule = DtRule::Cfl;
  double gamma_h = 0.2;    // cfl rule: dt = min(gamma_h h^2, gamma_eps eps^2)
  double gamma_eps = 0.2;
  double fixed_dt = 0.0;
  double cg_tol = 1e-11;
  int cg_maxit = 500;

  double default_dt(const Grid& g, double eps) const {
    if (dt_rule == DtRule::Fixed) {
      if (!(fixed_dt > 0)) throw std::invalid_argument("stepper: fixed dt must be positive");
      return fixed_dt;
    }
    const double h = g.spacing();
    return std::min(gamma_h * h * h, gamma_eps * eps * eps);
  }
};

struct SolverTallies {
  double action = 0.0;   // int int (sqrt(eps) du/dt + w_mid/sqrt(eps))^2
  double lambda = 0.0;   // int int g^2/eps
  double lambda1 = 0.0;  // int sup_x(|f|^2+|b|^2) dt (drift family)
  double squares = 0.0;  // int int (eps (du/dt)^2 + w_mid^2/eps)
  double kinetic = 0.0;  // int int eps (du/dt)^2
};

struct SolverState {
  Grid grid;
  double eps = 0.0;
  double t = 0.0;
  ScalarField u;
  double energy = 0.0;       // E_eps(u), kept current by the stepper
  double max_energy = 0.0;   // running max_t E_eps
  double max_abs_u = 0.0;    // running sup |u|
  SolverTallies tallies;
  long steps = 0;
};

struct StepInfo {
  double dt = 0.0;
  int cg_iterations = 0;
  // | 2 (E+ - E)/dt - ( int g^2/eps - int(eps (du/dt)^2 + w_mid^2/eps) ) |
  double dissipation_residual = 0.0;
};

// Views into the stepper's scratch from the most recent step; valid until the
// next call to step().
struct StepContext {
  double t_before = 0.0, dt = 0.0, eps = 0.0;
  double energy_before = 0.0, energy_after = 0.0;
  double g2_over_eps = 0.0;  // int g^2/eps this step
  const Array* u_before = nullptr;
  const Array* u_after = nullptr;
  const Array* u_mid = nullptr;
  const Array* w_mid = nullptr;       // chemical potential at u_mid
  const Array* dtu = nullptr;         // (u+ - u)/dt
  const Array* gradsq_mid = nullptr;  // |grad u_mid|^2
  const Array* g = nullptr;           // forcing field used by the step
};

struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// E_eps(u) = int eps/2 |grad u|^2 + W(u)/eps.
double energy(const Grid& g, const Array& u, double eps);
inline double energy(const ScalarField& u, double eps) { return energy(u.grid, u.a, eps); }

// w = -eps lap u + W'(u)/eps.
void chemical_potential(const Grid& g, const Array& u, double eps, Array& w);
inline ScalarField chemical_potential(const ScalarField& u, double eps) {
  ScalarField w(u.grid);
  chemical_potential(u.grid, u.a, eps, w.a);
  return w;
}

// Action-density residual sqrt(eps) (u_after-u_before)/dt + w(u_mid)/sqrt(eps);
// for an exact solution this equals g/sqrt(eps).
ScalarField residual(const ScalarField& u_before, const ScalarField& u_after, double dt,
                     double eps);

class AcStepper {
public:
  AcStepper(const Grid& grid, double eps, ForcingSpec forcing, StepperConfig config);

  // Advance state by dt (default: the config rule). Updates tallies, energy
  // and running maxima; throws StepFailure on solver breakdown or NaN.
  StepInfo step(SolverState& s, double dt);
  StepInfo step(SolverState& s) { return step(s, config_.default_dt(grid_, eps_)); }

  const StepContext& context() const { return ctx_; }
  const ForcingSpec& forcing() const { return forcing_; }
  ForcingSpec& forcing() { return forcing_; }
  const StepperConfig& config() const { return config_; }
  const ForcingBudget& budget() const { return budget_; }

  static SolverState make_state(const Grid& grid, double eps, ScalarField u0);

private:
  Grid grid_;
  double eps_;
  ForcingSpec forcing_;
  StepperConfig config_;
  ForcingBudget budget_;
  StepContext ctx_;
  // scratch
  Array g_, rhs_, unew_, ubefore_, umid_, wmid_, dtu_, gsq_, lap_;
  std::array<Array, 3> grad_;
};

}  // namespace pfl
