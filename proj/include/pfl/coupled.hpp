// coupled.hpp -- phase field coupled to a bulk field.
//
// Undercooling system (diffuse Mullins-Sekerka with kinetic term):
//   eps du/dt = eps lap u - W'(u)/eps + sqrt(2W(u)) theta
//   d theta/dt = lap theta - sqrt(2W(u)) du/dt
// Scheme: semi-implicit u-step with the pre-step theta, then an implicit
// theta-step whose sink is the exact increment G(u+) - G(u) (G' = sqrt(2W)),
// which conserves int(theta + G(u)) to solver tolerance. The energy identity
//   E(T) + ||theta(T)||^2/2 + int int (eps (du/dt)^2 + |grad theta|^2)
//     = E(0) + ||theta(0)||^2/2
// is tallied with face-difference Dirichlet energy at theta_mid, so the
// bookkeeping residual is pure time-discretization error, O(dt).
//
// Grain-boundary system (concentration c coupled to the order parameter):
//   eps du/dt = eps lap u - W'(u)/eps + c
//   eps dc/dt = div(D(u) grad(c + eps (u + 1))),  D(u) = max((1-u^2)^2, 1e-6)
// Scheme: semi-implicit u-step with g = c at the pre-step c, then an implicit
// c-step with mobility frozen at the pre-step u and the chemical drive at the
// post-step u+. int c is conserved to solver tolerance. The Lyapunov
// candidate F = E_eps(u) + int(c^2/(2 eps) + (u+1) c) is tracked per step.
#pragma once

#include "pfl/solver.hpp"

namespace pfl {

struct MsState {
  SolverState ac;
  ScalarField theta;
  double half_norm0 = 0.0;   // ||theta(0)||^2 / 2
  double anchor0 = 0.0;      // E(0) + ||theta(0)||^2 / 2
  double dirichlet = 0.0;    // int int |grad theta_mid|^2 (face differences)
  double conserved0 = 0.0;   // int (theta(0) + G(u(0)))
};

class MsStepper {
 public:
  MsStepper(const Grid& grid, double eps, StepperConfig config);

  MsState make_state(ScalarField u0, ScalarField theta0) const;
  StepInfo step(MsState& s, double dt);
  StepInfo step(MsState& s) { return step(s, config_.default_dt(grid_, eps_)); }

  // E + ||theta||^2/2 + kinetic + dirichlet - (E0 + ||theta0||^2/2), signed.
  double energy_identity_residual(const MsState& s) const;
  double conserved_mass(const MsState& s) const;  // int (theta + G(u))

  const StepContext& context() const { return ac_.context(); }
  const Array& theta_before() const { return thb_; }
  const StepperConfig& config() const { return config_; }

 private:
  Grid grid_;
  double eps_;
  StepperConfig config_;
  AcStepper ac_;
  Array thb_, rhs_, thmid_;
};

struct GrainState {
  SolverState ac;
  ScalarField conc;
  double lyapunov = 0.0;        // current F
  double lyapunov0 = 0.0;       // F at t = 0
  double violation_max = 0.0;   // max over steps of (F+ - F)+
  double mass0 = 0.0;           // int c at t = 0
};

class GrainStepper {
 public:
  GrainStepper(const Grid& grid, double eps, StepperConfig config);

  GrainState make_state(ScalarField u0, ScalarField c0) const;
  StepInfo step(GrainState& s, double dt);
  StepInfo step(GrainState& s) { return step(s, config_.default_dt(grid_, eps_)); }

  double lyapunov(const SolverState& ac, const ScalarField& conc) const;
  double conc_mass(const GrainState& s) const { return integrate(s.conc); }

  const StepContext& context() const { return ac_.context(); }
  const Array& conc_before() const { return cb_; }
  const StepperConfig& config() const { return config_; }

 private:
  Grid grid_;
  double eps_;
  StepperConfig config_;
  AcStepper ac_;
  Array cb_, mob_, drive_, rhs_, tmp_;
};

}  // namespace pfl
