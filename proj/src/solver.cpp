#include "pfl/solver.hpp"

namespace pfl {

double energy(const Grid& g, const Array& u, double eps) {
  thread_local Array gsq;
  gradient_sq(g, u, gsq);
  return integrate(g, 0.5 * eps * gsq + w_value(u) / eps);
}

void chemical_potential(const Grid& g, const Array& u, double eps, Array& w) {
  laplacian(g, u, w);
  w = -eps * w + w_prime(u) / eps;
}

ScalarField residual(const ScalarField& u_before, const ScalarField& u_after, double dt,
                     double eps) {
  const Grid& g = u_before.grid;
  ScalarField r(g);
  Array umid = 0.5 * (u_before.a + u_after.a);
  chemical_potential(g, umid, eps, r.a);
  const double seps = std::sqrt(eps);
  r.a = seps * (u_after.a - u_before.a) / dt + r.a / seps;
  return r;
}

SolverState AcStepper::make_state(const Grid& grid, double eps, ScalarField u0) {
  SolverState s;
  s.grid = grid;
  s.eps = eps;
  s.u = std::move(u0);
  s.energy = energy(grid, s.u.a, eps);
  s.max_energy = s.energy;
  s.max_abs_u = s.u.a.abs().maxCoeff();
  return s;
}

AcStepper::AcStepper(const Grid& grid, double eps, ForcingSpec forcing, StepperConfig config)
    : grid_(grid), eps_(eps), forcing_(std::move(forcing)), config_(config) {
  if (!(eps > 0)) throw std::invalid_argument("stepper: eps must be positive");
}

StepInfo AcStepper::step(SolverState& s, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("stepper: dt must be positive");
  const double h = grid_.spacing();
  if (config_.scheme == StepperConfig::Scheme::Explicit &&
      dt > h * h / (2.0 * grid_.dim()) * (1.0 + 1e-12))
    throw StepFailure("explicit scheme refuses dt = " + std::to_string(dt) +
                      " > h^2/(2 dim) = " + std::to_string(h * h / (2.0 * grid_.dim())));

  // Forcing at the pre-step state.
  const bool want_grad = forcing_.needs_gradient();
  if (want_grad) gradient(grid_, s.u.a, grad_);
  const double sup_fb2 =
      evaluate_forcing(forcing_, s.t, eps_, s.u, want_grad ? &grad_ : nullptr, g_);
  const double g2int = integrate(grid_, g_.square()) / eps_;
  budget_step(budget_, grid_, g_, eps_, dt, sup_fb2);

  StepInfo info;
  info.dt = dt;
  ubefore_ = s.u.a;
  if (config_.scheme == StepperConfig::Scheme::SemiImplicit) {
    rhs_ = s.u.a + dt * (g_ / eps_ - w_prime(s.u.a) / (eps_ * eps_));
    unew_ = s.u.a;  // warm start
    const CgResult cg = solve_helmholtz(grid_, dt, rhs_, unew_, config_.cg_tol, config_.cg_maxit);
    if (!cg.converged)
      throw StepFailure("helmholtz CG stalled at step " + std::to_string(s.steps) + ", t = " +
                        std::to_string(s.t) + ", rel residual " + std::to_string(cg.rel_residual));
    info.cg_iterations = cg.iterations;
  } else {
    laplacian(grid_, s.u.a, lap_);
    unew_ = s.u.a + dt * (lap_ + g_ / eps_ - w_prime(s.u.a) / (eps_ * eps_));
  }
  if (!unew_.allFinite())
    throw StepFailure("non-finite state at step " + std::to_string(s.steps) + ", t = " +
                      std::to_string(s.t));

  // Midpoint tallies.
  dtu_ = (unew_ - ubefore_) / dt;
  umid_ = 0.5 * (ubefore_ + unew_);
  chemical_potential(grid_, umid_, eps_, wmid_);
  gradient_sq(grid_, umid_, gsq_);
  const double seps = std::sqrt(eps_);
  const double kin = integrate(grid_, eps_ * dtu_.square());
  const double wil = integrate(grid_, wmid_.square()) / eps_;
  const double act = integrate(grid_, (seps * dtu_ + wmid_ / seps).square());
  s.tallies.action += dt * act;
  s.tallies.lambda += dt * g2int;
  s.tallies.lambda1 += dt * sup_fb2;
  s.tallies.kinetic += dt * kin;
  s.tallies.squares += dt * (kin + wil);

  const double e_before = s.energy;
  const double e_after = energy(grid_, unew_, eps_);
  info.dissipation_residual =
      std::abs(2.0 * (e_after - e_before) / dt - (g2int - (kin + wil)));

  ctx_.t_before = s.t;
  ctx_.dt = dt;
  ctx_.eps = eps_;
  ctx_.energy_before = e_before;
  ctx_.energy_after = e_after;
  ctx_.g2_over_eps = g2int;
  ctx_.u_before = &ubefore_;
  ctx_.u_after = &unew_;
  ctx_.u_mid = &umid_;
  ctx_.w_mid = &wmid_;
  ctx_.dtu = &dtu_;
  ctx_.gradsq_mid = &gsq_;
  ctx_.g = &g_;

  s.u.a.swap(unew_);
  ctx_.u_after = &s.u.a;
  s.t += dt;
  s.steps += 1;
  s.energy = e_after;
  s.max_energy = std::max(s.max_energy, e_after);
  s.max_abs_u = std::max(s.max_abs_u, s.u.a.abs().maxCoeff());
  return info;
}

}  // namespace pfl
