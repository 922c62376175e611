#include "pfl/coupled.hpp"

#include "pfl/ops.hpp"
#include "pfl/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace pfl {
namespace {

ForcingSpec coupled_forcing(ForcingSpec::Kind kind) {
  ForcingSpec f;
  f.kind = kind;
  return f;
}

// Dirichlet energy from face differences: sum over interior faces of
// (f[c+s] - f[c])^2 / h^2 * h^n. This is the form that sums by parts exactly
// against the mirror-ghost laplacian.
double face_dirichlet(const Grid& g, const Array& f) {
  double s = 0.0;
  const double* a = f.data();
  for (int axis = 0; axis < g.dim(); ++axis) {
    const std::int64_t st = g.stride(axis);
    const int n0 = g.cells(0), n1 = g.dim() > 1 ? g.cells(1) : 1,
              n2 = g.dim() > 2 ? g.cells(2) : 1;
    int n[3] = {n0, n1, n2};
    n[axis] -= 1;  // faces along this axis
    for (int k = 0; k < n[2]; ++k)
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i) {
          const std::int64_t c = i + j * g.stride(1) + k * g.stride(2);
          const double d = a[c + st] - a[c];
          s += d * d;
        }
  }
  const double h = g.spacing();
  return s / (h * h) * g.cell_volume();
}

double g_mass(const Grid& g, const Array& u) {
  double s = 0.0;
  for (std::int64_t c = 0; c < g.size(); ++c) s += g_antiderivative(u[c]);
  return s * g.cell_volume();
}

}  // namespace

// ----------------------------------------------------------------- MsStepper

MsStepper::MsStepper(const Grid& grid, double eps, StepperConfig config)
    : grid_(grid), eps_(eps), config_(config),
      ac_(grid, eps, coupled_forcing(ForcingSpec::Kind::CoupledField), config) {}

MsState MsStepper::make_state(ScalarField u0, ScalarField theta0) const {
  if (!u0.grid.same_layout(grid_) || !theta0.grid.same_layout(grid_))
    throw std::invalid_argument("ms: initial fields must live on the stepper grid");
  MsState s;
  s.ac = AcStepper::make_state(grid_, eps_, std::move(u0));
  s.theta = std::move(theta0);
  s.half_norm0 = 0.5 * integrate(grid_, s.theta.a.square());
  s.anchor0 = s.ac.energy + s.half_norm0;
  s.conserved0 = integrate(s.theta) + g_mass(grid_, s.ac.u.a);
  return s;
}

StepInfo MsStepper::step(MsState& s, double dt) {
  thb_ = s.theta.a;  // pre-step theta drives the u-step
  ac_.forcing().coupled = &thb_;
  const StepInfo info = ac_.step(s.ac, dt);

  // theta step: (I - dt lap) theta+ = theta - (G(u+) - G(u))
  const Array& ub = *ac_.context().u_before;
  const Array& ua = *ac_.context().u_after;
  if (rhs_.size() != grid_.size()) rhs_.resize(grid_.size());
  for (std::int64_t c = 0; c < grid_.size(); ++c)
    rhs_[c] = thb_[c] - (g_antiderivative(ua[c]) - g_antiderivative(ub[c]));
  CgResult cg = solve_helmholtz(grid_, dt, rhs_, s.theta.a, config_.cg_tol,
                                config_.cg_maxit);
  if (!cg.converged)
    throw StepFailure("ms: theta solve failed to converge (rel residual " +
                      std::to_string(cg.rel_residual) + ")");
  thmid_ = 0.5 * (thb_ + s.theta.a);
  s.dirichlet += dt * face_dirichlet(grid_, thmid_);
  return info;
}

double MsStepper::energy_identity_residual(const MsState& s) const {
  const double lhs = s.ac.energy + 0.5 * integrate(grid_, s.theta.a.square()) +
                     s.ac.tallies.kinetic + s.dirichlet;
  return lhs - s.anchor0;
}

double MsStepper::conserved_mass(const MsState& s) const {
  return integrate(s.theta) + g_mass(grid_, s.ac.u.a);
}

// -------------------------------------------------------------- GrainStepper

GrainStepper::GrainStepper(const Grid& grid, double eps, StepperConfig config)
    : grid_(grid), eps_(eps), config_(config),
      ac_(grid, eps, coupled_forcing(ForcingSpec::Kind::Concentration), config) {}

GrainState GrainStepper::make_state(ScalarField u0, ScalarField c0) const {
  if (!u0.grid.same_layout(grid_) || !c0.grid.same_layout(grid_))
    throw std::invalid_argument("grain: initial fields must live on the stepper grid");
  GrainState s;
  s.ac = AcStepper::make_state(grid_, eps_, std::move(u0));
  s.conc = std::move(c0);
  s.lyapunov0 = s.lyapunov = lyapunov(s.ac, s.conc);
  s.mass0 = integrate(s.conc);
  return s;
}

double GrainStepper::lyapunov(const SolverState& ac, const ScalarField& conc) const {
  return ac.energy +
         integrate(grid_, conc.a.square() / (2.0 * eps_) + (ac.u.a + 1.0) * conc.a);
}

StepInfo GrainStepper::step(GrainState& s, double dt) {
  cb_ = s.conc.a;  // pre-step concentration forces the u-step
  ac_.forcing().coupled = &cb_;
  const StepInfo info = ac_.step(s.ac, dt);

  // mobility frozen at the pre-step u, chemical drive at the post-step u+
  const Array& ub = *ac_.context().u_before;
  const Array& ua = *ac_.context().u_after;
  mob_ = ((1.0 - ub.square()).square()).max(1e-6);
  drive_ = eps_ * (ua + 1.0);
  // (eps/dt) c+ - div(D grad c+) = (eps/dt) c + div(D grad drive)
  divform_apply(grid_, 0.0, mob_, drive_, tmp_);  // tmp = -div(D grad drive)
  const double alpha = eps_ / dt;
  rhs_ = alpha * cb_ - tmp_;
  CgResult cg = solve_divform(grid_, alpha, mob_, rhs_, s.conc.a, config_.cg_tol, 2000);
  if (!cg.converged)
    throw StepFailure("grain: concentration solve failed to converge (rel residual " +
                      std::to_string(cg.rel_residual) + ")");
  const double f_new = lyapunov(s.ac, s.conc);
  s.violation_max = std::max(s.violation_max, f_new - s.lyapunov);
  s.lyapunov = f_new;
  return info;
}

}  // namespace pfl
