// forcing.hpp -- perturbation families g for eps*du/dt = eps*lap u - W'/eps + g
// and the running forcing budgets.
//
// Families:
//   Zero              g = 0
//   ScaledScalar      g = theta(t,x) * sqrt(2 W(u))
//   DriftPotential    g = eps * b(t,x).grad u + f(t,x) * sqrt(2 W(u))
//   GradientMagnitude g = eps * f(t,x) * |grad u|
//   CoupledField      g = theta_field * sqrt(2 W(u))   (field owned by a coupled stepper)
//   Concentration     g = c_field                      (field owned by a coupled stepper)
//
// Sign convention: positive theta / f expands the {u = +1} phase.
#pragma once

#include "pfl/grid.hpp"
#include "pfl/ops.hpp"
#include "pfl/potential.hpp"

#include <functional>
#include <utility>

namespace pfl {

using SpaceTimeFn = std::function<double(double t, const double* x)>;
using SpaceTimeVecFn = std::function<void(double t, const double* x, double* out)>;

inline SpaceTimeFn constant_fn(double v) {
  return [v](double, const double*) { return v; };
}
inline SpaceTimeVecFn constant_vec_fn(std::array<double, 3> v) {
  return [v](double, const double*, double* out) {
    out[0] = v[0]; out[1] = v[1]; out[2] = v[2];
  };
}

struct ForcingSpec {
  enum class Kind { Zero, ScaledScalar, DriftPotential, GradientMagnitude, CoupledField, Concentration };
  Kind kind = Kind::Zero;
  SpaceTimeFn theta;   // ScaledScalar
  SpaceTimeFn f;       // DriftPotential, GradientMagnitude
  SpaceTimeVecFn b;    // DriftPotential
  const Array* coupled = nullptr;  // CoupledField / Concentration, set per step

  bool needs_gradient() const {
    return kind == Kind::DriftPotential || kind == Kind::GradientMagnitude;
  }
  // Forcings proportional to sqrt(2W(u)) vanish at the wells, so the
  // semi-implicit step preserves |u| <= 1 (up to the linear-solve tolerance).
  bool vanishes_at_wells() const {
    return kind == Kind::Zero || kind == Kind::ScaledScalar || kind == Kind::CoupledField;
  }
};

// Evaluate g at time t on the pre-step state u. grad_u must be supplied when
// needs_gradient(). Returns sup_x(|f|^2 + |b|^2) for DriftPotential (the
// Lambda_1 integrand), 0 otherwise.
inline double evaluate_forcing(const ForcingSpec& spec, double t, double eps,
                               const ScalarField& u, const std::array<Array, 3>* grad_u,
                               Array& g) {
  const Grid& grid = u.grid;
  if (g.size() != grid.size()) g.resize(grid.size());
  double sup_fb2 = 0.0;
  switch (spec.kind) {
    case ForcingSpec::Kind::Zero:
      g.setZero();
      break;
    case ForcingSpec::Kind::ScaledScalar: {
      double x[3];
      for (std::int64_t c = 0; c < grid.size(); ++c) {
        grid.cell_center(c, x);
        g[c] = spec.theta(t, x) * sqrt_2w(u.a[c]);
      }
      break;
    }
    case ForcingSpec::Kind::DriftPotential: {
      if (!grad_u) throw std::invalid_argument("forcing: DriftPotential needs grad u");
      double x[3], bv[3] = {0, 0, 0};
      for (std::int64_t c = 0; c < grid.size(); ++c) {
        grid.cell_center(c, x);
        spec.b(t, x, bv);
        const double fv = spec.f(t, x);
        double bg = 0, b2 = 0;
        for (int d = 0; d < grid.dim(); ++d) {
          bg += bv[d] * (*grad_u)[d][c];
          b2 += bv[d] * bv[d];
        }
        g[c] = eps * bg + fv * sqrt_2w(u.a[c]);
        sup_fb2 = std::max(sup_fb2, fv * fv + b2);
      }
      break;
    }
    case ForcingSpec::Kind::GradientMagnitude: {
      if (!grad_u) throw std::invalid_argument("forcing: GradientMagnitude needs grad u");
      double x[3];
      for (std::int64_t c = 0; c < grid.size(); ++c) {
        grid.cell_center(c, x);
        double s = 0;
        for (int d = 0; d < grid.dim(); ++d) s += (*grad_u)[d][c] * (*grad_u)[d][c];
        g[c] = eps * spec.f(t, x) * std::sqrt(s);
      }
      break;
    }
    case ForcingSpec::Kind::CoupledField:
      if (!spec.coupled) throw std::invalid_argument("forcing: CoupledField needs a field");
      g = (*spec.coupled) * sqrt_2w(u.a);
      break;
    case ForcingSpec::Kind::Concentration:
      if (!spec.coupled) throw std::invalid_argument("forcing: Concentration needs a field");
      g = *spec.coupled;
      break;
  }
  return sup_fb2;
}

// Running budgets: lambda = int int g^2 / eps, lambda1 = int sup_x(|f|^2+|b|^2) dt.
struct ForcingBudget {
  double lambda = 0.0;
  double lambda1 = 0.0;
};

inline void budget_step(ForcingBudget& budget, const Grid& grid, const Array& g, double eps,
                        double dt, double sup_fb2) {
  budget.lambda += dt * integrate(grid, g.square()) / eps;
  budget.lambda1 += dt * sup_fb2;
}

}  // namespace pfl
