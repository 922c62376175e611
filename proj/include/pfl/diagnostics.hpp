// diagnostics.hpp -- diffuse geometric-measure diagnostics.
//
// Measures: d(mu) = (eps/2 |grad u|^2 + W(u)/eps) dx (energy measure),
// d(mu~) = eps |grad u|^2 dx (gradient measure), discrepancy xi = mu~ - mu.
// Normal nu = grad u / |grad u| (fallback e1 where |grad u| <= 1e-12),
// velocity v = -(dtu / |grad u|) nu (zero at the fallback cells),
// chemical potential w = -eps lap u + W'(u)/eps.
#pragma once

#include "pfl/grid.hpp"
#include "pfl/solver.hpp"
#include "pfl/testfn.hpp"

#include <array>
#include <vector>

namespace pfl {

void measure_density(const Grid& g, const Array& u, double eps, Array& out);
void discrepancy_density(const Grid& g, const Array& u, double eps, Array& out);
double discrepancy_l1(const Grid& g, const Array& u, double eps);
// integral of w^2 / eps (diffuse Willmore-type quantity)
double willmore_energy(const Grid& g, const Array& u, double eps);
void diffuse_normal(const Grid& g, const Array& u, VectorField& nu);
void diffuse_velocity(const Grid& g, const Array& dtu, const Array& u, VectorField& v);

// integral of |v - (v.nu)nu|^2 dmu~ for an arbitrary velocity field; nu from u.
// v2_mass, if given, receives integral of |v|^2 dmu~ for scale.
double projection_residual(const Grid& g, const VectorField& v, const Array& u,
                           double eps, double* v2_mass = nullptr);

// diffuse first variation: integral of (div eta - nu.(D eta)nu) dmu
double first_variation(const ScalarField& u, double eps, const VectorTestFn& eta);

// |delta V(eta) + integral of eta.(w grad u) dx| -- equals the discrepancy
// pairing |integral nu.(D eta)nu d(xi)| up to grid consistency error.
double curvature_pairing_residual(const ScalarField& u, double eps,
                                  const VectorTestFn& eta);

// sup over centers and dyadic radii 2eps, 4eps, ... <= L/4 of
// mu(B_R(x) cap domain) / R^(n-1).
double density_ratio_sup(const ScalarField& u, double eps,
                         const std::vector<std::array<double, 3>>& centers);

// integral of |G(u1) - G(u2)| dx, G the antiderivative of sqrt(2W)
// (the quantity with the 1/2-Hoelder-in-time bound).
double g_mass_l1_diff(const Grid& g, const Array& u1, const Array& u2);

// ---------------------------------------------------------------------------
// Per-step accumulators for the weak-formulation checks. All time integrals
// use the same midpoint states as the solver tallies.
struct BatteryTallies {
  std::vector<double> dt_mass;    // int int dt(zeta) dmu
  std::vector<double> transport;  // int int grad(zeta).v dmu~
  std::vector<double> kinetic;    // int int zeta |v|^2 dmu~
  std::vector<double> willmore;   // int int zeta w^2/eps dx
  std::vector<double> forcing;    // int int zeta g^2/eps dx
  std::vector<double> bulk;       // int int (dt+lap)(zeta) theta + (c0/2) u dt(zeta)
};

class BatteryAccumulator {
 public:
  BatteryAccumulator(const Grid& g, Battery battery);

  void accumulate(const StepContext& ctx);
  // extra tally for the coupled bulk field (call after accumulate)
  void accumulate_bulk(const StepContext& ctx, const Array& th_before,
                       const Array& th_after);

  // Brakke-type slack per member: dt_mass + transport - kinetic/2
  // + sup(zeta) lambda_total / 2. Nonnegative up to time-quadrature error.
  std::vector<double> brakke_slack(double lambda_total) const;
  // |dt_mass + transport| / sup(zeta): the L2-flow pairing residual.
  std::vector<double> l2flow_residual() const;
  std::vector<double> bulk_residual() const;

  const BatteryTallies& tallies() const { return tal_; }
  const Battery& battery() const { return bat_; }

 private:
  Grid grid_;
  Battery bat_;
  BatteryTallies tal_;
};

}  // namespace pfl
