// testfn.hpp -- smooth compactly supported space-time test functions with
// analytic derivatives, and a seeded battery generator.
//
// Each scalar member is amp * T(t) * X_1(x_1)...X_n(x_n) where every factor is
// (1 + p1 s) cos^4(pi s / 2) on |s| < 1 (s the centered/scaled coordinate) and
// zero outside. cos^4 makes the factor C^2 across the support edge, so the
// analytic laplacian is continuous. Supports stay away from the domain
// boundary and the time endpoints by construction.
#pragma once

#include "pfl/grid.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace pfl {

struct BumpAxis {
  double center = 0.0;
  double width = 1.0;   // support is [center - width, center + width]
  double tilt = 0.0;    // p1, |tilt| < 1 keeps the factor positive
  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  double sup_abs() const;
};

struct ScalarTestFn {
  int dim = 0;
  double amp = 1.0;
  BumpAxis time;
  std::array<BumpAxis, 3> ax;

  double value(double t, const double* x) const;
  double dt(double t, const double* x) const;
  void grad(double t, const double* x, double* out) const;
  double laplacian(double t, const double* x) const;
  double sup_abs() const;
  bool in_support(double t) const;
  // index box of cells whose centers lie in the spatial support
  void support_box(const Grid& g, std::int64_t* lo, std::int64_t* hi) const;
};

// Vector fields for first-variation pairings; spatial only.
//   Directional: eta(x) = psi(x) * dir        (psi a product of bumps)
//   Radial:      eta(x) = chi(|x-c|) * e_rho  (chi a single bump, support away
//                                              from rho = 0)
struct VectorTestFn {
  enum class Kind { Directional, Radial };
  Kind kind = Kind::Directional;
  int dim = 0;
  ScalarTestFn psi;               // Directional (time factor unused)
  std::array<double, 3> dir{1, 0, 0};
  BumpAxis chi;                   // Radial profile in rho = |x - center|
  std::array<double, 3> center{0, 0, 0};

  void value(const double* x, double* out) const;
  double divergence(const double* x) const;
  // nu . (D eta) nu for a unit vector nu
  double nu_jac_nu(const double* x, const double* nu) const;
  double sup_abs() const;
};

struct Battery {
  std::vector<ScalarTestFn> zeta;  // nonnegative space-time weights
  std::vector<VectorTestFn> eta;
};

// Deterministic battery: n_scalar nonnegative space-time functions supported
// in (0, horizon) x interior, plus directional and radial vector fields.
Battery make_battery(const Grid& g, double horizon, std::uint32_t seed,
                     int n_scalar = 12, int n_vector = 6);

}  // namespace pfl
