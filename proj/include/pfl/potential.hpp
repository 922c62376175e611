// potential.hpp -- quartic double well, optimal profile, well-prepared data.
//
// W(r) = (1 - r^2)^2 / 4 with wells at r = +/-1. The 1D optimal transition
// profile is q(z) = tanh(z / sqrt(2)), which satisfies the equipartition
// identity q' = sqrt(2 W(q)); its line energy is c0 = int_{-1}^{1}
// sqrt(2 W) = 2 sqrt(2) / 3.
#pragma once

#include "pfl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pfl {

inline double w_value(double r) {
  const double s = 1.0 - r * r;
  return 0.25 * s * s;
}

inline double w_prime(double r) { return r * r * r - r; }

// sqrt(2 W(r)) = |1 - r^2| / sqrt(2), exact and nonnegative for all r.
inline double sqrt_2w(double r) {
  return std::abs(1.0 - r * r) * (1.0 / std::numbers::sqrt2);
}

// G(r) = int_0^r sqrt(2 W(s)) ds with the integrand clamped to 0 outside
// [-1, 1] (constant extension of G beyond the wells).
inline double g_antiderivative(double r) {
  const double c = std::clamp(r, -1.0, 1.0);
  return (c - c * c * c / 3.0) * (1.0 / std::numbers::sqrt2);
}

// Line energy of the optimal profile: int_{-1}^{1} sqrt(2 W) = 2 sqrt(2) / 3.
inline double c0() { return 2.0 * std::numbers::sqrt2 / 3.0; }

inline double optimal_profile(double z) { return std::tanh(z / std::numbers::sqrt2); }

// Elementwise helpers for Eigen expressions.
template <class E>
auto w_value(const Eigen::ArrayBase<E>& u) {
  return 0.25 * (1.0 - u.square()).square();
}
template <class E>
auto w_prime(const Eigen::ArrayBase<E>& u) {
  return u.cube() - u;
}
template <class E>
auto sqrt_2w(const Eigen::ArrayBase<E>& u) {
  return (1.0 - u.square()).abs() * (1.0 / std::numbers::sqrt2);
}

// Signed-distance generators for well-prepared initial data. The sign
// convention throughout: d > 0 inside the {u = +1} region.
struct ProfileSpec {
  enum class Kind { Plane, Ball };
  Kind kind = Kind::Ball;
  // Ball: center + radius, inside is {u = +1}.
  // Plane: point + unit normal, the normal points into {u = +1}.
  std::array<double, 3> center{0, 0, 0};
  double radius = 0;
  std::array<double, 3> point{0, 0, 0};
  std::array<double, 3> normal{1, 0, 0};

  double signed_distance(const double* x, int dim) const {
    if (kind == Kind::Ball) {
      double s = 0;
      for (int d = 0; d < dim; ++d) {
        const double dd = x[d] - center[d];
        s += dd * dd;
      }
      return radius - std::sqrt(s);
    }
    double s = 0;
    for (int d = 0; d < dim; ++d) s += normal[d] * (x[d] - point[d]);
    return s;
  }
};

// u0(x) = q(d(x) / eps). Rejects geometries whose interface comes within
// 5 eps of the boundary, measured as min |d| over boundary-cell centers.
inline ScalarField well_prepared_initial(const Grid& g, const ProfileSpec& spec, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("well_prepared_initial: eps must be positive");
  double margin = std::numeric_limits<double>::infinity();
  ScalarField u(g);
  double x[3];
  for (std::int64_t c = 0; c < g.size(); ++c) {
    g.cell_center(c, x);
    const double d = spec.signed_distance(x, g.dim());
    u.a[c] = optimal_profile(d / eps);
    bool boundary = false;
    std::int64_t r = c;
    for (int dd = 0; dd < g.dim(); ++dd) {
      const int i = static_cast<int>(r % g.cells(dd));
      r /= g.cells(dd);
      if (i == 0 || i == g.cells(dd) - 1) boundary = true;
    }
    if (boundary) margin = std::min(margin, std::abs(d));
  }
  if (margin < 5.0 * eps)
    throw std::invalid_argument("well_prepared_initial: interface margin " +
                                std::to_string(margin) + " is below 5 eps = " +
                                std::to_string(5.0 * eps));
  return u;
}

}  // namespace pfl
