#include "pfl/radial.hpp"

#include <algorithm>

namespace pfl {
namespace {

// One embedded Cash-Karp RK45 attempt for dr/dt = rhs(r); returns (r5, err).
struct Attempt {
  double r5, err;
};

template <class Rhs>
Attempt rk45_attempt(Rhs&& rhs, double r, double dt) {
  const double k1 = rhs(r);
  const double k2 = rhs(r + dt * (1.0 / 5) * k1);
  const double k3 = rhs(r + dt * (3.0 / 40 * k1 + 9.0 / 40 * k2));
  const double k4 = rhs(r + dt * (3.0 / 10 * k1 - 9.0 / 10 * k2 + 6.0 / 5 * k3));
  const double k5 =
      rhs(r + dt * (-11.0 / 54 * k1 + 5.0 / 2 * k2 - 70.0 / 27 * k3 + 35.0 / 27 * k4));
  const double k6 = rhs(r + dt * (1631.0 / 55296 * k1 + 175.0 / 512 * k2 + 575.0 / 13824 * k3 +
                                  44275.0 / 110592 * k4 + 253.0 / 4096 * k5));
  const double r5 = r + dt * (37.0 / 378 * k1 + 250.0 / 621 * k3 + 125.0 / 594 * k4 +
                              512.0 / 1771 * k6);
  const double r4 = r + dt * (2825.0 / 27648 * k1 + 18575.0 / 48384 * k3 +
                              13525.0 / 55296 * k4 + 277.0 / 14336 * k5 + 1.0 / 4 * k6);
  return {r5, std::abs(r5 - r4)};
}

constexpr double kTol = 1e-10;
constexpr double kCore = 1e-4;  // below this, switch to the curvature-dominated tail

// Analytic tail time to collapse from a small radius r:
// t = r^2/(2(n-1)) + f r^3/(3 (n-1)^2) + O(f^2 r^4).
double tail_time(int n, double f, double r) {
  const double m = n - 1;
  return r * r / (2.0 * m) + f * r * r * r / (3.0 * m * m);
}

// Integrate from (0, r0) until either time t_stop or radius <= kCore.
// Returns the pair (t_reached, r_reached).
struct PathPoint {
  double t, r;
};

PathPoint integrate(const RadialOracle& o, double t_stop) {
  const double m = o.n - 1;
  auto rhs = [&](double r) { return -m / std::max(r, 1e-300) + o.f; };
  double t = 0.0, r = o.r0, dt = std::min(t_stop, 1e-4);
  while (t < t_stop && r > kCore) {
    dt = std::min(dt, t_stop - t);
    // Keep the proposed step away from the collapse singularity.
    if (rhs(r) < 0) dt = std::min(dt, 0.45 * r / -rhs(r));
    const Attempt a = rk45_attempt(rhs, r, dt);
    if (a.err <= kTol || dt <= 1e-15) {
      t += dt;
      r = a.r5;
      dt *= std::min(5.0, 0.9 * std::pow(kTol / std::max(a.err, 1e-300), 0.2));
    } else {
      dt *= std::max(0.1, 0.9 * std::pow(kTol / a.err, 0.25));
    }
  }
  return {t, r};
}

}  // namespace

double radial_radius(const RadialOracle& o, double t) {
  if (!(o.r0 > 0)) throw std::invalid_argument("radial oracle: r0 must be positive");
  if (o.n < 1) throw std::invalid_argument("radial oracle: n must be >= 1");
  if (t < 0) throw std::invalid_argument("radial oracle: t must be >= 0");
  const double m = o.n - 1;
  if (m == 0) return o.r0 + o.f * t;  // flat front: pure forcing
  if (o.f == 0.0) {
    const double s = o.r0 * o.r0 - 2.0 * m * t;
    return s > 0 ? std::sqrt(s) : 0.0;
  }
  if (t >= extinction_time(o)) return 0.0;
  const PathPoint p = integrate(o, t);
  return p.t >= t ? p.r : 0.0;
}

double extinction_time(const RadialOracle& o) {
  if (!(o.r0 > 0)) throw std::invalid_argument("radial oracle: r0 must be positive");
  const double m = o.n - 1;
  if (m == 0) return o.f < 0 ? o.r0 / -o.f : std::numeric_limits<double>::infinity();
  if (o.f == 0.0) return o.r0 * o.r0 / (2.0 * m);
  if (o.f > 0 && o.r0 >= m / o.f) return std::numeric_limits<double>::infinity();
  const PathPoint p = integrate(o, std::numeric_limits<double>::max());
  return p.t + tail_time(o.n, o.f, p.r);
}

}  // namespace pfl
