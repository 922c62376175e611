// radial.hpp -- exact radial law dr/dt = -(n-1)/r + f for a ball of the
// {u = +1} phase (curvature shrinks it, positive forcing grows it).
//
// f = 0 has the closed form r(t) = sqrt(r0^2 - 2 (n-1) t) with extinction at
// r0^2 / (2 (n-1)); general f is integrated by an embedded Cash-Karp RK45
// with absolute tolerance 1e-10.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pfl {

struct RadialOracle {
  int n = 2;       // space dimension
  double f = 0.0;  // constant normal forcing
  double r0 = 0.0;
};

// Radius at time t; returns 0 at and after extinction.
double radial_radius(const RadialOracle& o, double t);

// Time at which the radius reaches 0; +infinity when the ball never closes
// (f > 0 and r0 >= (n-1)/f).
double extinction_time(const RadialOracle& o);

// Stationary radius (n-1)/f for f > 0. Note this equilibrium is repelling:
// d/dr [-(n-1)/r + f] = (n-1)/r^2 > 0, so balls below it collapse and balls
// above it grow without bound.
inline double stationary_radius(const RadialOracle& o) {
  if (!(o.f > 0)) throw std::invalid_argument("stationary radius needs f > 0");
  return (o.n - 1) / o.f;
}

}  // namespace pfl
