// ops.hpp -- finite-difference operators and integrals on cell-centered grids.
//
// Boundary handling (homogeneous Neumann, mirror ghosts):
//  * laplacian: ghost = nearest interior cell (even reflection about the
//    boundary face). Boundary faces then carry zero flux, so the discrete
//    divergence theorem holds exactly: sum_cells laplacian(f) == 0.
//  * gradient: centered differences; at a boundary cell the ghost is the
//    reflection about the boundary cell center, so the normal component at
//    boundary cells is exactly zero (the convention a field satisfying the
//    no-flux condition obeys to second order).
#pragma once

#include "pfl/grid.hpp"

#include <algorithm>

namespace pfl {

// out = in - tau * laplacian(in); tau = 0 gives the plain laplacian scaled by -1.
// Written fused because it is the CG hot loop.
inline void helmholtz_apply(const Grid& g, double tau, const Array& in, Array& out) {
  if (out.size() != g.size()) out.resize(g.size());
  const int nx = g.cells(0), ny = g.cells(1), nz = g.cells(2);
  const std::int64_t sy = g.stride(1), sz = g.stride(2);
  const double ih2 = 1.0 / (g.spacing() * g.spacing());
  const int dim = g.dim();
  const double* u = in.data();
  double* o = out.data();
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      const std::int64_t row = j * sy + k * sz;
      for (int i = 0; i < nx; ++i) {
        const std::int64_t c = row + i;
        double lap = 0.0;
        {
          const double um = (i == 0) ? u[c] : u[c - 1];
          const double up = (i == nx - 1) ? u[c] : u[c + 1];
          lap += um - 2.0 * u[c] + up;
        }
        if (dim > 1) {
          const double um = (j == 0) ? u[c] : u[c - sy];
          const double up = (j == ny - 1) ? u[c] : u[c + sy];
          lap += um - 2.0 * u[c] + up;
        }
        if (dim > 2) {
          const double um = (k == 0) ? u[c] : u[c - sz];
          const double up = (k == nz - 1) ? u[c] : u[c + sz];
          lap += um - 2.0 * u[c] + up;
        }
        o[c] = u[c] - tau * ih2 * lap;
      }
    }
  }
}

inline void laplacian(const Grid& g, const Array& in, Array& out) {
  helmholtz_apply(g, 1.0, in, out);
  out = in - out;  // in - (in - lap) = lap
}

inline ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid);
  laplacian(f.grid, f.a, out.a);
  return out;
}

inline void gradient(const Grid& g, const Array& in, std::array<Array, 3>& out) {
  const int nx = g.cells(0), ny = g.cells(1), nz = g.cells(2);
  const std::int64_t sy = g.stride(1), sz = g.stride(2);
  const double i2h = 1.0 / (2.0 * g.spacing());
  const int dim = g.dim();
  const double* u = in.data();
  for (int d = 0; d < dim; ++d)
    if (out[d].size() != g.size()) out[d].resize(g.size());
  double* gx = out[0].data();
  double* gy = dim > 1 ? out[1].data() : nullptr;
  double* gz = dim > 2 ? out[2].data() : nullptr;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      const std::int64_t row = j * sy + k * sz;
      for (int i = 0; i < nx; ++i) {
        const std::int64_t c = row + i;
        gx[c] = (i == 0 || i == nx - 1) ? 0.0 : (u[c + 1] - u[c - 1]) * i2h;
        if (dim > 1) gy[c] = (j == 0 || j == ny - 1) ? 0.0 : (u[c + sy] - u[c - sy]) * i2h;
        if (dim > 2) gz[c] = (k == 0 || k == nz - 1) ? 0.0 : (u[c + sz] - u[c - sz]) * i2h;
      }
    }
  }
}

inline VectorField gradient(const ScalarField& f) {
  VectorField v(f.grid);
  gradient(f.grid, f.a, v.comp);
  return v;
}

// |grad u|^2, same boundary convention as gradient().
inline void gradient_sq(const Grid& g, const Array& in, Array& out) {
  const int nx = g.cells(0), ny = g.cells(1), nz = g.cells(2);
  const std::int64_t sy = g.stride(1), sz = g.stride(2);
  const double i2h = 1.0 / (2.0 * g.spacing());
  const int dim = g.dim();
  const double* u = in.data();
  if (out.size() != g.size()) out.resize(g.size());
  double* o = out.data();
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      const std::int64_t row = j * sy + k * sz;
      for (int i = 0; i < nx; ++i) {
        const std::int64_t c = row + i;
        const double dx = (i == 0 || i == nx - 1) ? 0.0 : (u[c + 1] - u[c - 1]) * i2h;
        double s = dx * dx;
        if (dim > 1) {
          const double dy = (j == 0 || j == ny - 1) ? 0.0 : (u[c + sy] - u[c - sy]) * i2h;
          s += dy * dy;
        }
        if (dim > 2) {
          const double dz = (k == 0 || k == nz - 1) ? 0.0 : (u[c + sz] - u[c - sz]) * i2h;
          s += dz * dz;
        }
        o[c] = s;
      }
    }
  }
}

// Midpoint (= cell-centered rectangle) quadrature.
template <class E>
double integrate(const Grid& g, const Eigen::ArrayBase<E>& e) {
  return e.sum() * g.cell_volume();
}

inline double integrate(const ScalarField& f) { return integrate(f.grid, f.a); }

// Integral of f over the ball |x - center| <= radius, cell-restricted:
// a cell contributes iff its center lies in the ball.
inline double ball_mass(const ScalarField& f, const std::array<double, 3>& center,
                        double radius) {
  const Grid& g = f.grid;
  if (!(radius > 0)) throw std::invalid_argument("ball_mass: radius must be positive");
  const double r2 = radius * radius;
  // Bounding index box per axis, clamped to the grid.
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int d = 0; d < g.dim(); ++d) {
    lo[d] = std::max(0, static_cast<int>(std::floor((center[d] - radius) / g.spacing() - 0.5)));
    hi[d] = std::min(g.cells(d) - 1,
                     static_cast<int>(std::ceil((center[d] + radius) / g.spacing() - 0.5)));
  }
  double sum = 0.0;
  for (int k = lo[2]; k <= hi[2]; ++k) {
    const double zk = g.dim() > 2 ? g.center(2, k) - center[2] : 0.0;
    for (int j = lo[1]; j <= hi[1]; ++j) {
      const double yj = g.dim() > 1 ? g.center(1, j) - center[1] : 0.0;
      const std::int64_t row = j * g.stride(1) + k * g.stride(2);
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const double xi = g.center(0, i) - center[0];
        if (xi * xi + yj * yj + zk * zk <= r2) sum += f.a[row + i];
      }
    }
  }
  return sum * g.cell_volume();
}

}  // namespace pfl
