// linsolve.hpp -- matrix-free CG solves for the implicit steps.
//
// Both operators are symmetric positive definite under the mirror-ghost
// Neumann closure, so plain (preconditioned) CG converges; solves are
// warm-started from the previous state and iterate to a fixed relative
// residual, which keeps runs deterministic.
#pragma once

#include "pfl/grid.hpp"
#include "pfl/ops.hpp"

#include <stdexcept>

namespace pfl {

struct CgResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Solve (I - tau * laplacian) x = b, warm start from the incoming x.
inline CgResult solve_helmholtz(const Grid& g, double tau, const Array& b, Array& x,
                                double tol = 1e-11, int maxit = 500) {
  thread_local Array r, p, ap;
  const double bnorm = std::sqrt(b.square().sum());
  if (bnorm == 0.0) { x.setZero(); return {0, 0.0, true}; }
  helmholtz_apply(g, tau, x, ap);
  r = b - ap;
  double rr = r.square().sum();
  CgResult res;
  if (std::sqrt(rr) <= tol * bnorm) {
    res.converged = true;
    res.rel_residual = std::sqrt(rr) / bnorm;
    return res;
  }
  p = r;
  for (int it = 1; it <= maxit; ++it) {
    helmholtz_apply(g, tau, p, ap);
    const double alpha = rr / (p * ap).sum();
    x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.square().sum();
    res.iterations = it;
    if (std::sqrt(rr_new) <= tol * bnorm) {
      res.converged = true;
      res.rel_residual = std::sqrt(rr_new) / bnorm;
      return res;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  res.rel_residual = std::sqrt(rr) / bnorm;
  return res;
}

// y = alpha*x - div(D grad x) with no-flux boundary faces; D lives on cells,
// face mobility is the arithmetic mean of the adjacent cells.
inline void divform_apply(const Grid& g, double alpha, const Array& D, const Array& x,
                          Array& y) {
  const int nx = g.cells(0), ny = g.cells(1), nz = g.cells(2);
  const std::int64_t sy = g.stride(1), sz = g.stride(2);
  const double ih2 = 1.0 / (g.spacing() * g.spacing());
  const int dim = g.dim();
  const double* u = x.data();
  const double* d = D.data();
  if (y.size() != g.size()) y.resize(g.size());
  double* o = y.data();
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      const std::int64_t row = j * sy + k * sz;
      for (int i = 0; i < nx; ++i) {
        const std::int64_t c = row + i;
        double div = 0.0;
        if (i > 0) div += 0.5 * (d[c] + d[c - 1]) * (u[c - 1] - u[c]);
        if (i < nx - 1) div += 0.5 * (d[c] + d[c + 1]) * (u[c + 1] - u[c]);
        if (dim > 1) {
          if (j > 0) div += 0.5 * (d[c] + d[c - sy]) * (u[c - sy] - u[c]);
          if (j < ny - 1) div += 0.5 * (d[c] + d[c + sy]) * (u[c + sy] - u[c]);
        }
        if (dim > 2) {
          if (k > 0) div += 0.5 * (d[c] + d[c - sz]) * (u[c - sz] - u[c]);
          if (k < nz - 1) div += 0.5 * (d[c] + d[c + sz]) * (u[c + sz] - u[c]);
        }
        o[c] = alpha * u[c] - ih2 * div;
      }
    }
  }
}

// Solve (alpha I - div(D grad .)) x = b by Jacobi-preconditioned CG.
inline CgResult solve_divform(const Grid& g, double alpha, const Array& D, const Array& b,
                              Array& x, double tol = 1e-11, int maxit = 2000) {
  thread_local Array r, z, p, ap, diag;
  const int dim = g.dim();
  const double ih2 = 1.0 / (g.spacing() * g.spacing());
  // Diagonal of the operator for the preconditioner.
  diag.resize(g.size());
  {
    const int nx = g.cells(0), ny = g.cells(1), nz = g.cells(2);
    const std::int64_t sy = g.stride(1), sz = g.stride(2);
    const double* d = D.data();
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j) {
        const std::int64_t row = j * sy + k * sz;
        for (int i = 0; i < nx; ++i) {
          const std::int64_t c = row + i;
          double s = 0.0;
          if (i > 0) s += 0.5 * (d[c] + d[c - 1]);
          if (i < nx - 1) s += 0.5 * (d[c] + d[c + 1]);
          if (dim > 1 && j > 0) s += 0.5 * (d[c] + d[c - sy]);
          if (dim > 1 && j < ny - 1) s += 0.5 * (d[c] + d[c + sy]);
          if (dim > 2 && k > 0) s += 0.5 * (d[c] + d[c - sz]);
          if (dim > 2 && k < nz - 1) s += 0.5 * (d[c] + d[c + sz]);
          diag[c] = alpha + ih2 * s;
        }
      }
  }
  const double bnorm = std::sqrt(b.square().sum());
  CgResult res;
  if (bnorm == 0.0) { x.setZero(); res.converged = true; return res; }
  divform_apply(g, alpha, D, x, ap);
  r = b - ap;
  if (std::sqrt(r.square().sum()) <= tol * bnorm) { res.converged = true; return res; }
  z = r / diag;
  p = z;
  double rz = (r * z).sum();
  for (int it = 1; it <= maxit; ++it) {
    divform_apply(g, alpha, D, p, ap);
    const double a = rz / (p * ap).sum();
    x += a * p;
    r -= a * ap;
    res.iterations = it;
    const double rn = std::sqrt(r.square().sum());
    if (rn <= tol * bnorm) {
      res.converged = true;
      res.rel_residual = rn / bnorm;
      return res;
    }
    z = r / diag;
    const double rz_new = (r * z).sum();
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.rel_residual = std::sqrt(r.square().sum()) / bnorm;
  return res;
}

}  // namespace pfl
