#include "pfl/diagnostics.hpp"

#include "pfl/ops.hpp"
#include "pfl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfl {
namespace {

constexpr double kGradFloor = 1e-12;  // |grad u| at or below this: fallback cell

thread_local Array scratch_gsq, scratch_w, scratch_rho;
thread_local std::array<Array, 3> scratch_grad;

// Centered gradient of u at one cell, matching the convention of
// ops.hpp::gradient (boundary-cell component is zero).
inline void cell_gradient(const Grid& g, const double* u, int i, int j, int k,
                          std::int64_t c, double* out) {
  const double i2h = 1.0 / (2.0 * g.spacing());
  out[0] = (i == 0 || i == g.cells(0) - 1) ? 0.0 : (u[c + 1] - u[c - 1]) * i2h;
  if (g.dim() > 1) {
    const std::int64_t sy = g.stride(1);
    out[1] = (j == 0 || j == g.cells(1) - 1) ? 0.0 : (u[c + sy] - u[c - sy]) * i2h;
  } else {
    out[1] = 0.0;
  }
  if (g.dim() > 2) {
    const std::int64_t sz = g.stride(2);
    out[2] = (k == 0 || k == g.cells(2) - 1) ? 0.0 : (u[c + sz] - u[c - sz]) * i2h;
  } else {
    out[2] = 0.0;
  }
}

}  // namespace

void measure_density(const Grid& g, const Array& u, double eps, Array& out) {
  gradient_sq(g, u, out);
  out = 0.5 * eps * out + w_value(u) / eps;
}

void discrepancy_density(const Grid& g, const Array& u, double eps, Array& out) {
  gradient_sq(g, u, out);
  out = 0.5 * eps * out - w_value(u) / eps;
}

double discrepancy_l1(const Grid& g, const Array& u, double eps) {
  discrepancy_density(g, u, eps, scratch_rho);
  return integrate(g, scratch_rho.abs());
}

double willmore_energy(const Grid& g, const Array& u, double eps) {
  chemical_potential(g, u, eps, scratch_w);
  return integrate(g, scratch_w.square() / eps);
}

void diffuse_normal(const Grid& g, const Array& u, VectorField& nu) {
  if (!nu.grid.same_layout(g)) nu = VectorField(g);
  gradient(g, u, nu.comp);
  const std::int64_t n = g.size();
  for (std::int64_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (int d = 0; d < g.dim(); ++d) s += nu.comp[d][c] * nu.comp[d][c];
    const double m = std::sqrt(s);
    if (m <= kGradFloor) {
      nu.comp[0][c] = 1.0;  // arbitrary unit fallback: e1
      for (int d = 1; d < g.dim(); ++d) nu.comp[d][c] = 0.0;
    } else {
      for (int d = 0; d < g.dim(); ++d) nu.comp[d][c] /= m;
    }
  }
}

void diffuse_velocity(const Grid& g, const Array& dtu, const Array& u, VectorField& v) {
  if (!v.grid.same_layout(g)) v = VectorField(g);
  gradient(g, u, v.comp);
  const std::int64_t n = g.size();
  for (std::int64_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (int d = 0; d < g.dim(); ++d) s += v.comp[d][c] * v.comp[d][c];
    if (s <= kGradFloor * kGradFloor) {
      for (int d = 0; d < g.dim(); ++d) v.comp[d][c] = 0.0;
    } else {
      const double f = -dtu[c] / s;  // -(dtu/|grad|) * grad/|grad|
      for (int d = 0; d < g.dim(); ++d) v.comp[d][c] *= f;
    }
  }
}

double projection_residual(const Grid& g, const VectorField& v, const Array& u,
                           double eps, double* v2_mass) {
  gradient(g, u, scratch_grad);
  const std::int64_t n = g.size();
  double resid = 0.0, mass = 0.0;
  for (std::int64_t c = 0; c < n; ++c) {
    double gs = 0.0;
    for (int d = 0; d < g.dim(); ++d) gs += scratch_grad[d][c] * scratch_grad[d][c];
    if (gs <= kGradFloor * kGradFloor) continue;  // dmu~ weight is negligible
    const double gm = std::sqrt(gs);
    double nu[3] = {0, 0, 0};
    double vn = 0.0, v2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      nu[d] = scratch_grad[d][c] / gm;
      vn += v.comp[d][c] * nu[d];
      v2 += v.comp[d][c] * v.comp[d][c];
    }
    // tangential part assembled componentwise: v2 - vn^2 would cancel
    double tang2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      const double td = v.comp[d][c] - vn * nu[d];
      tang2 += td * td;
    }
    resid += tang2 * gs;
    mass += v2 * gs;
  }
  const double w = eps * g.cell_volume();
  if (v2_mass) *v2_mass = mass * w;
  return resid * w;
}

double first_variation(const ScalarField& u, double eps, const VectorTestFn& eta) {
  const Grid& g = u.grid;
  gradient(g, u.a, scratch_grad);
  double sum = 0.0;
  double x[3], nu[3] = {1, 0, 0};
  const double* ua = u.a.data();
  for (std::int64_t c = 0; c < g.size(); ++c) {
    g.cell_center(c, x);
    const double dv = eta.divergence(x);
    double gs = 0.0;
    for (int d = 0; d < g.dim(); ++d) gs += scratch_grad[d][c] * scratch_grad[d][c];
    const double rho = 0.5 * eps * gs + w_value(ua[c]) / eps;
    if (dv == 0.0 && rho == 0.0) continue;
    const double gm = std::sqrt(gs);
    if (gm <= kGradFloor) {
      nu[0] = 1.0; nu[1] = 0.0; nu[2] = 0.0;
    } else {
      for (int d = 0; d < g.dim(); ++d) nu[d] = scratch_grad[d][c] / gm;
      for (int d = g.dim(); d < 3; ++d) nu[d] = 0.0;
    }
    sum += (dv - eta.nu_jac_nu(x, nu)) * rho;
  }
  return sum * g.cell_volume();
}

double curvature_pairing_residual(const ScalarField& u, double eps,
                                  const VectorTestFn& eta) {
  const Grid& g = u.grid;
  const double dv = first_variation(u, eps, eta);
  chemical_potential(g, u.a, eps, scratch_w);
  gradient(g, u.a, scratch_grad);
  double pair = 0.0;
  double x[3], ev[3];
  for (std::int64_t c = 0; c < g.size(); ++c) {
    g.cell_center(c, x);
    eta.value(x, ev);
    double s = 0.0;
    for (int d = 0; d < g.dim(); ++d) s += ev[d] * scratch_grad[d][c];
    pair += s * scratch_w[c];
  }
  return std::abs(dv + pair * g.cell_volume());
}

double density_ratio_sup(const ScalarField& u, double eps,
                         const std::vector<std::array<double, 3>>& centers) {
  const Grid& g = u.grid;
  measure_density(g, u.a, eps, scratch_rho);
  ScalarField rho(g, scratch_rho);
  double lmin = g.extent(0);
  for (int d = 1; d < g.dim(); ++d) lmin = std::min(lmin, g.extent(d));
  double sup = 0.0;
  for (const auto& ctr : centers) {
    for (double R = 2.0 * eps; R <= 0.25 * lmin; R *= 2.0) {
      const double m = ball_mass(rho, ctr, R);
      sup = std::max(sup, m / std::pow(R, g.dim() - 1));
    }
  }
  return sup;
}

double g_mass_l1_diff(const Grid& g, const Array& u1, const Array& u2) {
  double s = 0.0;
  for (std::int64_t c = 0; c < g.size(); ++c)
    s += std::abs(g_antiderivative(u1[c]) - g_antiderivative(u2[c]));
  return s * g.cell_volume();
}

// ---------------------------------------------------------------------------

BatteryAccumulator::BatteryAccumulator(const Grid& g, Battery battery)
    : grid_(g), bat_(std::move(battery)) {
  const auto n = bat_.zeta.size();
  tal_.dt_mass.assign(n, 0.0);
  tal_.transport.assign(n, 0.0);
  tal_.kinetic.assign(n, 0.0);
  tal_.willmore.assign(n, 0.0);
  tal_.forcing.assign(n, 0.0);
  tal_.bulk.assign(n, 0.0);
}

void BatteryAccumulator::accumulate(const StepContext& ctx) {
  const Grid& g = grid_;
  const double tm = ctx.t_before + 0.5 * ctx.dt;
  const double eps = ctx.eps;
  const double* um = ctx.u_mid->data();
  const double* wm = ctx.w_mid->data();
  const double* du = ctx.dtu->data();
  const double* gs = ctx.gradsq_mid->data();
  const double* gf = ctx.g->data();
  const double cellw = ctx.dt * g.cell_volume();
  for (std::size_t m = 0; m < bat_.zeta.size(); ++m) {
    const ScalarTestFn& z = bat_.zeta[m];
    if (!z.in_support(tm)) continue;
    std::int64_t lo[3], hi[3];
    z.support_box(g, lo, hi);
    double s_dt = 0, s_tr = 0, s_kin = 0, s_wil = 0, s_for = 0;
    double x[3] = {0, 0, 0}, gz[3], gu[3];
    for (std::int64_t k = lo[2]; k <= hi[2]; ++k) {
      if (g.dim() > 2) x[2] = g.center(2, static_cast<int>(k));
      for (std::int64_t j = lo[1]; j <= hi[1]; ++j) {
        if (g.dim() > 1) x[1] = g.center(1, static_cast<int>(j));
        const std::int64_t row = j * g.stride(1) + k * g.stride(2);
        for (std::int64_t i = lo[0]; i <= hi[0]; ++i) {
          const std::int64_t c = row + i;
          x[0] = g.center(0, static_cast<int>(i));
          const double zv = z.value(tm, x);
          const double zt = z.dt(tm, x);
          if (zv == 0.0 && zt == 0.0) continue;
          const double rho = 0.5 * eps * gs[c] + w_value(um[c]) / eps;
          s_dt += zt * rho;
          z.grad(tm, x, gz);
          cell_gradient(g, um, static_cast<int>(i), static_cast<int>(j),
                        static_cast<int>(k), c, gu);
          double zg = 0.0;
          for (int d = 0; d < g.dim(); ++d) zg += gz[d] * gu[d];
          // grad(zeta).v dmu~ = -eps dtu grad(zeta).grad(u)
          s_tr -= eps * du[c] * zg;
          if (gs[c] > kGradFloor * kGradFloor) s_kin += zv * eps * du[c] * du[c];
          s_wil += zv * wm[c] * wm[c] / eps;
          s_for += zv * gf[c] * gf[c] / eps;
        }
      }
    }
    tal_.dt_mass[m] += cellw * s_dt;
    tal_.transport[m] += cellw * s_tr;
    tal_.kinetic[m] += cellw * s_kin;
    tal_.willmore[m] += cellw * s_wil;
    tal_.forcing[m] += cellw * s_for;
  }
}

void BatteryAccumulator::accumulate_bulk(const StepContext& ctx, const Array& th_before,
                                         const Array& th_after) {
  const Grid& g = grid_;
  const double tm = ctx.t_before + 0.5 * ctx.dt;
  const double* um = ctx.u_mid->data();
  const double* tb = th_before.data();
  const double* ta = th_after.data();
  const double cellw = ctx.dt * g.cell_volume();
  const double half_c0 = 0.5 * c0();
  for (std::size_t m = 0; m < bat_.zeta.size(); ++m) {
    const ScalarTestFn& z = bat_.zeta[m];
    if (!z.in_support(tm)) continue;
    std::int64_t lo[3], hi[3];
    z.support_box(g, lo, hi);
    double s = 0.0;
    double x[3] = {0, 0, 0};
    for (std::int64_t k = lo[2]; k <= hi[2]; ++k) {
      if (g.dim() > 2) x[2] = g.center(2, static_cast<int>(k));
      for (std::int64_t j = lo[1]; j <= hi[1]; ++j) {
        if (g.dim() > 1) x[1] = g.center(1, static_cast<int>(j));
        const std::int64_t row = j * g.stride(1) + k * g.stride(2);
        for (std::int64_t i = lo[0]; i <= hi[0]; ++i) {
          const std::int64_t c = row + i;
          x[0] = g.center(0, static_cast<int>(i));
          const double zt = z.dt(tm, x);
          const double zl = z.laplacian(tm, x);
          const double thm = 0.5 * (tb[c] + ta[c]);
          s += (zt + zl) * thm + half_c0 * um[c] * zt;
        }
      }
    }
    tal_.bulk[m] += cellw * s;
  }
}

std::vector<double> BatteryAccumulator::brakke_slack(double lambda_total) const {
  std::vector<double> out(bat_.zeta.size());
  for (std::size_t m = 0; m < out.size(); ++m)
    out[m] = tal_.dt_mass[m] + tal_.transport[m] - 0.5 * tal_.kinetic[m] +
             0.5 * bat_.zeta[m].sup_abs() * lambda_total;
  return out;
}

std::vector<double> BatteryAccumulator::l2flow_residual() const {
  std::vector<double> out(bat_.zeta.size());
  for (std::size_t m = 0; m < out.size(); ++m)
    out[m] = std::abs(tal_.dt_mass[m] + tal_.transport[m]) / bat_.zeta[m].sup_abs();
  return out;
}

std::vector<double> BatteryAccumulator::bulk_residual() const {
  std::vector<double> out(bat_.zeta.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::abs(tal_.bulk[m]);
  return out;
}

}  // namespace pfl
