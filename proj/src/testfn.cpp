#include "pfl/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pfl {
namespace {

constexpr double kPi = 3.14159265358979323846;

// beta(s) = cos^4(pi s / 2), beta' = -2 pi cos^3 sin, beta'' in terms of
// c = cos, n = sin:  beta'' = -pi^2 c^2 (c^2 - 3 n^2).  All vanish at |s| = 1
// together with beta, so the piecewise extension by zero is C^2.
double beta0(double s) {
  const double c = std::cos(0.5 * kPi * s);
  return c * c * c * c;
}
double beta1(double s) {
  const double c = std::cos(0.5 * kPi * s), n = std::sin(0.5 * kPi * s);
  return -2.0 * kPi * c * c * c * n;
}
double beta2(double s) {
  const double c = std::cos(0.5 * kPi * s), n = std::sin(0.5 * kPi * s);
  return -kPi * kPi * c * c * (c * c - 3.0 * n * n);
}

}  // namespace

double BumpAxis::value(double x) const {
  const double s = (x - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  return (1.0 + tilt * s) * beta0(s);
}

double BumpAxis::d1(double x) const {
  const double s = (x - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  return (tilt * beta0(s) + (1.0 + tilt * s) * beta1(s)) / width;
}

double BumpAxis::d2(double x) const {
  const double s = (x - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  return (2.0 * tilt * beta1(s) + (1.0 + tilt * s) * beta2(s)) / (width * width);
}

double BumpAxis::sup_abs() const {
  double m = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double s = -1.0 + 2.0 * k / 2000.0;
    m = std::max(m, std::abs((1.0 + tilt * s) * beta0(s)));
  }
  return m;
}

double ScalarTestFn::value(double t, const double* x) const {
  double v = amp * time.value(t);
  for (int d = 0; d < dim && v != 0.0; ++d) v *= ax[d].value(x[d]);
  return v;
}

double ScalarTestFn::dt(double t, const double* x) const {
  double v = amp * time.d1(t);
  for (int d = 0; d < dim && v != 0.0; ++d) v *= ax[d].value(x[d]);
  return v;
}

void ScalarTestFn::grad(double t, const double* x, double* out) const {
  const double tv = amp * time.value(t);
  double xv[3], xd[3];
  for (int d = 0; d < dim; ++d) {
    xv[d] = ax[d].value(x[d]);
    xd[d] = ax[d].d1(x[d]);
  }
  for (int d = 0; d < dim; ++d) {
    double v = tv * xd[d];
    for (int e = 0; e < dim; ++e)
      if (e != d) v *= xv[e];
    out[d] = v;
  }
}

double ScalarTestFn::laplacian(double t, const double* x) const {
  const double tv = amp * time.value(t);
  if (tv == 0.0) return 0.0;
  double xv[3], x2[3];
  for (int d = 0; d < dim; ++d) {
    xv[d] = ax[d].value(x[d]);
    x2[d] = ax[d].d2(x[d]);
  }
  double sum = 0.0;
  for (int d = 0; d < dim; ++d) {
    double v = x2[d];
    for (int e = 0; e < dim; ++e)
      if (e != d) v *= xv[e];
    sum += v;
  }
  return tv * sum;
}

double ScalarTestFn::sup_abs() const {
  double v = std::abs(amp) * time.sup_abs();
  for (int d = 0; d < dim; ++d) v *= ax[d].sup_abs();
  return v;
}

bool ScalarTestFn::in_support(double t) const {
  return std::abs(t - time.center) < time.width;
}

void ScalarTestFn::support_box(const Grid& g, std::int64_t* lo, std::int64_t* hi) const {
  for (int d = 0; d < g.dim(); ++d) {
    const double a = ax[d].center - ax[d].width;
    const double b = ax[d].center + ax[d].width;
    // centers are (i + 1/2) h: first center >= a, last center <= b
    std::int64_t i0 = static_cast<std::int64_t>(std::ceil(a / g.spacing() - 0.5));
    std::int64_t i1 = static_cast<std::int64_t>(std::floor(b / g.spacing() - 0.5));
    lo[d] = std::max<std::int64_t>(0, i0);
    hi[d] = std::min<std::int64_t>(g.cells(d) - 1, i1);
  }
  for (int d = g.dim(); d < 3; ++d) {
    lo[d] = 0;
    hi[d] = 0;
  }
}

void VectorTestFn::value(const double* x, double* out) const {
  if (kind == Kind::Directional) {
    const double p = psi.value(psi.time.center, x);  // time factor at its peak
    for (int d = 0; d < dim; ++d) out[d] = p * dir[d];
    return;
  }
  double rho2 = 0.0;
  for (int d = 0; d < dim; ++d) rho2 += (x[d] - center[d]) * (x[d] - center[d]);
  const double rho = std::sqrt(rho2);
  const double c = rho > 0 ? chi.value(rho) / rho : 0.0;
  for (int d = 0; d < dim; ++d) out[d] = c * (x[d] - center[d]);
}

double VectorTestFn::divergence(const double* x) const {
  if (kind == Kind::Directional) {
    double gr[3];
    psi.grad(psi.time.center, x, gr);
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += gr[d] * dir[d];
    return s;
  }
  double rho2 = 0.0;
  for (int d = 0; d < dim; ++d) rho2 += (x[d] - center[d]) * (x[d] - center[d]);
  const double rho = std::sqrt(rho2);
  if (rho == 0.0) return 0.0;
  return chi.d1(rho) + (dim - 1) * chi.value(rho) / rho;
}

double VectorTestFn::nu_jac_nu(const double* x, const double* nu) const {
  if (kind == Kind::Directional) {
    // D eta = dir (grad psi)^T, so nu.Deta.nu = (dir.nu)(grad psi.nu)
    double gr[3];
    psi.grad(psi.time.center, x, gr);
    double dn = 0.0, gn = 0.0;
    for (int d = 0; d < dim; ++d) {
      dn += dir[d] * nu[d];
      gn += gr[d] * nu[d];
    }
    return dn * gn;
  }
  // D eta = chi' e@e + (chi/rho)(I - e@e) with e the radial unit vector
  double rho2 = 0.0, en = 0.0;
  double e[3];
  for (int d = 0; d < dim; ++d) {
    e[d] = x[d] - center[d];
    rho2 += e[d] * e[d];
  }
  const double rho = std::sqrt(rho2);
  if (rho == 0.0) return 0.0;
  for (int d = 0; d < dim; ++d) en += (e[d] / rho) * nu[d];
  const double cr = chi.value(rho) / rho;
  return chi.d1(rho) * en * en + cr * (1.0 - en * en);
}

double VectorTestFn::sup_abs() const {
  return kind == Kind::Directional ? psi.sup_abs() : chi.sup_abs();
}

Battery make_battery(const Grid& g, double horizon, std::uint32_t seed,
                     int n_scalar, int n_vector) {
  std::mt19937_64 rng(seed);
  auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto uni = [&](double a, double b) { return a + (b - a) * u01(); };

  Battery bat;
  for (int k = 0; k < n_scalar; ++k) {
    ScalarTestFn f;
    f.dim = g.dim();
    f.amp = uni(0.5, 1.5);
    f.time = {uni(0.35, 0.65) * horizon, uni(0.18, 0.30) * horizon, uni(-0.8, 0.8)};
    for (int d = 0; d < g.dim(); ++d)
      f.ax[d] = {uni(0.34, 0.66) * g.extent(d), uni(0.15, 0.28) * g.extent(d),
                 uni(-0.8, 0.8)};
    bat.zeta.push_back(f);
  }
  double lmin = g.extent(0);
  for (int d = 1; d < g.dim(); ++d) lmin = std::min(lmin, g.extent(d));
  for (int k = 0; k < n_vector; ++k) {
    VectorTestFn v;
    v.dim = g.dim();
    if (g.dim() > 1 && k % 2 == 1) {
      v.kind = VectorTestFn::Kind::Radial;
      for (int d = 0; d < g.dim(); ++d) v.center[d] = uni(0.45, 0.55) * g.extent(d);
      // support in rho stays strictly inside (0, 0.40 lmin), hence the whole
      // field is compactly supported in the domain interior
      const double c = uni(0.16, 0.24) * lmin;
      v.chi = {c, std::min(c - 0.02 * lmin, 0.40 * lmin - c), uni(-0.8, 0.8)};
    } else {
      v.kind = VectorTestFn::Kind::Directional;
      v.psi.dim = g.dim();
      v.psi.amp = uni(0.5, 1.5);
      v.psi.time = {0.0, 1.0, 0.0};  // constant-in-time factor, value(0)=1 at peak
      for (int d = 0; d < g.dim(); ++d)
        v.psi.ax[d] = {uni(0.34, 0.66) * g.extent(d), uni(0.15, 0.28) * g.extent(d),
                       uni(-0.8, 0.8)};
      double norm = 0.0;
      for (int d = 0; d < g.dim(); ++d) {
        v.dir[d] = uni(-1.0, 1.0);
        norm += v.dir[d] * v.dir[d];
      }
      norm = std::sqrt(norm);
      if (norm < 0.1) { v.dir[0] = 1.0; norm = 1.0; }
      for (int d = 0; d < g.dim(); ++d) v.dir[d] /= norm;
    }
    bat.eta.push_back(v);
  }
  return bat;
}

}  // namespace pfl
