#include "pfl/interface.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace pfl {
namespace {

// Interpolated zero crossing between lattice points p1, p2 with values v1, v2.
double cross_t(double v1, double v2) {
  const double d = v1 - v2;
  if (d == 0.0) return 0.5;
  double t = v1 / d;
  return std::clamp(t, 0.0, 1.0);
}

bool pos(double v) { return v >= 0.0; }  // u == 0 counts as the +1 phase

// ---------------------------------------------------------------- 2D squares
// Edge ids: (j*nx + i)*2 + 0 is the edge (i,j)-(i+1,j), +1 is (i,j)-(i,j+1).
struct Squares {
  const Grid& g;
  const Array& u;
  std::unordered_map<std::int64_t, std::array<double, 2>> edge_pt;
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> links;

  double val(std::int64_t i, std::int64_t j) const { return u[j * g.cells(0) + i]; }

  std::int64_t edge_id(std::int64_t i, std::int64_t j, int axis) const {
    return (j * g.cells(0) + i) * 2 + axis;
  }

  std::int64_t crossing(std::int64_t i, std::int64_t j, int axis) {
    const std::int64_t id = edge_id(i, j, axis);
    if (!edge_pt.count(id)) {
      const std::int64_t i2 = i + (axis == 0), j2 = j + (axis == 1);
      const double t = cross_t(val(i, j), val(i2, j2));
      const double x = g.center(0, i) + t * (g.center(0, i2) - g.center(0, i));
      const double y = g.center(1, j) + t * (g.center(1, j2) - g.center(1, j));
      edge_pt[id] = {x, y};
    }
    return id;
  }

  void segment(std::int64_t a, std::int64_t b) {
    links[a].push_back(b);
    links[b].push_back(a);
  }
};

std::vector<Polyline> march_squares(const Grid& g, const Array& u) {
  Squares sq{g, u, {}, {}};
  const std::int64_t nx = g.cells(0), ny = g.cells(1);
  for (std::int64_t j = 0; j + 1 < ny; ++j)
    for (std::int64_t i = 0; i + 1 < nx; ++i) {
      const double v00 = sq.val(i, j), v10 = sq.val(i + 1, j);
      const double v11 = sq.val(i + 1, j + 1), v01 = sq.val(i, j + 1);
      const int mask = pos(v00) | pos(v10) << 1 | pos(v11) << 2 | pos(v01) << 3;
      if (mask == 0 || mask == 15) continue;
      // Edge crossings around the square, computed lazily.
      auto e0 = [&] { return sq.crossing(i, j, 0); };          // bottom
      auto e1 = [&] { return sq.crossing(i + 1, j, 1); };      // right
      auto e2 = [&] { return sq.crossing(i, j + 1, 0); };      // top
      auto e3 = [&] { return sq.crossing(i, j, 1); };          // left
      switch (mask) {
        case 1: case 14: sq.segment(e3(), e0()); break;
        case 2: case 13: sq.segment(e0(), e1()); break;
        case 3: case 12: sq.segment(e3(), e1()); break;
        case 4: case 11: sq.segment(e1(), e2()); break;
        case 6: case 9: sq.segment(e0(), e2()); break;
        case 7: case 8: sq.segment(e2(), e3()); break;
        case 5:   // +corners on one diagonal: split by the cell-average sign
        case 10: {
          const bool plus_center = v00 + v10 + v11 + v01 >= 0.0;
          const bool join_09 = (mask == 5) == plus_center;
          if (join_09) {  // arcs clip the two corners on the other diagonal
            sq.segment(e0(), e1());
            sq.segment(e2(), e3());
          } else {
            sq.segment(e3(), e0());
            sq.segment(e1(), e2());
          }
          break;
        }
        default: break;
      }
    }

  // Stitch segments into polylines: open chains first, then remaining cycles.
  // Links are consumed (set to -1) as the walk passes through them.
  std::vector<Polyline> out;
  auto walk = [&](std::int64_t start) {
    Polyline pl;
    pl.pts.push_back(sq.edge_pt[start]);
    std::int64_t cur = start;
    while (true) {
      std::int64_t next = -1;
      for (std::int64_t cand : sq.links[cur])
        if (cand != -1) { next = cand; break; }
      if (next == -1) break;
      for (auto& c : sq.links[cur])
        if (c == next) { c = -1; break; }
      for (auto& c : sq.links[next])
        if (c == cur) { c = -1; break; }
      pl.pts.push_back(sq.edge_pt[next]);
      cur = next;
      if (cur == start) { pl.closed = true; break; }
    }
    return pl;
  };
  auto live_degree = [&](const std::vector<std::int64_t>& v) {
    int d = 0;
    for (auto c : v) d += c != -1;
    return d;
  };
  for (auto& [id, v] : sq.links)
    if (live_degree(v) == 1) out.push_back(walk(id));
  for (auto& [id, v] : sq.links)
    if (live_degree(v) > 0) out.push_back(walk(id));
  return out;
}

}  // namespace

InterfaceSet extract_interface(const ScalarField& u) {
  const Grid& g = u.grid;
  InterfaceSet s;
  s.dim = g.dim();
  if (g.dim() == 2) {
    s.lines = march_squares(g, u.a);
    return s;
  }
  // 1D and 3D: zero crossings on axis edges between neighboring centers.
  for (int axis = 0; axis < g.dim(); ++axis) {
    const std::int64_t st = g.stride(axis);
    std::array<std::int64_t, 3> n{1, 1, 1};
    for (int d = 0; d < g.dim(); ++d) n[d] = g.cells(d);
    for (std::int64_t k = 0; k < n[2]; ++k)
      for (std::int64_t j = 0; j < n[1]; ++j)
        for (std::int64_t i = 0; i < n[0]; ++i) {
          std::array<std::int64_t, 3> idx{i, j, k};
          if (idx[axis] + 1 >= g.cells(axis)) continue;
          std::int64_t c = 0;
          for (int d = 0; d < g.dim(); ++d) c += idx[d] * g.stride(d);
          const double v1 = u.a[c], v2 = u.a[c + st];
          if (pos(v1) == pos(v2)) continue;
          std::array<double, 3> p{0, 0, 0};
          for (int d = 0; d < g.dim(); ++d) p[d] = g.center(d, idx[d]);
          p[axis] += cross_t(v1, v2) * g.spacing();
          s.points.push_back(p);
        }
  }
  return s;
}

namespace {

// Algebraic least-squares circle/sphere fit: |p|^2 = 2 c.p + (R^2 - |c|^2).
void fit_sphere(const std::vector<std::array<double, 3>>& pts, int dim,
                InterfaceMetrics& m) {
  const std::int64_t n = static_cast<std::int64_t>(pts.size());
  if (n < dim + 1) return;
  Eigen::MatrixXd A(n, dim + 1);
  Eigen::VectorXd b(n);
  for (std::int64_t r = 0; r < n; ++r) {
    double s = 0;
    for (int d = 0; d < dim; ++d) {
      A(r, d) = 2.0 * pts[r][d];
      s += pts[r][d] * pts[r][d];
    }
    A(r, dim) = 1.0;
    b[r] = s;
  }
  Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
  double c2 = 0;
  for (int d = 0; d < dim; ++d) {
    m.centroid[d] = sol[d];
    c2 += sol[d] * sol[d];
  }
  const double r2 = sol[dim] + c2;
  if (!(r2 > 0)) return;
  m.radius = std::sqrt(r2);
  double ss = 0;
  for (const auto& p : pts) {
    double d2 = 0;
    for (int d = 0; d < dim; ++d) d2 += (p[d] - m.centroid[d]) * (p[d] - m.centroid[d]);
    const double e = std::sqrt(d2) - m.radius;
    ss += e * e;
  }
  m.radius_rms = std::sqrt(ss / static_cast<double>(n));
  m.has_fit = true;
}

}  // namespace

InterfaceMetrics interface_metrics(const InterfaceSet& s) {
  InterfaceMetrics m;
  std::vector<std::array<double, 3>> pts;
  if (s.dim == 2) {
    for (const auto& pl : s.lines) {
      for (std::size_t k = 0; k + 1 < pl.pts.size(); ++k)
        m.length += std::hypot(pl.pts[k + 1][0] - pl.pts[k][0],
                               pl.pts[k + 1][1] - pl.pts[k][1]);
      for (const auto& p : pl.pts) pts.push_back({p[0], p[1], 0.0});
      if (pl.closed && !pl.pts.empty()) pts.pop_back();  // duplicate of front
    }
  } else {
    pts = s.points;
  }
  m.n_points = static_cast<std::int64_t>(pts.size());
  if (pts.empty()) return m;
  if (s.dim == 1) {
    for (const auto& p : pts) m.centroid[0] += p[0];
    m.centroid[0] /= static_cast<double>(pts.size());
    return m;
  }
  fit_sphere(pts, s.dim, m);
  if (!m.has_fit) {
    for (const auto& p : pts)
      for (int d = 0; d < s.dim; ++d) m.centroid[d] += p[d] / static_cast<double>(pts.size());
  }
  return m;
}

double front_speed(const std::vector<std::pair<double, double>>& t_pos, double h) {
  if (t_pos.size() < 2) throw std::runtime_error("front_speed: need at least two samples");
  const auto n = static_cast<double>(t_pos.size());
  double st = 0, sp = 0;
  for (const auto& [t, p] : t_pos) { st += t; sp += p; }
  st /= n;
  sp /= n;
  double stt = 0, stp = 0, pmin = t_pos[0].second, pmax = pmin;
  for (const auto& [t, p] : t_pos) {
    stt += (t - st) * (t - st);
    stp += (t - st) * (p - sp);
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  if (stt == 0.0) throw std::runtime_error("front_speed: degenerate time samples");
  const double slope = stp / stt;
  double ss = 0;
  for (const auto& [t, p] : t_pos) {
    const double e = p - sp - slope * (t - st);
    ss += e * e;
  }
  const double rms = std::sqrt(ss / n);
  const double tol = std::max(2.0 * h, 0.02 * (pmax - pmin));
  if (rms > tol)
    throw std::runtime_error("front_speed: positions deviate from linear motion (rms " +
                             std::to_string(rms) + " > " + std::to_string(tol) + ")");
  return slope;
}

}  // namespace pfl
