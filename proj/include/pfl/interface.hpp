// interface.hpp -- zero-level-set extraction and sharp-interface metrics.
//
// 2D: marching squares on the cell-center lattice with linear edge
// interpolation; saddle squares are resolved by the sign of the cell average.
// 1D/3D: zero crossings along axis-aligned center-to-center edges.
#pragma once

#include "pfl/grid.hpp"

#include <array>
#include <vector>

namespace pfl {

struct Polyline {
  std::vector<std::array<double, 2>> pts;
  bool closed = false;
};

struct InterfaceSet {
  int dim = 0;
  std::vector<Polyline> lines;                    // 2D
  std::vector<std::array<double, 3>> points;      // 1D and 3D crossings
  bool empty() const { return lines.empty() && points.empty(); }
};

InterfaceSet extract_interface(const ScalarField& u);

struct InterfaceMetrics {
  double length = 0.0;                    // 2D total polyline length
  std::array<double, 3> centroid{0, 0, 0};
  double radius = 0.0;                    // least-squares circle/sphere radius
  double radius_rms = 0.0;                // rms distance of points to the fit
  bool has_fit = false;
  std::int64_t n_points = 0;
};

InterfaceMetrics interface_metrics(const InterfaceSet& s);

// Least-squares slope of front position over time. Throws if the positions
// deviate from linear motion by more than max(2h, 2% of the position range)
// rms -- the fit-quality guard against garbage crossings.
double front_speed(const std::vector<std::pair<double, double>>& t_pos, double h);

}  // namespace pfl
