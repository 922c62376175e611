// grid.hpp -- uniform cell-centered grid and Eigen-backed field types.
//
// Domain is the box [0, extent_d] per axis, dim in {1,2,3}, sampled at cell
// centers x_i = (i + 1/2) h with one uniform spacing h across all axes.
// Fields are flat Eigen arrays in x-fastest order; free functions in
// ops.hpp provide the stencil operators.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pfl {

using Array = Eigen::ArrayXd;

class Grid {
public:
  Grid() = default;

  Grid(int dim, std::array<int, 3> cells, std::array<double, 3> extent)
      : dim_(dim), cells_(cells), extent_(extent) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dim must be 1, 2 or 3");
    for (int d = dim; d < 3; ++d) { cells_[d] = 1; extent_[d] = 0.0; }
    size_ = 1;
    for (int d = 0; d < dim; ++d) {
      if (cells_[d] < 2) throw std::invalid_argument("grid: need at least 2 cells per axis");
      if (!(extent_[d] > 0)) throw std::invalid_argument("grid: extent must be positive");
      size_ *= cells_[d];
    }
    h_ = extent_[0] / cells_[0];
    for (int d = 1; d < dim; ++d) {
      const double hd = extent_[d] / cells_[d];
      if (std::abs(hd - h_) > 1e-12 * h_)
        throw std::invalid_argument("grid: spacing must be uniform across axes (got " +
                                    std::to_string(h_) + " vs " + std::to_string(hd) + ")");
    }
    stride_ = {1, cells_[0], static_cast<std::int64_t>(cells_[0]) * cells_[1]};
  }

  int dim() const { return dim_; }
  int cells(int axis) const { return cells_[axis]; }
  const std::array<int, 3>& cells() const { return cells_; }
  double extent(int axis) const { return extent_[axis]; }
  const std::array<double, 3>& extent() const { return extent_; }
  double spacing() const { return h_; }
  std::int64_t size() const { return size_; }
  std::int64_t stride(int axis) const { return stride_[axis]; }
  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim_; ++d) v *= h_;
    return v;
  }

  // Center coordinate of cell index i along an axis (spacing is uniform, so
  // the axis only documents intent).
  double center([[maybe_unused]] int axis, int i) const { return (i + 0.5) * h_; }
  void cell_center(std::int64_t idx, double* x) const {
    std::int64_t r = idx;
    for (int d = 0; d < dim_; ++d) {
      x[d] = center(d, static_cast<int>(r % cells_[d]));
      r /= cells_[d];
    }
    for (int d = dim_; d < 3; ++d) x[d] = 0.0;
  }

  bool same_layout(const Grid& o) const {
    return dim_ == o.dim_ && cells_ == o.cells_ &&
           std::abs(h_ - o.h_) <= 1e-15 * (h_ + o.h_);
  }

private:
  int dim_ = 0;
  std::array<int, 3> cells_{1, 1, 1};
  std::array<double, 3> extent_{0, 0, 0};
  double h_ = 0;
  std::int64_t size_ = 0;
  std::array<std::int64_t, 3> stride_{1, 1, 1};
};

// Scalar samples at cell centers.
struct ScalarField {
  Grid grid;
  Array a;

  ScalarField() = default;
  explicit ScalarField(const Grid& g) : grid(g), a(Array::Zero(g.size())) {}
  ScalarField(const Grid& g, Array values) : grid(g), a(std::move(values)) {
    if (a.size() != grid.size()) throw std::invalid_argument("field: size mismatch");
  }

  double& operator[](std::int64_t i) { return a[i]; }
  double operator[](std::int64_t i) const { return a[i]; }
};

// One component array per axis.
struct VectorField {
  Grid grid;
  std::array<Array, 3> comp;

  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g) {
    for (int d = 0; d < g.dim(); ++d) comp[d] = Array::Zero(g.size());
  }
};

// Fill a field by evaluating fn(x) at every cell center.
template <class Fn>
ScalarField sample(const Grid& g, Fn&& fn) {
  ScalarField f(g);
  double x[3];
  for (std::int64_t i = 0; i < g.size(); ++i) {
    g.cell_center(i, x);
    f.a[i] = fn(x);
  }
  return f;
}

}  // namespace pfl
