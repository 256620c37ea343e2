#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "grid.hpp"

namespace convexsdp {

// Nodal values u_k on a grid. Values are always finite.
class GridFunction {
 public:
  explicit GridFunction(Grid grid);
  GridFunction(Grid grid, std::vector<double> values);

  template <class F>
  static GridFunction sample(const Grid& grid, F&& f) {
    std::vector<double> values(grid.node_count());
    for (std::int64_t k = 0; k < grid.node_count(); ++k) values[k] = f(grid.point(k));
    return GridFunction(grid, std::move(values));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::int64_t k) const { return values_[k]; }
  double at(std::int64_t k) const;
  void set(std::int64_t k, double value);

 private:
  Grid grid_;
  std::vector<double> values_;
};

struct DiscreteHessian {
  std::int64_t node = 0;
  std::vector<int> axes;
  Eigen::MatrixXd matrix;
};

double forward_diff(const GridFunction& u, std::int64_t node, int axis);
double second_diff(const GridFunction& u, std::int64_t node, int i, int j);

// Full d x d Hessian at interior nodes; reduced to the usable axes on the
// boundary. Throws hessian_undefined where no axis is usable.
DiscreteHessian discrete_hessian(const GridFunction& u, std::int64_t node);

// Sum of the fine discrete Hessians over every fine node y whose cube
// Q_h(y) lies inside Q_{h'}(x), h' = ratio * h, evaluated through the
// telescoped boundary sums (first differences on the faces of Q_{h'}(x)
// for the diagonal, corner values for the off-diagonal entries).
// `coarse_node` is the fine index of x; its indices must be multiples of
// `ratio` and Q_{h'}(x) must stay inside the unit cube.
Eigen::MatrixXd aggregated_hessian(const GridFunction& u, std::int64_t coarse_node, int ratio);

// Tensor-product multilinear interpolation.
double interpolate(const GridFunction& u, std::span<const double> point);

struct ConvexityViolation {
  std::int64_t node = 0;
  std::vector<int> offset;  // y in mesh units
  double deficit = 0.0;     // u(x+y) + u(x-y) - 2u(x), negative
};

struct ConvexityReport {
  bool convex = true;
  std::optional<ConvexityViolation> first_violation;
};

// Midpoint inequality u(x+y) + u(x-y) >= 2u(x) over all lattice vectors y.
// O(N^2); for diagnostics on small grids.
ConvexityReport check_discrete_convexity(const GridFunction& u, double slack = 1e-12);

struct PsdReport {
  bool psd = true;
  std::int64_t worst_node = -1;
  double min_eigenvalue = 0.0;
};

PsdReport psd_hessian_everywhere(const GridFunction& u, double tol = 1e-9);

// Slope inequalities of a 1D function on a (possibly non-uniform) partition.
bool convex_1d(std::span<const double> x, std::span<const double> values, double slack = 1e-12);

// convex_1d along every axis-parallel line of the grid.
bool axis_lines_convex(const GridFunction& u, double slack = 1e-12);

}  // namespace convexsdp
