#include "fdops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "error.hpp"
#include "symeig.hpp"

namespace convexsdp {

GridFunction::GridFunction(Grid grid) : grid_(grid), values_(grid.node_count(), 0.0) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::int64_t>(values_.size()) != grid_.node_count())
    fail(ErrorCode::shape_mismatch, "grid function has " + std::to_string(values_.size()) +
                                        " values for " + std::to_string(grid_.node_count()) + " nodes");
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "grid function value is not finite");
}

double GridFunction::at(std::int64_t k) const {
  if (!grid_.contains(k)) fail(ErrorCode::out_of_range, "node index out of range");
  return values_[k];
}

void GridFunction::set(std::int64_t k, double value) {
  if (!grid_.contains(k)) fail(ErrorCode::out_of_range, "node index out of range");
  if (!std::isfinite(value)) fail(ErrorCode::invalid_argument, "grid function value is not finite");
  values_[k] = value;
}

namespace {

void check_axis(const Grid& g, int axis) {
  if (axis < 0 || axis >= g.dim()) fail(ErrorCode::out_of_range, "axis " + std::to_string(axis) + " out of range");
}

std::int64_t step(const Grid& g, std::int64_t k, int axis, int s) {
  auto nb = g.neighbor(k, axis, s);
  if (!nb) fail(ErrorCode::undefined_stencil, "finite difference stencil leaves the mesh");
  return *nb;
}

std::int64_t step2(const Grid& g, std::int64_t k, int i, int si, int j, int sj) {
  return step(g, step(g, k, i, si), j, sj);
}

}  // namespace

double forward_diff(const GridFunction& u, std::int64_t node, int axis) {
  const Grid& g = u.grid();
  check_axis(g, axis);
  const std::int64_t next = step(g, node, axis, 1);
  return (u[next] - u[node]) * g.subdivisions();
}

double second_diff(const GridFunction& u, std::int64_t node, int i, int j) {
  const Grid& g = u.grid();
  check_axis(g, i);
  check_axis(g, j);
  if (!g.contains(node)) fail(ErrorCode::out_of_range, "node index out of range");
  const double n = g.subdivisions();
  if (i == j) {
    const double num = u[step(g, node, i, 1)] - 2.0 * u[node] + u[step(g, node, i, -1)];
    return num * n * n;
  }
  if (i > j) std::swap(i, j);
  const double num = u[step2(g, node, i, 1, j, 1)] - u[step2(g, node, i, -1, j, 1)] -
                     u[step2(g, node, i, 1, j, -1)] + u[step2(g, node, i, -1, j, -1)];
  return num * n * n / 4.0;
}

DiscreteHessian discrete_hessian(const GridFunction& u, std::int64_t node) {
  const Grid& g = u.grid();
  DiscreteHessian hess;
  hess.node = node;
  hess.axes = g.classify(node).hessian_axes;
  if (hess.axes.empty())
    fail(ErrorCode::hessian_undefined, "discrete Hessian undefined at node " + std::to_string(node));
  const auto m = static_cast<Eigen::Index>(hess.axes.size());
  hess.matrix.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = a; b < m; ++b) {
      const double v = second_diff(u, node, hess.axes[a], hess.axes[b]);
      hess.matrix(a, b) = v;
      hess.matrix(b, a) = v;
    }
  return hess;
}

namespace {

// Calls f(offset) for every offset in [-r, r]^d with the components listed
// in `fixed` held at zero.
template <class F>
void for_each_transverse(int d, int r, const std::vector<int>& fixed, F&& f) {
  std::vector<int> free_axes;
  for (int a = 0; a < d; ++a)
    if (std::find(fixed.begin(), fixed.end(), a) == fixed.end()) free_axes.push_back(a);
  std::vector<int> offset(d, 0);
  for (int a : free_axes) offset[a] = -r;
  while (true) {
    f(offset);
    std::size_t pos = 0;
    for (; pos < free_axes.size(); ++pos) {
      int& c = offset[free_axes[pos]];
      if (c < r) {
        ++c;
        break;
      }
      c = -r;
    }
    if (pos == free_axes.size()) return;
  }
}

}  // namespace

Eigen::MatrixXd aggregated_hessian(const GridFunction& u, std::int64_t coarse_node, int ratio) {
  const Grid& g = u.grid();
  const int d = g.dim();
  const int n = g.subdivisions();
  if (ratio < 2) fail(ErrorCode::invalid_argument, "coarse/fine ratio must be >= 2");
  if (n % ratio != 0) fail(ErrorCode::invalid_argument, "coarse mesh is not nested in the fine mesh");
  const std::vector<int> x = g.multi_index(coarse_node);
  for (int c : x) {
    if (c % ratio != 0) fail(ErrorCode::invalid_argument, "node is not on the coarse mesh");
    if (c - ratio < 0 || c + ratio > n) fail(ErrorCode::out_of_range, "coarse cube leaves the unit cube");
  }

  const int inner = ratio - 1;
  auto value = [&](const std::vector<int>& offset) {
    std::vector<int> m(x);
    for (int a = 0; a < d; ++a) m[a] += offset[a];
    return u[g.index(m)];
  };

  Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(d, d);
  const double n2 = static_cast<double>(n) * n;
  for (int i = 0; i < d; ++i) {
    double sum = 0.0;
    for_each_transverse(d, inner, {i}, [&](std::vector<int> t) {
      t[i] = ratio;
      double outer_hi = value(t);
      t[i] = inner;
      double inner_hi = value(t);
      t[i] = -inner;
      double inner_lo = value(t);
      t[i] = -ratio;
      double outer_lo = value(t);
      sum += (outer_hi - inner_hi) - (inner_lo - outer_lo);
    });
    agg(i, i) = sum * n2;
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double sum = 0.0;
      for_each_transverse(d, inner, {i, j}, [&](std::vector<int> t) {
        for (int p : {inner, ratio})
          for (int q : {inner, ratio}) {
            t[i] = p, t[j] = q;
            double pp = value(t);
            t[i] = p, t[j] = -q;
            double pm = value(t);
            t[i] = -p, t[j] = q;
            double mp = value(t);
            t[i] = -p, t[j] = -q;
            double mm = value(t);
            sum += pp - pm - mp + mm;
          }
      });
      agg(i, j) = agg(j, i) = sum * n2 / 4.0;
    }
  return agg;
}

double interpolate(const GridFunction& u, std::span<const double> point) {
  const Grid& g = u.grid();
  const int d = g.dim();
  const int n = g.subdivisions();
  if (static_cast<int>(point.size()) != d) fail(ErrorCode::shape_mismatch, "point has wrong dimension");
  std::vector<int> cell(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    const double p = point[a];
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::out_of_range, "interpolation point outside the unit cube");
    double s = p * n;
    const double r = std::round(s);
    if (std::abs(s - r) <= 1e-12 * n) s = r;
    int c = static_cast<int>(std::floor(s));
    if (c >= n) c = n - 1;
    cell[a] = c;
    frac[a] = s - c;
  }
  double result = 0.0;
  std::vector<int> corner(d);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const bool up = (mask >> a) & 1u;
      corner[a] = cell[a] + (up ? 1 : 0);
      w *= up ? frac[a] : 1.0 - frac[a];
    }
    if (w != 0.0) result += w * u[g.index(corner)];
  }
  return result;
}

ConvexityReport check_discrete_convexity(const GridFunction& u, double slack) {
  const Grid& g = u.grid();
  const int d = g.dim();
  const int n = g.subdivisions();
  ConvexityReport report;
  for (std::int64_t k = 0; k < g.node_count(); ++k) {
    const std::vector<int> x = g.multi_index(k);
    // y ranges over offsets with both x +- y in the mesh; only the half with
    // a positive leading nonzero component is needed.
    std::vector<int> lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
      const int reach = std::min(x[a], n - x[a]);
      lo[a] = -reach;
      hi[a] = reach;
    }
    std::vector<int> y(lo);
    std::vector<int> plus(d), minus(d);
    while (true) {
      int lead = 0;
      for (int a = d - 1; a >= 0; --a)
        if (y[a] != 0) {
          lead = y[a];
          break;
        }
      if (lead > 0) {
        for (int a = 0; a < d; ++a) {
          plus[a] = x[a] + y[a];
          minus[a] = x[a] - y[a];
        }
        const double gap = u[g.index(plus)] + u[g.index(minus)] - 2.0 * u[k];
        if (gap < -slack) {
          report.convex = false;
          report.first_violation = ConvexityViolation{k, y, gap};
          return report;
        }
      }
      int a = 0;
      for (; a < d; ++a) {
        if (y[a] < hi[a]) {
          ++y[a];
          break;
        }
        y[a] = lo[a];
      }
      if (a == d) break;
    }
  }
  return report;
}

PsdReport psd_hessian_everywhere(const GridFunction& u, double tol) {
  if (!(tol >= 0.0)) fail(ErrorCode::invalid_argument, "PSD tolerance must be non-negative");
  const Grid& g = u.grid();
  PsdReport report;
  bool first = true;
  for (std::int64_t k = 0; k < g.node_count(); ++k) {
    if (g.classify(k).hessian_axes.empty()) continue;
    const double lambda = min_eigenvalue(discrete_hessian(u, k).matrix);
    if (first || lambda < report.min_eigenvalue) {
      report.min_eigenvalue = lambda;
      report.worst_node = k;
      first = false;
    }
  }
  report.psd = report.min_eigenvalue >= -tol;
  return report;
}

bool convex_1d(std::span<const double> x, std::span<const double> values, double slack) {
  if (x.size() != values.size()) fail(ErrorCode::shape_mismatch, "abscissae and values differ in length");
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double left = (values[i] - values[i - 1]) / (x[i] - x[i - 1]);
    const double right = (values[i + 1] - values[i]) / (x[i + 1] - x[i]);
    if (left > right + slack) return false;
  }
  return true;
}

bool axis_lines_convex(const GridFunction& u, double slack) {
  const Grid& g = u.grid();
  const int n = g.subdivisions();
  std::vector<double> xs(n + 1), line(n + 1);
  for (int c = 0; c <= n; ++c) xs[c] = static_cast<double>(c) / n;
  for (int axis = 0; axis < g.dim(); ++axis)
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
      if (g.coordinate_index(k, axis) != 0) continue;
      for (int c = 0; c <= n; ++c) line[c] = u[k + c * g.stride(axis)];
      if (!convex_1d(xs, line, slack)) return false;
    }
  return true;
}

}  // namespace convexsdp
