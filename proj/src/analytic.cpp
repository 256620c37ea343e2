#include "analytic.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <string>
#include <cmath>
#include <numbers>
#include <random>

#include "error.hpp"
#include "models.hpp"

namespace convexsdp {

PiecewiseAffineMax::PiecewiseAffineMax(std::vector<AffinePiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) fail(ErrorCode::invalid_argument, "piecewise max needs at least one piece");
  dim_ = static_cast<int>(pieces_.front().gradient.size());
  for (const auto& p : pieces_)
    if (static_cast<int>(p.gradient.size()) != dim_) fail(ErrorCode::shape_mismatch, "pieces differ in dimension");
}

double PiecewiseAffineMax::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) fail(ErrorCode::shape_mismatch, "point has wrong dimension");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) {
    double v = p.offset;
    for (int i = 0; i < dim_; ++i) v += p.gradient[i] * x[i];
    best = std::max(best, v);
  }
  return best;
}

MonopolistSolution monopolist_exact(int dim) {
  if (dim == 2) {
    const double a = 2.0 / 3.0;
    const double b = (4.0 - std::numbers::sqrt2) / 3.0;
    PiecewiseAffineMax u({{{0, 0}, 0.0}, {{1, 0}, -a}, {{0, 1}, -a}, {{1, 1}, -b}});
    return {std::move(u), 2.0 / 27.0 * (6.0 + std::numbers::sqrt2)};
  }
  if (dim == 3) {
    const double a = 0.840627, b = 1.038352, c = 1.236077;
    PiecewiseAffineMax u({{{0, 0, 0}, 0.0},
                          {{1, 0, 0}, -a},
                          {{0, 1, 0}, -a},
                          {{0, 0, 1}, -a},
                          {{1, 1, 0}, -b},
                          {{1, 0, 1}, -b},
                          {{0, 1, 1}, -b},
                          {{1, 1, 1}, -c}});
    return {std::move(u), 0.868405};
  }
  fail(ErrorCode::invalid_argument, "exact monopolist solution known for d = 2, 3 only");
}

std::vector<ConvergenceRow> convergence_table(int dim, std::span<const int> ns, const SolverOptions& options) {
  const MonopolistSolution exact = monopolist_exact(dim);
  std::vector<ConvergenceRow> rows;
  for (int n : ns) {
    ConvergenceRow row;
    row.n = n;
    row.h = 1.0 / n;
    try {
      const Grid g(dim, n);
      const GridFunction density(g, std::vector<double>(g.node_count(), 1.0));
      const GridFunction interpolant = GridFunction::sample(g, [&](const std::vector<double>& x) { return exact.u(x); });

      const auto start = std::chrono::steady_clock::now();
      const CompiledModel model = build_monopolist(g, density);
      const DecodedSolution sol = solve_model(model, options);
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      row.status = sol.solver.status;
      row.message = sol.solver.message;
      row.jh_uh = evaluate_functional(model.spec, sol.u);
      row.jh_ihu = evaluate_functional(model.spec, interpolant);
      for (std::int64_t k = 0; k < g.node_count(); ++k)
        row.linf_error = std::max(row.linf_error, std::abs(sol.u[k] - interpolant[k]));
      row.ratio = (exact.revenue - row.jh_uh) / row.h;
      row.failed = row.status != SolveStatus::optimal;
    } catch (const Error& e) {
      row.failed = true;
      row.message = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double cube(double v) { return v * v * v; }

}  // namespace

TestFunction test_function(const std::string& name) {
  using std::numbers::pi;
  TestFunction f;
  f.name = name;
  if (name == "carlier-f") {
    f.dim = 2;
    f.value = [](std::span<const double> x) {
      const double r2 = (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5);
      return -(4.0 + 5.0 * x[0] * x[1] * x[1]) * std::exp(-30.0 * r2);
    };
    f.gradient = [](std::span<const double> x) {
      const double r2 = (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5);
      const double e = std::exp(-30.0 * r2);
      const double p = 4.0 + 5.0 * x[0] * x[1] * x[1];
      return std::vector<double>{-(5.0 * x[1] * x[1]) * e + p * 60.0 * (x[0] - 0.5) * e,
                                 -(10.0 * x[0] * x[1]) * e + p * 60.0 * (x[1] - 0.5) * e};
    };
  } else if (name == "sin3-g") {
    f.dim = 2;
    f.value = [](std::span<const double> x) { return -cube(std::sin(2 * pi * x[0])) * cube(std::sin(pi * x[1])); };
    f.gradient = [](std::span<const double> x) {
      const double s1 = std::sin(2 * pi * x[0]), c1 = std::cos(2 * pi * x[0]);
      const double s2 = std::sin(pi * x[1]), c2 = std::cos(pi * x[1]);
      return std::vector<double>{-3 * s1 * s1 * c1 * 2 * pi * cube(s2), -cube(s1) * 3 * s2 * s2 * c2 * pi};
    };
  } else if (name == "quad") {
    f.dim = 2;
    f.value = [](std::span<const double> x) {
      return (x[0] - 0.5) * (x[0] - 0.5) + 2.0 * (x[1] - 0.5) * (x[1] - 0.5);
    };
    f.gradient = [](std::span<const double> x) {
      return std::vector<double>{2.0 * (x[0] - 0.5), 4.0 * (x[1] - 0.5)};
    };
  } else if (name == "half-norm2") {
    f.dim = 0;
    f.value = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return 0.5 * s;
    };
    f.gradient = [](std::span<const double> x) { return std::vector<double>(x.begin(), x.end()); };
  } else {
    fail(ErrorCode::invalid_argument, "unknown test function '" + name + "'");
  }
  return f;
}

std::vector<std::string> test_function_names() { return {"carlier-f", "sin3-g", "quad", "half-norm2"}; }

namespace {

void check_dim(const Grid& grid, const TestFunction& f) {
  if (f.dim != 0 && f.dim != grid.dim())
    fail(ErrorCode::invalid_argument, "test function '" + f.name + "' is defined for d = " + std::to_string(f.dim));
}

}  // namespace

GridFunction sample(const Grid& grid, const TestFunction& f) {
  check_dim(grid, f);
  return GridFunction::sample(grid, [&](const std::vector<double>& x) { return f.value(x); });
}

std::vector<GridFunction> sample_gradient(const Grid& grid, const TestFunction& f) {
  check_dim(grid, f);
  std::vector<std::vector<double>> comps(grid.dim(), std::vector<double>(grid.node_count()));
  for (std::int64_t k = 0; k < grid.node_count(); ++k) {
    const auto g = f.gradient(grid.point(k));
    for (int i = 0; i < grid.dim(); ++i) comps[i][k] = g[i];
  }
  std::vector<GridFunction> out;
  for (auto& c : comps) out.emplace_back(grid, std::move(c));
  return out;
}

GridFunction make_noise(const Grid& grid, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) fail(ErrorCode::invalid_argument, "noise amplitude must be >= 0");
  std::mt19937_64 gen(seed);
  std::vector<double> values(grid.node_count());
  for (auto& v : values) {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = eps == 0.0 ? 0.0 : eps * (2.0 * unit - 1.0);
  }
  return GridFunction(grid, std::move(values));
}

}  // namespace convexsdp
