#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fdops.hpp"
#include "grid.hpp"
#include "sdp_solver.hpp"

namespace convexsdp {

struct AffinePiece {
  std::vector<double> gradient;
  double offset = 0.0;  // piece value: gradient . x + offset
};

// max over affine pieces; convex by construction.
class PiecewiseAffineMax {
 public:
  explicit PiecewiseAffineMax(std::vector<AffinePiece> pieces);

  double operator()(std::span<const double> x) const;
  int dim() const noexcept { return dim_; }
  const std::vector<AffinePiece>& pieces() const noexcept { return pieces_; }

 private:
  std::vector<AffinePiece> pieces_;
  int dim_;
};

struct MonopolistSolution {
  PiecewiseAffineMax u;
  double revenue;  // exact J(u) for the uniform density
};

// Closed-form optimum for the uniform density, d = 2 or 3. The 3D
// thresholds are known to six digits only.
MonopolistSolution monopolist_exact(int dim);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double jh_uh = 0.0;     // J_h(u_h)
  double jh_ihu = 0.0;    // J_h(I_h u)
  double linf_error = 0.0;  // max_k |u_h - I_h u|
  double seconds = 0.0;
  double ratio = 0.0;     // (J(u) - J_h(u_h)) / h
  SolveStatus status = SolveStatus::numerical_failure;
  bool failed = true;
  std::string message;
};

// Uniform-density monopolist at each n. A failed solve marks its row and
// the table carries on.
std::vector<ConvergenceRow> convergence_table(int dim, std::span<const int> ns, const SolverOptions& options = {});

struct TestFunction {
  std::string name;
  int dim = 0;  // 0 when any dimension is accepted
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
};

// Known names: "carlier-f", "sin3-g", "quad", "half-norm2".
TestFunction test_function(const std::string& name);
std::vector<std::string> test_function_names();

GridFunction sample(const Grid& grid, const TestFunction& f);
std::vector<GridFunction> sample_gradient(const Grid& grid, const TestFunction& f);

// Independent uniform(-eps, eps) values per node from mt19937_64 seeded
// with `seed`; the top 53 bits of each draw give the unit deviate.
GridFunction make_noise(const Grid& grid, double eps, std::uint64_t seed);

}  // namespace convexsdp
