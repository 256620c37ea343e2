#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdops.hpp"
#include "grid.hpp"
#include "sdp_problem.hpp"
#include "sdp_solver.hpp"

namespace convexsdp {

enum class ModelKind { monopolist, projection, projection_h1, fit };
enum class Norm { l1, l2, linf };

const char* to_string(Norm norm);
std::optional<Norm> parse_norm(std::string_view name);

struct ModelOptions {
  // Adds |D2_ij u| <= K wherever the second difference is defined.
  std::optional<double> second_diff_bound;
};

struct ModelSpec {
  ModelKind kind = ModelKind::projection;
  Grid grid;
  // Nodal samples of f (projections and fits).
  std::optional<GridFunction> target;
  // Nodal samples of the partial derivatives of f (H1 only).
  std::vector<GridFunction> target_gradient;
  // Nodal density (monopolist only).
  std::optional<GridFunction> density;
  Norm norm = Norm::l2;
  bool zero_boundary = false;
  ModelOptions options;
};

// "monopolist", "project-l1", ..., "project-h1", "project-h01", "fit".
std::string kind_name(const ModelSpec& spec);

struct CompiledModel {
  ModelSpec spec;
  SdpProblem problem;
  // Per node: SDP variable (0-based) or -1 when the value is fixed.
  std::vector<int> node_var;
  std::vector<double> fixed_value;
  std::vector<int> aux_vars;
  // Model functional J_h = objective_sign * c.x at the decoded point.
  double objective_sign = 1.0;
};

struct DecodedSolution {
  GridFunction u;
  std::vector<double> aux;
  double objective = 0.0;
  SdpSolution solver;
  Residuals residuals;
};

// Monopolist on [0,1]^d: maximizes the lumped revenue
//   J_h(u) = sum_k |Q_k| f_k (grad_h u(P_k) . P_k - u_k)
// over u with PSD (reduced) discrete Hessians, 0 <= D_i u <= 1 on every
// forward difference and u(0) = 0. grad_h is the central difference,
// one-sided on the faces. The SDP minimizes -J_h.
CompiledModel build_monopolist(const Grid& grid, const GridFunction& density, const ModelOptions& options = {});

CompiledModel build_projection(const GridFunction& f, Norm norm, const ModelOptions& options = {});

// J_h(v) = h^d sum_{interior x} (|v - f|^2 + sum_i |D_i v - d_i f|^2) with
// one 2x2 epigraph block per squared term. `zero_boundary` pins the
// boundary nodes to 0.
CompiledModel build_projection_h1(const GridFunction& f, std::span<const GridFunction> gradient, bool zero_boundary,
                                  const ModelOptions& options = {});

// Fitting noisy nodal data is the projection of the samples.
CompiledModel build_fit(const GridFunction& samples, Norm norm, const ModelOptions& options = {});

DecodedSolution decode(const CompiledModel& model, SdpSolution solution);
DecodedSolution solve_model(const CompiledModel& model, const SolverOptions& options = {});

// J_h(u) straight from the model's quadrature, without any SDP.
double evaluate_functional(const ModelSpec& spec, const GridFunction& u);

}  // namespace convexsdp
