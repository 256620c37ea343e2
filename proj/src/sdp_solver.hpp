#pragma once

#include <string>
#include <vector>

#include "sdp_problem.hpp"

namespace convexsdp {

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  // Worker threads for the dense kernels; 0 leaves the library default.
  int threads = 0;
};

enum class SolveStatus { optimal, max_iter, infeasible_detected, numerical_failure };

const char* to_string(SolveStatus status);

struct IterateRecord {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeas = 0.0;  // relative LMI residual
  double dual_infeas = 0.0;    // relative equality residual
  double complementarity = 0.0;  // <S, Z>
  double step_primal = 0.0;    // step taken from this iterate
  double step_dual = 0.0;
};

struct SdpSolution {
  std::vector<double> x;
  BlockMatrix z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::numerical_failure;
  std::string message;
  std::vector<IterateRecord> history;
};

// Infeasible primal-dual path following with Mehrotra predictor-corrector
// steps along the HKM direction. The Schur complement is assembled dense.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

struct Residuals {
  double primal_infeas = 0.0;  // max(0, -lambda_min(S(x)))
  double dual_infeas = 0.0;    // max(||c - A*(Z)||_inf, -lambda_min(Z))
  double gap = 0.0;            // c.x - <A_0, Z>
};

// Recomputed from the problem data alone; nothing is taken from the solver.
Residuals residuals(const SdpProblem& problem, const SdpSolution& solution);

}  // namespace convexsdp
