#include "convexsdp.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "analytic.hpp"
#include "error.hpp"
#include "gridio.hpp"
#include "models.hpp"

using namespace convexsdp;

struct cvxsdp_grid {
  Grid grid;
};

struct cvxsdp_gridfn {
  GridFunction fn;
};

struct cvxsdp_model {
  CompiledModel model;
};

struct cvxsdp_solution {
  DecodedSolution decoded;
};

namespace {

thread_local std::string last_error;

cvxsdp_status record(cvxsdp_status status, const char* what) {
  last_error = what;
  return status;
}

struct NullArgument {};
struct BufferTooSmall {};

template <class... P>
void require(const P*... ptrs) {
  if (((ptrs == nullptr) || ...)) throw NullArgument{};
}

template <class F>
cvxsdp_status call(F&& body) {
  try {
    body();
    return CVXSDP_OK;
  } catch (const Error& e) {
    return record(static_cast<cvxsdp_status>(static_cast<int>(e.code())), e.what());
  } catch (const NullArgument&) {
    return record(CVXSDP_ERR_NULL_POINTER, "null pointer argument");
  } catch (const BufferTooSmall&) {
    return record(CVXSDP_ERR_BUFFER_TOO_SMALL, "buffer too small");
  } catch (const std::bad_alloc&) {
    return record(CVXSDP_ERR_NO_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return record(CVXSDP_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(CVXSDP_ERR_INTERNAL, "unknown exception");
  }
}

SolverOptions solver_options(const cvxsdp_solver_options* o) {
  SolverOptions out;
  if (o == nullptr) return out;
  out.gap_tol = o->gap_tol;
  out.feas_tol = o->feas_tol;
  out.max_iter = o->max_iter;
  out.threads = o->threads;
  if (!(out.gap_tol > 0.0) || !(out.feas_tol > 0.0) || out.max_iter < 1 || out.threads < 0)
    fail(ErrorCode::invalid_argument, "solver options out of range");
  return out;
}

ModelOptions model_options(const cvxsdp_model_options* o) {
  ModelOptions out;
  if (o != nullptr && o->has_second_diff_bound) {
    if (!(o->second_diff_bound >= 0.0) || !std::isfinite(o->second_diff_bound))
      fail(ErrorCode::invalid_argument, "second difference bound must be finite and nonnegative");
    out.second_diff_bound = o->second_diff_bound;
  }
  return out;
}

Norm to_norm(cvxsdp_norm norm) {
  switch (norm) {
    case CVXSDP_NORM_L1:
      return Norm::l1;
    case CVXSDP_NORM_L2:
      return Norm::l2;
    case CVXSDP_NORM_LINF:
      return Norm::linf;
  }
  fail(ErrorCode::invalid_argument, "unknown norm");
}

cvxsdp_solve_status to_c(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return CVXSDP_SOLVE_OPTIMAL;
    case SolveStatus::max_iter:
      return CVXSDP_SOLVE_MAX_ITER;
    case SolveStatus::infeasible_detected:
      return CVXSDP_SOLVE_INFEASIBLE;
    case SolveStatus::numerical_failure:
      break;
  }
  return CVXSDP_SOLVE_NUMERICAL_FAILURE;
}

template <class T, class... Args>
void emit(T** out, Args&&... args) {
  *out = new T{std::forward<Args>(args)...};
}

}  // namespace

extern "C" {

const char* cvxsdp_version(void) { return "0.1.0"; }

const char* cvxsdp_last_error(void) { return last_error.c_str(); }

const char* cvxsdp_solve_status_name(cvxsdp_solve_status status) {
  switch (status) {
    case CVXSDP_SOLVE_OPTIMAL:
      return to_string(SolveStatus::optimal);
    case CVXSDP_SOLVE_MAX_ITER:
      return to_string(SolveStatus::max_iter);
    case CVXSDP_SOLVE_INFEASIBLE:
      return to_string(SolveStatus::infeasible_detected);
    case CVXSDP_SOLVE_NUMERICAL_FAILURE:
      return to_string(SolveStatus::numerical_failure);
  }
  return "unknown";
}

void cvxsdp_solver_options_default(cvxsdp_solver_options* options) {
  if (options == nullptr) return;
  const SolverOptions d;
  *options = {d.gap_tol, d.feas_tol, d.max_iter, d.threads};
}

void cvxsdp_model_options_default(cvxsdp_model_options* options) {
  if (options == nullptr) return;
  *options = {0, 0.0};
}

cvxsdp_status cvxsdp_grid_create(int dim, int subdivisions, cvxsdp_grid** out) {
  return call([&] {
    require(out);
    emit(out, Grid(dim, subdivisions));
  });
}

void cvxsdp_grid_destroy(cvxsdp_grid* grid) { delete grid; }

cvxsdp_status cvxsdp_grid_info(const cvxsdp_grid* grid, int* dim, int* subdivisions, int64_t* node_count) {
  return call([&] {
    require(grid);
    if (dim) *dim = grid->grid.dim();
    if (subdivisions) *subdivisions = grid->grid.subdivisions();
    if (node_count) *node_count = grid->grid.node_count();
  });
}

cvxsdp_status cvxsdp_grid_point(const cvxsdp_grid* grid, int64_t node, double* coords) {
  return call([&] {
    require(grid, coords);
    const auto p = grid->grid.point(node);
    std::copy(p.begin(), p.end(), coords);
  });
}

cvxsdp_status cvxsdp_grid_is_interior(const cvxsdp_grid* grid, int64_t node, int* interior) {
  return call([&] {
    require(grid, interior);
    *interior = grid->grid.is_interior(node) ? 1 : 0;
  });
}

cvxsdp_status cvxsdp_gridfn_create(const cvxsdp_grid* grid, const double* values, int64_t count,
                                   cvxsdp_gridfn** out) {
  return call([&] {
    require(grid, out);
    if (values == nullptr) {
      emit(out, GridFunction(grid->grid));
      return;
    }
    if (count < 0) fail(ErrorCode::invalid_argument, "negative value count");
    emit(out, GridFunction(grid->grid, std::vector<double>(values, values + count)));
  });
}

void cvxsdp_gridfn_destroy(cvxsdp_gridfn* fn) { delete fn; }

cvxsdp_status cvxsdp_gridfn_grid(const cvxsdp_gridfn* fn, cvxsdp_grid** out) {
  return call([&] {
    require(fn, out);
    emit(out, fn->fn.grid());
  });
}

cvxsdp_status cvxsdp_gridfn_values(const cvxsdp_gridfn* fn, double* buffer, int64_t capacity, int64_t* count) {
  return call([&] {
    require(fn);
    const auto v = fn->fn.values();
    const auto size = static_cast<int64_t>(v.size());
    if (count) *count = size;
    if (buffer == nullptr) return;
    if (capacity < size) {
      std::copy_n(v.begin(), std::max<int64_t>(capacity, 0), buffer);
      throw BufferTooSmall{};
    }
    std::copy(v.begin(), v.end(), buffer);
  });
}

cvxsdp_status cvxsdp_gridfn_sample(const cvxsdp_grid* grid, const char* function_name, cvxsdp_gridfn** out) {
  return call([&] {
    require(grid, function_name, out);
    emit(out, sample(grid->grid, test_function(function_name)));
  });
}

cvxsdp_status cvxsdp_gridfn_sample_partial(const cvxsdp_grid* grid, const char* function_name, int axis,
                                           cvxsdp_gridfn** out) {
  return call([&] {
    require(grid, function_name, out);
    if (axis < 0 || axis >= grid->grid.dim()) fail(ErrorCode::out_of_range, "axis out of range");
    auto parts = sample_gradient(grid->grid, test_function(function_name));
    emit(out, std::move(parts[axis]));
  });
}

cvxsdp_status cvxsdp_gridfn_monopolist_exact(const cvxsdp_grid* grid, cvxsdp_gridfn** out) {
  return call([&] {
    require(grid, out);
    const auto exact = monopolist_exact(grid->grid.dim());
    emit(out, GridFunction::sample(grid->grid, [&](const std::vector<double>& x) { return exact.u(x); }));
  });
}

cvxsdp_status cvxsdp_gridfn_noise(const cvxsdp_grid* grid, double eps, uint64_t seed, cvxsdp_gridfn** out) {
  return call([&] {
    require(grid, out);
    emit(out, make_noise(grid->grid, eps, seed));
  });
}

cvxsdp_status cvxsdp_gridfn_axpy(const cvxsdp_gridfn* a, double alpha, const cvxsdp_gridfn* b,
                                 cvxsdp_gridfn** out) {
  return call([&] {
    require(a, b, out);
    if (!(a->fn.grid() == b->fn.grid())) fail(ErrorCode::shape_mismatch, "grid functions live on different grids");
    const auto x = a->fn.values();
    const auto y = b->fn.values();
    std::vector<double> v(x.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = x[k] + alpha * y[k];
    emit(out, GridFunction(a->fn.grid(), std::move(v)));
  });
}

cvxsdp_status cvxsdp_gridfn_interpolate(const cvxsdp_gridfn* fn, const double* point, double* value) {
  return call([&] {
    require(fn, point, value);
    *value = interpolate(fn->fn, std::span<const double>(point, fn->fn.grid().dim()));
  });
}

cvxsdp_status cvxsdp_gridfn_discretely_convex(const cvxsdp_gridfn* fn, double slack, int* convex) {
  return call([&] {
    require(fn, convex);
    *convex = check_discrete_convexity(fn->fn, slack).convex ? 1 : 0;
  });
}

cvxsdp_status cvxsdp_gridfn_min_hessian_eigenvalue(const cvxsdp_gridfn* fn, double* value) {
  return call([&] {
    require(fn, value);
    *value = psd_hessian_everywhere(fn->fn).min_eigenvalue;
  });
}

cvxsdp_status cvxsdp_gridfn_read_csv(const char* path, cvxsdp_gridfn** out) {
  return call([&] {
    require(path, out);
    emit(out, read_grid(std::string(path)));
  });
}

cvxsdp_status cvxsdp_gridfn_write_csv(const cvxsdp_gridfn* fn, const char* path) {
  return call([&] {
    require(fn, path);
    write_grid(fn->fn, std::string(path));
  });
}

cvxsdp_status cvxsdp_gridfn_write_contours(const cvxsdp_gridfn* fn, const double* levels, int level_count,
                                           const char* path) {
  return call([&] {
    require(fn, path);
    std::vector<double> lv = default_contour_levels();
    if (levels != nullptr) {
      if (level_count < 0) fail(ErrorCode::invalid_argument, "negative level count");
      lv.assign(levels, levels + level_count);
    }
    write_contours(fn->fn, lv, path);
  });
}

cvxsdp_status cvxsdp_model_monopolist(const cvxsdp_grid* grid, const cvxsdp_gridfn* density,
                                      const cvxsdp_model_options* options, cvxsdp_model** out) {
  return call([&] {
    require(grid, out);
    const GridFunction f = density ? density->fn
                                   : GridFunction(grid->grid, std::vector<double>(grid->grid.node_count(), 1.0));
    emit(out, build_monopolist(grid->grid, f, model_options(options)));
  });
}

cvxsdp_status cvxsdp_model_projection(const cvxsdp_gridfn* target, cvxsdp_norm norm,
                                      const cvxsdp_model_options* options, cvxsdp_model** out) {
  return call([&] {
    require(target, out);
    emit(out, build_projection(target->fn, to_norm(norm), model_options(options)));
  });
}

cvxsdp_status cvxsdp_model_projection_h1(const cvxsdp_gridfn* target, const cvxsdp_gridfn* const* gradient,
                                         int gradient_count, int zero_boundary, const cvxsdp_model_options* options,
                                         cvxsdp_model** out) {
  return call([&] {
    require(target, gradient, out);
    if (gradient_count < 0) fail(ErrorCode::invalid_argument, "negative gradient count");
    std::vector<GridFunction> parts;
    for (int i = 0; i < gradient_count; ++i) {
      require(gradient[i]);
      parts.push_back(gradient[i]->fn);
    }
    emit(out, build_projection_h1(target->fn, parts, zero_boundary != 0, model_options(options)));
  });
}

cvxsdp_status cvxsdp_model_fit(const cvxsdp_gridfn* samples, cvxsdp_norm norm, const cvxsdp_model_options* options,
                               cvxsdp_model** out) {
  return call([&] {
    require(samples, out);
    emit(out, build_fit(samples->fn, to_norm(norm), model_options(options)));
  });
}

void cvxsdp_model_destroy(cvxsdp_model* model) { delete model; }

cvxsdp_status cvxsdp_model_info(const cvxsdp_model* model, int* num_vars, int* num_blocks, int64_t* num_entries) {
  return call([&] {
    require(model);
    const auto& p = model->model.problem;
    if (num_vars) *num_vars = p.num_vars();
    if (num_blocks) *num_blocks = static_cast<int>(p.blocks().size());
    if (num_entries) *num_entries = static_cast<int64_t>(p.entries().size());
  });
}

cvxsdp_status cvxsdp_model_export_sdpa(const cvxsdp_model* model, const char* path) {
  return call([&] {
    require(model, path);
    const std::string text = export_sdpa(model->model.problem);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, std::string("cannot open '") + path + "' for writing");
    out << text;
    if (!out) fail(ErrorCode::io, std::string("failed writing '") + path + "'");
  });
}

cvxsdp_status cvxsdp_model_evaluate(const cvxsdp_model* model, const cvxsdp_gridfn* u, double* value) {
  return call([&] {
    require(model, u, value);
    *value = evaluate_functional(model->model.spec, u->fn);
  });
}

cvxsdp_status cvxsdp_model_solve(const cvxsdp_model* model, const cvxsdp_solver_options* options,
                                 cvxsdp_solution** out) {
  return call([&] {
    require(model, out);
    emit(out, solve_model(model->model, solver_options(options)));
  });
}

void cvxsdp_solution_destroy(cvxsdp_solution* solution) { delete solution; }

cvxsdp_status cvxsdp_solution_summary_get(const cvxsdp_solution* solution, cvxsdp_solution_summary* summary) {
  return call([&] {
    require(solution, summary);
    const auto& d = solution->decoded;
    summary->status = to_c(d.solver.status);
    summary->iterations = d.solver.iterations;
    summary->objective = d.objective;
    summary->primal_objective = d.solver.primal_objective;
    summary->dual_objective = d.solver.dual_objective;
    summary->relative_gap = d.solver.relative_gap;
    summary->primal_infeas = d.residuals.primal_infeas;
    summary->dual_infeas = d.residuals.dual_infeas;
    summary->gap = d.residuals.gap;
  });
}

cvxsdp_status cvxsdp_solution_u(const cvxsdp_solution* solution, cvxsdp_gridfn** out) {
  return call([&] {
    require(solution, out);
    emit(out, solution->decoded.u);
  });
}

const char* cvxsdp_solution_message(const cvxsdp_solution* solution) {
  return solution ? solution->decoded.solver.message.c_str() : "";
}

cvxsdp_status cvxsdp_table(int dim, const int* ns, int count, const cvxsdp_solver_options* options,
                           cvxsdp_table_row* rows) {
  return call([&] {
    require(ns, rows);
    if (count < 0) fail(ErrorCode::invalid_argument, "negative row count");
    const auto table = convergence_table(dim, std::span<const int>(ns, count), solver_options(options));
    for (int i = 0; i < count; ++i) {
      const auto& r = table[i];
      rows[i] = {r.n, r.h, r.jh_uh, r.jh_ihu, r.linf_error, r.ratio, r.seconds, to_c(r.status), r.failed ? 1 : 0};
    }
  });
}

cvxsdp_status cvxsdp_monopolist_exact_revenue(int dim, double* revenue) {
  return call([&] {
    require(revenue);
    *revenue = monopolist_exact(dim).revenue;
  });
}

}  // extern "C"
