#ifndef CONVEXSDP_H
#define CONVEXSDP_H

#include <stddef.h>
#include <stdint.h>

#if defined(CONVEXSDP_BUILDING_LIBRARY)
#define CONVEXSDP_API __attribute__((visibility("default")))
#else
#define CONVEXSDP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status; on failure cvxsdp_last_error() describes it.
   The message is per thread and stays valid until the next failing call. */
typedef enum cvxsdp_status {
  CVXSDP_OK = 0,
  CVXSDP_ERR_INVALID_ARGUMENT = 1,
  CVXSDP_ERR_OUT_OF_RANGE = 2,
  CVXSDP_ERR_UNDEFINED_STENCIL = 3,
  CVXSDP_ERR_HESSIAN_UNDEFINED = 4,
  CVXSDP_ERR_SHAPE_MISMATCH = 5,
  CVXSDP_ERR_IO = 6,
  CVXSDP_ERR_PARSE = 7,
  CVXSDP_ERR_SOLVER = 8,
  CVXSDP_ERR_NULL_POINTER = 20,
  CVXSDP_ERR_BUFFER_TOO_SMALL = 21,
  CVXSDP_ERR_NO_MEMORY = 22,
  CVXSDP_ERR_INTERNAL = 99
} cvxsdp_status;

typedef enum cvxsdp_solve_status {
  CVXSDP_SOLVE_OPTIMAL = 0,
  CVXSDP_SOLVE_MAX_ITER = 1,
  CVXSDP_SOLVE_INFEASIBLE = 2,
  CVXSDP_SOLVE_NUMERICAL_FAILURE = 3
} cvxsdp_solve_status;

typedef enum cvxsdp_norm { CVXSDP_NORM_L1 = 0, CVXSDP_NORM_L2 = 1, CVXSDP_NORM_LINF = 2 } cvxsdp_norm;

typedef struct cvxsdp_grid cvxsdp_grid;
typedef struct cvxsdp_gridfn cvxsdp_gridfn;
typedef struct cvxsdp_model cvxsdp_model;
typedef struct cvxsdp_solution cvxsdp_solution;

typedef struct cvxsdp_solver_options {
  double gap_tol;
  double feas_tol;
  int max_iter;
  int threads; /* 0: library default */
} cvxsdp_solver_options;

typedef struct cvxsdp_model_options {
  int has_second_diff_bound;
  double second_diff_bound;
} cvxsdp_model_options;

typedef struct cvxsdp_solution_summary {
  cvxsdp_solve_status status;
  int iterations;
  double objective; /* model functional, e.g. the revenue J_h */
  double primal_objective;
  double dual_objective;
  double relative_gap;
  /* recomputed from the problem data */
  double primal_infeas;
  double dual_infeas;
  double gap;
} cvxsdp_solution_summary;

typedef struct cvxsdp_table_row {
  int n;
  double h;
  double jh_uh;
  double jh_ihu;
  double linf_error;
  double ratio;
  double seconds;
  cvxsdp_solve_status status;
  int failed;
} cvxsdp_table_row;

CONVEXSDP_API const char* cvxsdp_version(void);
CONVEXSDP_API const char* cvxsdp_last_error(void);
CONVEXSDP_API const char* cvxsdp_solve_status_name(cvxsdp_solve_status status);

CONVEXSDP_API void cvxsdp_solver_options_default(cvxsdp_solver_options* options);
CONVEXSDP_API void cvxsdp_model_options_default(cvxsdp_model_options* options);

/* Grid */
CONVEXSDP_API cvxsdp_status cvxsdp_grid_create(int dim, int subdivisions, cvxsdp_grid** out);
CONVEXSDP_API void cvxsdp_grid_destroy(cvxsdp_grid* grid);
CONVEXSDP_API cvxsdp_status cvxsdp_grid_info(const cvxsdp_grid* grid, int* dim, int* subdivisions,
                                             int64_t* node_count);
CONVEXSDP_API cvxsdp_status cvxsdp_grid_point(const cvxsdp_grid* grid, int64_t node, double* coords);
CONVEXSDP_API cvxsdp_status cvxsdp_grid_is_interior(const cvxsdp_grid* grid, int64_t node, int* interior);

/* Grid functions. `values` may be NULL for the zero function. */
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_create(const cvxsdp_grid* grid, const double* values, int64_t count,
                                                 cvxsdp_gridfn** out);
CONVEXSDP_API void cvxsdp_gridfn_destroy(cvxsdp_gridfn* fn);
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_grid(const cvxsdp_gridfn* fn, cvxsdp_grid** out);
/* Copies up to `capacity` values; `count` receives the node count. */
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_values(const cvxsdp_gridfn* fn, double* buffer, int64_t capacity,
                                                 int64_t* count);
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_sample(const cvxsdp_grid* grid, const char* function_name,
                                                 cvxsdp_gridfn** out);
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_sample_partial(const cvxsdp_grid* grid, const char* function_name,
                                                         int axis, cvxsdp_gridfn** out);
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_monopolist_exact(const cvxsdp_grid* grid, cvxsdp_gridfn** out);
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_noise(const cvxsdp_grid* grid, double eps, uint64_t seed,
                                                cvxsdp_gridfn** out);
/* out = a + alpha * b */
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_axpy(const cvxsdp_gridfn* a, double alpha, const cvxsdp_gridfn* b,
                                               cvxsdp_gridfn** out);
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_interpolate(const cvxsdp_gridfn* fn, const double* point, double* value);
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_discretely_convex(const cvxsdp_gridfn* fn, double slack, int* convex);
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_min_hessian_eigenvalue(const cvxsdp_gridfn* fn, double* value);

CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_read_csv(const char* path, cvxsdp_gridfn** out);
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_write_csv(const cvxsdp_gridfn* fn, const char* path);
/* levels == NULL selects the default list 1e-7, 0.1, ..., 1.1. */
CONVEXSDP_API cvxsdp_status cvxsdp_gridfn_write_contours(const cvxsdp_gridfn* fn, const double* levels,
                                                         int level_count, const char* path);

/* Model compilation. `options` may be NULL; `density` may be NULL for f = 1. */
CONVEXSDP_API cvxsdp_status cvxsdp_model_monopolist(const cvxsdp_grid* grid, const cvxsdp_gridfn* density,
                                                    const cvxsdp_model_options* options, cvxsdp_model** out);
CONVEXSDP_API cvxsdp_status cvxsdp_model_projection(const cvxsdp_gridfn* target, cvxsdp_norm norm,
                                                    const cvxsdp_model_options* options, cvxsdp_model** out);
CONVEXSDP_API cvxsdp_status cvxsdp_model_projection_h1(const cvxsdp_gridfn* target,
                                                       const cvxsdp_gridfn* const* gradient, int gradient_count,
                                                       int zero_boundary, const cvxsdp_model_options* options,
                                                       cvxsdp_model** out);
CONVEXSDP_API cvxsdp_status cvxsdp_model_fit(const cvxsdp_gridfn* samples, cvxsdp_norm norm,
                                             const cvxsdp_model_options* options, cvxsdp_model** out);
CONVEXSDP_API void cvxsdp_model_destroy(cvxsdp_model* model);
CONVEXSDP_API cvxsdp_status cvxsdp_model_info(const cvxsdp_model* model, int* num_vars, int* num_blocks,
                                              int64_t* num_entries);
CONVEXSDP_API cvxsdp_status cvxsdp_model_export_sdpa(const cvxsdp_model* model, const char* path);
/* Functional of the model evaluated at an arbitrary grid function. */
CONVEXSDP_API cvxsdp_status cvxsdp_model_evaluate(const cvxsdp_model* model, const cvxsdp_gridfn* u, double* value);

/* A non-optimal solve still returns CVXSDP_OK; inspect the summary. */
CONVEXSDP_API cvxsdp_status cvxsdp_model_solve(const cvxsdp_model* model, const cvxsdp_solver_options* options,
                                               cvxsdp_solution** out);
CONVEXSDP_API void cvxsdp_solution_destroy(cvxsdp_solution* solution);
CONVEXSDP_API cvxsdp_status cvxsdp_solution_summary_get(const cvxsdp_solution* solution,
                                                        cvxsdp_solution_summary* summary);
CONVEXSDP_API cvxsdp_status cvxsdp_solution_u(const cvxsdp_solution* solution, cvxsdp_gridfn** out);
CONVEXSDP_API const char* cvxsdp_solution_message(const cvxsdp_solution* solution);

/* Uniform-density monopolist convergence rows; `rows` holds `count` entries. */
CONVEXSDP_API cvxsdp_status cvxsdp_table(int dim, const int* ns, int count, const cvxsdp_solver_options* options,
                                         cvxsdp_table_row* rows);
CONVEXSDP_API cvxsdp_status cvxsdp_monopolist_exact_revenue(int dim, double* revenue);

#ifdef __cplusplus
}
#endif

#endif
