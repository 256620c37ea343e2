#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convexsdp.h"

namespace convexsdp::cli {

namespace {

constexpr int kExitOptimal = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

// Carries a C API failure up to run(), which prints it and exits with 1.
struct ApiFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(cvxsdp_status status) {
  if (status != CVXSDP_OK) throw ApiFailure(cvxsdp_last_error());
}

struct GridDeleter {
  void operator()(cvxsdp_grid* p) const { cvxsdp_grid_destroy(p); }
};
struct FnDeleter {
  void operator()(cvxsdp_gridfn* p) const { cvxsdp_gridfn_destroy(p); }
};
struct ModelDeleter {
  void operator()(cvxsdp_model* p) const { cvxsdp_model_destroy(p); }
};
struct SolutionDeleter {
  void operator()(cvxsdp_solution* p) const { cvxsdp_solution_destroy(p); }
};
using GridPtr = std::unique_ptr<cvxsdp_grid, GridDeleter>;
using FnPtr = std::unique_ptr<cvxsdp_gridfn, FnDeleter>;
using ModelPtr = std::unique_ptr<cvxsdp_model, ModelDeleter>;
using SolutionPtr = std::unique_ptr<cvxsdp_solution, SolutionDeleter>;

GridPtr make_grid(int dim, int n) {
  cvxsdp_grid* g = nullptr;
  check(cvxsdp_grid_create(dim, n, &g));
  return GridPtr(g);
}

FnPtr sample(const cvxsdp_grid* g, const std::string& name) {
  cvxsdp_gridfn* f = nullptr;
  check(cvxsdp_gridfn_sample(g, name.c_str(), &f));
  return FnPtr(f);
}

FnPtr read_csv(const std::string& path) {
  cvxsdp_gridfn* f = nullptr;
  check(cvxsdp_gridfn_read_csv(path.c_str(), &f));
  return FnPtr(f);
}

std::vector<double> values_of(const cvxsdp_gridfn* f) {
  int64_t count = 0;
  check(cvxsdp_gridfn_values(f, nullptr, 0, &count));
  std::vector<double> v(static_cast<std::size_t>(count));
  check(cvxsdp_gridfn_values(f, v.data(), count, &count));
  return v;
}

struct GridShape {
  int dim = 0;
  int n = 0;
  int64_t nodes = 0;
};

GridShape shape_of(const cvxsdp_gridfn* f) {
  cvxsdp_grid* g = nullptr;
  check(cvxsdp_gridfn_grid(f, &g));
  GridPtr owned(g);
  GridShape s;
  check(cvxsdp_grid_info(g, &s.dim, &s.n, &s.nodes));
  return s;
}

struct Options {
  // shared
  int threads = -1;
  bool full_precision = false;
  double gap_tol = 0.0;
  double feas_tol = 0.0;
  int max_iter = 0;
  double second_diff_bound = -1.0;
  // model
  std::string model = "monopolist";
  int dim = 2;
  int n = 0;
  std::string density_file;
  std::string norm;
  std::string function;
  std::string input;
  double eps_mult = 10.0;
  std::uint64_t seed = 1;
  std::vector<int> ns;
  std::string output;
  std::string contours;
};

std::string fmt(double v, bool full) {
  char buf[64];
  std::snprintf(buf, sizeof buf, full ? "%.17g" : "%.4f", v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int resolve_threads(const Options& o) {
  if (o.threads >= 0) return o.threads;
  if (const char* env = std::getenv("CONVEXSDP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0 && v < 4096) return static_cast<int>(v);
    throw CLI::ValidationError("CONVEXSDP_THREADS", std::string("not a thread count: '") + env + "'");
  }
  return 0;
}

cvxsdp_solver_options solver_options(const Options& o) {
  cvxsdp_solver_options s;
  cvxsdp_solver_options_default(&s);
  if (o.gap_tol > 0.0) s.gap_tol = o.gap_tol;
  if (o.feas_tol > 0.0) s.feas_tol = o.feas_tol;
  if (o.max_iter > 0) s.max_iter = o.max_iter;
  s.threads = resolve_threads(o);
  return s;
}

cvxsdp_model_options model_options(const Options& o) {
  cvxsdp_model_options m;
  cvxsdp_model_options_default(&m);
  if (o.second_diff_bound >= 0.0) {
    m.has_second_diff_bound = 1;
    m.second_diff_bound = o.second_diff_bound;
  }
  return m;
}

cvxsdp_norm lp_norm(const std::string& name) {
  if (name == "l1") return CVXSDP_NORM_L1;
  if (name == "l2") return CVXSDP_NORM_L2;
  if (name == "linf") return CVXSDP_NORM_LINF;
  throw CLI::ValidationError("--norm", "expected l1, l2 or linf for this model");
}

// Compiled model plus the data a report needs afterwards.
struct Built {
  ModelPtr model;
  GridPtr grid;
  FnPtr clean;  // noise-free target of a fit
};

Built build_monopolist(const Options& o) {
  Built b;
  b.grid = make_grid(o.dim, o.n);
  FnPtr density;
  if (!o.density_file.empty()) {
    density = read_csv(o.density_file);
    const GridShape s = shape_of(density.get());
    if (s.dim != o.dim || s.n != o.n)
      throw ApiFailure("density file '" + o.density_file + "' does not match --dim/--n");
  }
  const auto mo = model_options(o);
  cvxsdp_model* m = nullptr;
  check(cvxsdp_model_monopolist(b.grid.get(), density.get(), &mo, &m));
  b.model.reset(m);
  return b;
}

Built build_project(const Options& o) {
  if (o.function.empty() == o.input.empty())
    throw CLI::ValidationError("project", "give exactly one of --function and --input");
  Built b;
  FnPtr target;
  if (!o.input.empty()) {
    target = read_csv(o.input);
    const GridShape s = shape_of(target.get());
    b.grid = make_grid(s.dim, s.n);
  } else {
    b.grid = make_grid(o.dim, o.n);
    target = sample(b.grid.get(), o.function);
  }
  const auto mo = model_options(o);
  cvxsdp_model* m = nullptr;
  if (o.norm == "h1" || o.norm == "h01") {
    if (o.function.empty()) throw CLI::ValidationError("--norm", "h1 and h01 need --function for the gradient");
    std::vector<FnPtr> parts;
    std::vector<const cvxsdp_gridfn*> raw;
    for (int i = 0; i < o.dim; ++i) {
      cvxsdp_gridfn* p = nullptr;
      check(cvxsdp_gridfn_sample_partial(b.grid.get(), o.function.c_str(), i, &p));
      parts.emplace_back(p);
      raw.push_back(p);
    }
    check(cvxsdp_model_projection_h1(target.get(), raw.data(), static_cast<int>(raw.size()), o.norm == "h01", &mo,
                                     &m));
  } else {
    check(cvxsdp_model_projection(target.get(), lp_norm(o.norm), &mo, &m));
  }
  b.model.reset(m);
  return b;
}

Built build_fit(const Options& o) {
  Built b;
  b.grid = make_grid(o.dim, o.n);
  b.clean = sample(b.grid.get(), o.function);
  cvxsdp_gridfn* noise = nullptr;
  check(cvxsdp_gridfn_noise(b.grid.get(), o.eps_mult / o.n, o.seed, &noise));
  FnPtr noise_owned(noise);
  cvxsdp_gridfn* noisy = nullptr;
  check(cvxsdp_gridfn_axpy(b.clean.get(), 1.0, noise, &noisy));
  FnPtr samples(noisy);
  const auto mo = model_options(o);
  cvxsdp_model* m = nullptr;
  check(cvxsdp_model_fit(samples.get(), lp_norm(o.norm), &mo, &m));
  b.model.reset(m);
  return b;
}

Built build(const std::string& kind, const Options& o) {
  if (kind == "monopolist") return build_monopolist(o);
  if (kind == "project") return build_project(o);
  if (kind == "fit") return build_fit(o);
  throw CLI::ValidationError("--model", "expected monopolist, project or fit");
}

SolutionPtr solve(const Built& b, const Options& o, cvxsdp_solution_summary& summary) {
  const auto so = solver_options(o);
  cvxsdp_solution* s = nullptr;
  check(cvxsdp_model_solve(b.model.get(), &so, &s));
  SolutionPtr owned(s);
  check(cvxsdp_solution_summary_get(s, &summary));
  return owned;
}

void print_summary(const cvxsdp_solution_summary& s, const cvxsdp_solution* sol) {
  std::printf("status = %s\n", cvxsdp_solve_status_name(s.status));
  std::printf("iterations = %d\n", s.iterations);
  std::printf("primal_infeas = %s\n", sci(s.primal_infeas).c_str());
  std::printf("dual_infeas = %s\n", sci(s.dual_infeas).c_str());
  std::printf("gap = %s\n", sci(s.gap).c_str());
  if (s.status != CVXSDP_SOLVE_OPTIMAL) std::fprintf(stderr, "solver: %s\n", cvxsdp_solution_message(sol));
}

void write_outputs(const cvxsdp_solution* sol, const std::string& output, const std::string& contours) {
  cvxsdp_gridfn* u = nullptr;
  check(cvxsdp_solution_u(sol, &u));
  FnPtr owned(u);
  if (!output.empty()) check(cvxsdp_gridfn_write_csv(u, output.c_str()));
  if (!contours.empty()) check(cvxsdp_gridfn_write_contours(u, nullptr, 0, contours.c_str()));
}

int exit_for(const cvxsdp_solution_summary& s) {
  return s.status == CVXSDP_SOLVE_OPTIMAL ? kExitOptimal : kExitNotConverged;
}

int cmd_monopolist(const Options& o) {
  const Built b = build_monopolist(o);
  cvxsdp_solution_summary s{};
  const SolutionPtr sol = solve(b, o, s);
  std::printf("J_h = %s\n", fmt(s.objective, o.full_precision).c_str());
  print_summary(s, sol.get());
  const std::string out = o.output.empty() ? "monopolist_d" + std::to_string(o.dim) + "_n" + std::to_string(o.n) + ".csv"
                                           : o.output;
  write_outputs(sol.get(), out, o.contours);
  return exit_for(s);
}

int cmd_project(const Options& o) {
  const Built b = build_project(o);
  cvxsdp_solution_summary s{};
  const SolutionPtr sol = solve(b, o, s);
  std::printf("objective = %s\n", fmt(s.objective, o.full_precision).c_str());
  print_summary(s, sol.get());
  write_outputs(sol.get(), o.output, o.contours);
  return exit_for(s);
}

int cmd_fit(const Options& o) {
  const Built b = build_fit(o);
  cvxsdp_solution_summary s{};
  const SolutionPtr sol = solve(b, o, s);
  std::printf("objective = %s\n", fmt(s.objective, o.full_precision).c_str());

  // Errors against the noise-free function, split at the [0.1, 0.9]^d box.
  cvxsdp_gridfn* u = nullptr;
  check(cvxsdp_solution_u(sol.get(), &u));
  const FnPtr fitted(u);
  const auto uv = values_of(u);
  const auto fv = values_of(b.clean.get());
  double inner = 0.0;
  double outer = 0.0;
  std::vector<double> p(static_cast<std::size_t>(o.dim));
  for (std::size_t k = 0; k < uv.size(); ++k) {
    check(cvxsdp_grid_point(b.grid.get(), static_cast<int64_t>(k), p.data()));
    bool in_box = true;
    for (double c : p) in_box = in_box && c >= 0.1 - 1e-12 && c <= 0.9 + 1e-12;
    const double e = std::abs(uv[k] - fv[k]);
    (in_box ? inner : outer) = std::max(in_box ? inner : outer, e);
  }
  std::printf("interior_max_error = %s\n", fmt(inner, o.full_precision).c_str());
  std::printf("boundary_max_error = %s\n", fmt(outer, o.full_precision).c_str());
  print_summary(s, sol.get());
  write_outputs(sol.get(), o.output, o.contours);
  return exit_for(s);
}

int cmd_table(const Options& o) {
  const auto so = solver_options(o);
  std::vector<cvxsdp_table_row> rows(o.ns.size());
  check(cvxsdp_table(o.dim, o.ns.data(), static_cast<int>(o.ns.size()), &so, rows.data()));
  double exact = 0.0;
  check(cvxsdp_monopolist_exact_revenue(o.dim, &exact));

  std::string text = "n,h,J_h(u_h),J_h(I_h u),linf_error,seconds,ratio,status\n";
  bool all_ok = true;
  for (const auto& r : rows) {
    char line[512];
    std::snprintf(line, sizeof line, "%d,%s,%s,%s,%s,%.2f,%s,%s\n", r.n, fmt(r.h, o.full_precision).c_str(),
                  fmt(r.jh_uh, o.full_precision).c_str(), fmt(r.jh_ihu, o.full_precision).c_str(),
                  fmt(r.linf_error, o.full_precision).c_str(), r.seconds, fmt(r.ratio, o.full_precision).c_str(),
                  cvxsdp_solve_status_name(r.status));
    text += line;
    all_ok = all_ok && !r.failed && r.status == CVXSDP_SOLVE_OPTIMAL;
  }
  std::fputs(text.c_str(), stdout);
  std::printf("# J(u) = %s\n", fmt(exact, o.full_precision).c_str());
  if (!o.output.empty()) {
    std::FILE* f = std::fopen(o.output.c_str(), "w");
    if (f == nullptr) throw ApiFailure("cannot open '" + o.output + "' for writing");
    std::fputs(text.c_str(), f);
    std::fclose(f);
  }
  return all_ok ? kExitOptimal : kExitNotConverged;
}

int cmd_export(const Options& o) {
  if (o.output.empty()) throw CLI::ValidationError("--output", "export-sdpa needs an output path");
  const Built b = build(o.model, o);
  check(cvxsdp_model_export_sdpa(b.model.get(), o.output.c_str()));
  int vars = 0;
  int blocks = 0;
  int64_t entries = 0;
  check(cvxsdp_model_info(b.model.get(), &vars, &blocks, &entries));
  std::printf("wrote %s: %d variables, %d blocks, %lld entries\n", o.output.c_str(), vars, blocks,
              static_cast<long long>(entries));
  return kExitOptimal;
}

void add_solver_flags(CLI::App* app, Options& o) {
  app->add_option("--gap-tol", o.gap_tol, "Relative duality gap tolerance (default 1e-8)")->check(CLI::PositiveNumber);
  app->add_option("--feas-tol", o.feas_tol, "Feasibility tolerance (default 1e-8)")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", o.max_iter, "Iteration limit (default 200)")->check(CLI::PositiveNumber);
}

void add_grid_flags(CLI::App* app, Options& o, bool n_required) {
  app->add_option("--dim", o.dim, "Dimension d")->check(CLI::Range(1, 8))->capture_default_str();
  auto* n = app->add_option("--n", o.n, "Subdivisions per axis (h = 1/n)")->check(CLI::Range(2, 100000));
  if (n_required) n->required();
}

void add_model_options(CLI::App* app, Options& o) {
  app->add_option("--second-diff-bound", o.second_diff_bound, "Bound K on |second differences|")
      ->check(CLI::NonNegativeNumber);
  add_solver_flags(app, o);
}

const std::vector<std::string> kProjectNorms{"l1", "l2", "linf", "h1", "h01"};
const std::vector<std::string> kFitNorms{"l1", "l2", "linf"};

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Optimization over convex functions on [0,1]^d with semidefinite discrete Hessians"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--threads", o.threads, "Worker threads (overrides CONVEXSDP_THREADS; 0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--full-precision", o.full_precision, "Print 17 significant digits instead of 4 decimals");

  auto* mono = app.add_subcommand("monopolist", "Solve the monopolist problem");
  add_grid_flags(mono, o, true);
  mono->add_option("--density-file", o.density_file, "CSV grid with the type density (default f = 1)")
      ->check(CLI::ExistingFile);
  mono->add_option("--output", o.output, "Solution CSV (default monopolist_d<D>_n<N>.csv)");
  mono->add_option("--contours", o.contours, "Contour JSON for d = 2");
  add_model_options(mono, o);

  auto* proj = app.add_subcommand("project", "Project a function onto discretely convex functions");
  proj->add_option("--norm", o.norm, "Norm")->required()->check(CLI::IsMember(kProjectNorms));
  add_grid_flags(proj, o, false);
  proj->add_option("--function", o.function, "Test function name")->check(CLI::IsMember(std::vector<std::string>{
      "carlier-f", "sin3-g", "quad", "half-norm2"}));
  proj->add_option("--input", o.input, "CSV grid with the target values")->check(CLI::ExistingFile);
  proj->add_option("--output", o.output, "Solution CSV");
  proj->add_option("--contours", o.contours, "Contour JSON for d = 2");
  add_model_options(proj, o);

  auto* fit = app.add_subcommand("fit", "Fit a convex function to noisy nodal data");
  fit->add_option("--norm", o.norm, "Norm")->required()->check(CLI::IsMember(kFitNorms));
  add_grid_flags(fit, o, true);
  fit->add_option("--function", o.function, "Noise-free test function (default quad)");
  fit->add_option("--eps-mult", o.eps_mult, "Noise amplitude in units of h")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fit->add_option("--seed", o.seed, "Noise seed")->capture_default_str();
  fit->add_option("--output", o.output, "Solution CSV");
  fit->add_option("--contours", o.contours, "Contour JSON for d = 2");
  add_model_options(fit, o);

  auto* table = app.add_subcommand("table", "Monopolist convergence table for f = 1");
  table->add_option("--dim", o.dim, "Dimension (2 or 3)")->check(CLI::IsMember(std::vector<int>{2, 3}))->required();
  table->add_option("--ns", o.ns, "Comma separated n values")->delimiter(',')->required()->check(CLI::Range(2, 100000));
  table->add_option("--output", o.output, "Also write the CSV here");
  add_solver_flags(table, o);

  auto* exp = app.add_subcommand("export-sdpa", "Write the compiled SDP in SDPA sparse format");
  exp->add_option("--model", o.model, "Model kind")
      ->check(CLI::IsMember(std::vector<std::string>{"monopolist", "project", "fit"}))
      ->capture_default_str();
  add_grid_flags(exp, o, true);
  exp->add_option("--density-file", o.density_file, "Monopolist density CSV")->check(CLI::ExistingFile);
  exp->add_option("--norm", o.norm, "Norm for project/fit")->check(CLI::IsMember(kProjectNorms));
  exp->add_option("--function", o.function, "Test function name");
  exp->add_option("--input", o.input, "CSV grid with the target values")->check(CLI::ExistingFile);
  exp->add_option("--eps-mult", o.eps_mult, "Fit noise amplitude in units of h")->check(CLI::NonNegativeNumber);
  exp->add_option("--seed", o.seed, "Fit noise seed");
  exp->add_option("--output", o.output, "Destination .dat-s")->required();
  exp->add_option("--second-diff-bound", o.second_diff_bound, "Bound K on |second differences|")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOptimal : kExitUsage;
  }

  try {
    if (*exp) {
      if (o.model != "monopolist" && o.norm.empty()) throw CLI::ValidationError("--norm", "required for this model");
      if (o.model == "fit" && o.function.empty()) o.function = "quad";
      return cmd_export(o);
    }
    if (*mono) return cmd_monopolist(o);
    if (*proj) {
      if (o.function.empty() && o.input.empty())
        throw CLI::ValidationError("project", "give exactly one of --function and --input");
      if (o.input.empty() && o.n == 0) throw CLI::ValidationError("--n", "required with --function");
      return cmd_project(o);
    }
    if (*fit) {
      if (o.function.empty()) o.function = "quad";
      return cmd_fit(o);
    }
    if (*table) return cmd_table(o);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ApiFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace convexsdp::cli
