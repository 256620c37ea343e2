#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "error.hpp"
#include "symeig.hpp"

namespace convexsdp {

const char* to_string(Norm norm) {
  switch (norm) {
    case Norm::l1:
      return "l1";
    case Norm::l2:
      return "l2";
    case Norm::linf:
      return "linf";
  }
  return "?";
}

std::optional<Norm> parse_norm(std::string_view name) {
  if (name == "l1") return Norm::l1;
  if (name == "l2") return Norm::l2;
  if (name == "linf") return Norm::linf;
  return std::nullopt;
}

std::string kind_name(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::monopolist:
      return "monopolist";
    case ModelKind::projection:
      return std::string("project-") + to_string(spec.norm);
    case ModelKind::projection_h1:
      return spec.zero_boundary ? "project-h01" : "project-h1";
    case ModelKind::fit:
      return "fit";
  }
  return "?";
}

namespace {

// Affine expression over SDP variables (0-based) plus a constant.
struct LinearExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinearExpr& add(const LinearExpr& other, double scale) {
    for (const auto& [v, a] : other.terms) terms.emplace_back(v, scale * a);
    constant += scale * other.constant;
    return *this;
  }

  bool has_variables() const {
    for (const auto& [v, a] : terms)
      if (a != 0.0) return true;
    return false;
  }
};

LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return std::move(a.add(b, -1.0)); }
LinearExpr operator*(LinearExpr a, double s) {
  for (auto& t : a.terms) t.second *= s;
  a.constant *= s;
  return a;
}

LinearExpr variable(int var, double coef = 1.0) { return LinearExpr{{{var, coef}}, 0.0}; }
LinearExpr constant(double c) { return LinearExpr{{}, c}; }

// Collects an LMI in block form: dense blocks in insertion order, followed
// by one diagonal block holding every scalar inequality.
class LmiBuilder {
 public:
  int add_variable(double cost, VariableLabel label) {
    objective_.push_back(cost);
    labels_.push_back(label);
    return static_cast<int>(objective_.size()) - 1;
  }

  void add_cost(int var, double cost) { objective_.at(var) += cost; }

  void add_nonnegative(const LinearExpr& e) {
    if (!e.has_variables()) {
      if (e.constant < -1e-12) fail(ErrorCode::invalid_argument, "model has an infeasible constant constraint");
      return;
    }
    rows_.push_back(e);
  }

  // Symmetric matrix of expressions (upper triangle read).
  void add_psd(const std::vector<std::vector<LinearExpr>>& m) {
    const int k = static_cast<int>(m.size());
    if (k == 1) {
      add_nonnegative(m[0][0]);
      return;
    }
    bool any = false;
    for (int r = 0; r < k; ++r)
      for (int c = r; c < k; ++c) any = any || m[r][c].has_variables();
    if (!any) {
      Eigen::MatrixXd a(k, k);
      for (int r = 0; r < k; ++r)
        for (int c = r; c < k; ++c) a(r, c) = a(c, r) = m[r][c].constant;
      if (min_eigenvalue(a) < -1e-12) fail(ErrorCode::invalid_argument, "model has an infeasible constant block");
      return;
    }
    const int block = static_cast<int>(blocks_.size());
    blocks_.push_back({BlockKind::dense, k});
    for (int r = 0; r < k; ++r)
      for (int c = r; c < k; ++c) emit(block, r, c, m[r][c]);
  }

  SdpProblem finish() {
    if (!rows_.empty()) {
      const int block = static_cast<int>(blocks_.size());
      blocks_.push_back({BlockKind::diagonal, static_cast<int>(rows_.size())});
      for (int r = 0; r < static_cast<int>(rows_.size()); ++r) emit(block, r, r, rows_[r]);
    }
    return build_problem(std::move(objective_), std::move(blocks_), std::move(entries_), std::move(labels_));
  }

 private:
  void emit(int block, int r, int c, const LinearExpr& e) {
    for (const auto& [v, a] : e.terms) entries_.push_back({v + 1, block, r, c, a});
    if (e.constant != 0.0) entries_.push_back({0, block, r, c, -e.constant});
  }

  std::vector<double> objective_;
  std::vector<VariableLabel> labels_;
  std::vector<BlockSpec> blocks_;
  std::vector<SparseEntry> entries_;
  std::vector<LinearExpr> rows_;
};

// Node unknowns: one SDP variable per free node, constants for pinned ones.
struct NodeVariables {
  std::vector<int> var;
  std::vector<double> fixed;

  LinearExpr at(std::int64_t k) const { return var[k] >= 0 ? variable(var[k]) : constant(fixed[k]); }
};

NodeVariables add_node_variables(LmiBuilder& lmi, const Grid& g, const std::vector<bool>& pinned,
                                 const std::vector<double>& pinned_value) {
  NodeVariables nv;
  nv.var.assign(g.node_count(), -1);
  nv.fixed.assign(g.node_count(), 0.0);
  for (std::int64_t k = 0; k < g.node_count(); ++k) {
    if (pinned[k])
      nv.fixed[k] = pinned_value[k];
    else
      nv.var[k] = lmi.add_variable(0.0, {VariableLabel::Kind::node, k});
  }
  return nv;
}

// h^2 times the second difference D2_ij at node k (stencil must exist).
LinearExpr scaled_second_diff(const Grid& g, const NodeVariables& nv, std::int64_t k, int i, int j) {
  LinearExpr e;
  if (i == j) {
    e.add(nv.at(*g.neighbor(k, i, 1)), 1.0);
    e.add(nv.at(k), -2.0);
    e.add(nv.at(*g.neighbor(k, i, -1)), 1.0);
    return e;
  }
  auto corner = [&](int si, int sj) { return *g.neighbor(*g.neighbor(k, i, si), j, sj); };
  e.add(nv.at(corner(1, 1)), 0.25);
  e.add(nv.at(corner(-1, 1)), -0.25);
  e.add(nv.at(corner(1, -1)), -0.25);
  e.add(nv.at(corner(-1, -1)), 0.25);
  return e;
}

// PSD reduced Hessians at every node where one is defined; the blocks are
// h^2 H_h(P_k), which has the same PSD cone.
void add_convexity(LmiBuilder& lmi, const Grid& g, const NodeVariables& nv, const ModelOptions& options) {
  const double h2 = g.h() * g.h();
  for (std::int64_t k = 0; k < g.node_count(); ++k) {
    const auto axes = g.classify(k).hessian_axes;
    if (axes.empty()) continue;
    const std::size_t m = axes.size();
    std::vector<std::vector<LinearExpr>> block(m, std::vector<LinearExpr>(m));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b) block[a][b] = scaled_second_diff(g, nv, k, axes[a], axes[b]);
    if (options.second_diff_bound) {
      const double bound = *options.second_diff_bound * h2;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
          lmi.add_nonnegative(LinearExpr(block[a][b]).add(constant(bound), 1.0));
          lmi.add_nonnegative(LinearExpr(constant(bound)).add(block[a][b], -1.0));
        }
    }
    lmi.add_psd(block);
  }
}

void check_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) fail(ErrorCode::shape_mismatch, "grid functions live on different grids");
}

// Central difference along `axis`, one-sided on the faces.
template <class Value>
auto quadrature_gradient(const Grid& g, std::int64_t k, int axis, Value&& value) {
  const int c = g.coordinate_index(k, axis);
  const double n = g.subdivisions();
  if (c == 0) return (value(*g.neighbor(k, axis, 1)) - value(k)) * n;
  if (c == g.subdivisions()) return (value(k) - value(*g.neighbor(k, axis, -1))) * n;
  return (value(*g.neighbor(k, axis, 1)) - value(*g.neighbor(k, axis, -1))) * (0.5 * n);
}

CompiledModel finish_model(ModelSpec spec, LmiBuilder& lmi, const NodeVariables& nv, std::vector<int> aux,
                           double sign) {
  CompiledModel model{std::move(spec), lmi.finish(), nv.var, nv.fixed, std::move(aux), sign};
  return model;
}

CompiledModel build_norm_projection(ModelKind kind, const GridFunction& f, Norm norm, const ModelOptions& options) {
  const Grid& g = f.grid();
  const std::int64_t nodes = g.node_count();
  LmiBuilder lmi;
  const NodeVariables nv = add_node_variables(lmi, g, std::vector<bool>(nodes, false), {});
  std::vector<int> aux;

  if (norm == Norm::linf) {
    const int t = lmi.add_variable(1.0, {VariableLabel::Kind::epigraph, 0});
    aux.push_back(t);
    for (std::int64_t k = 0; k < nodes; ++k) {
      LinearExpr diff = nv.at(k);
      diff.constant -= f[k];
      lmi.add_nonnegative(LinearExpr(variable(t)).add(diff, -1.0));
      lmi.add_nonnegative(LinearExpr(variable(t)).add(diff, 1.0));
    }
  } else {
    for (std::int64_t k = 0; k < nodes; ++k) aux.push_back(lmi.add_variable(1.0, {VariableLabel::Kind::aux, k}));
    for (std::int64_t k = 0; k < nodes; ++k) {
      const double q = g.cell_measure(k);
      LinearExpr diff = nv.at(k);
      diff.constant -= f[k];
      if (norm == Norm::l1) {
        lmi.add_nonnegative(LinearExpr(variable(aux[k])).add(diff, -q));
        lmi.add_nonnegative(LinearExpr(variable(aux[k])).add(diff, q));
      } else {
        std::vector<std::vector<LinearExpr>> block(2, std::vector<LinearExpr>(2));
        block[0][0] = variable(aux[k]);
        block[0][1] = LinearExpr().add(diff, std::sqrt(q));
        block[1][1] = constant(1.0);
        lmi.add_psd(block);
      }
    }
  }
  add_convexity(lmi, g, nv, options);

  ModelSpec spec{kind, g, f, {}, std::nullopt, norm, false, options};
  return finish_model(std::move(spec), lmi, nv, std::move(aux), 1.0);
}

}  // namespace

CompiledModel build_monopolist(const Grid& g, const GridFunction& density, const ModelOptions& options) {
  check_same_grid(g, density.grid());
  for (double f : density.values())
    if (f < 0.0) fail(ErrorCode::invalid_argument, "monopolist density must be non-negative");

  const std::int64_t nodes = g.node_count();
  LmiBuilder lmi;
  std::vector<bool> pinned(nodes, false);
  pinned[0] = true;  // u(0) = 0
  const NodeVariables nv = add_node_variables(lmi, g, pinned, std::vector<double>(nodes, 0.0));

  // Cost of -J_h: sum_k |Q_k| f_k (u_k - grad_h u(P_k) . P_k).
  for (std::int64_t k = 0; k < nodes; ++k) {
    const double w = g.cell_measure(k) * density[k];
    if (w == 0.0) continue;
    LinearExpr integrand = nv.at(k);
    for (int i = 0; i < g.dim(); ++i) {
      const double p = g.coordinate(k, i);
      if (p == 0.0) continue;
      LinearExpr grad = quadrature_gradient(g, k, i, [&](std::int64_t j) { return nv.at(j); });
      integrand.add(grad, -p);
    }
    for (const auto& [v, a] : integrand.terms) lmi.add_cost(v, w * a);
  }

  // 0 <= D_i u <= 1 on every forward difference, as 0 <= u(x+he_i) - u(x) <= h.
  for (std::int64_t k = 0; k < nodes; ++k)
    for (int i = 0; i < g.dim(); ++i) {
      const auto next = g.neighbor(k, i, 1);
      if (!next) continue;
      LinearExpr diff = LinearExpr(nv.at(*next)).add(nv.at(k), -1.0);
      lmi.add_nonnegative(diff);
      lmi.add_nonnegative(LinearExpr(constant(g.h())).add(diff, -1.0));
    }
  add_convexity(lmi, g, nv, options);

  ModelSpec spec{ModelKind::monopolist, g, std::nullopt, {}, density, Norm::l2, false, options};
  return finish_model(std::move(spec), lmi, nv, {}, -1.0);
}

CompiledModel build_projection(const GridFunction& f, Norm norm, const ModelOptions& options) {
  return build_norm_projection(ModelKind::projection, f, norm, options);
}

CompiledModel build_fit(const GridFunction& samples, Norm norm, const ModelOptions& options) {
  return build_norm_projection(ModelKind::fit, samples, norm, options);
}

CompiledModel build_projection_h1(const GridFunction& f, std::span<const GridFunction> gradient, bool zero_boundary,
                                  const ModelOptions& options) {
  const Grid& g = f.grid();
  if (static_cast<int>(gradient.size()) != g.dim())
    fail(ErrorCode::invalid_argument, "H1 projection needs one gradient component per axis");
  for (const auto& gf : gradient) check_same_grid(g, gf.grid());

  const std::int64_t nodes = g.node_count();
  LmiBuilder lmi;
  std::vector<bool> pinned(nodes, false);
  if (zero_boundary)
    for (std::int64_t k = 0; k < nodes; ++k) pinned[k] = !g.is_interior(k);
  const NodeVariables nv = add_node_variables(lmi, g, pinned, std::vector<double>(nodes, 0.0));

  const double weight = std::sqrt(std::pow(g.h(), g.dim()));
  const double n = g.subdivisions();
  std::vector<int> aux;
  auto add_square = [&](std::int64_t k, const LinearExpr& residual) {
    const int s = lmi.add_variable(1.0, {VariableLabel::Kind::aux, k});
    aux.push_back(s);
    std::vector<std::vector<LinearExpr>> block(2, std::vector<LinearExpr>(2));
    block[0][0] = variable(s);
    block[0][1] = LinearExpr().add(residual, weight);
    block[1][1] = constant(1.0);
    lmi.add_psd(block);
  };
  for (std::int64_t k = 0; k < nodes; ++k) {
    if (!g.is_interior(k)) continue;
    LinearExpr value = nv.at(k);
    value.constant -= f[k];
    add_square(k, value);
    for (int i = 0; i < g.dim(); ++i) {
      LinearExpr slope = LinearExpr(nv.at(*g.neighbor(k, i, 1))).add(nv.at(k), -1.0);
      LinearExpr residual = LinearExpr().add(slope, n);
      residual.constant -= gradient[i][k];
      add_square(k, residual);
    }
  }
  add_convexity(lmi, g, nv, options);

  ModelSpec spec{ModelKind::projection_h1,
                 g,
                 f,
                 std::vector<GridFunction>(gradient.begin(), gradient.end()),
                 std::nullopt,
                 Norm::l2,
                 zero_boundary,
                 options};
  return finish_model(std::move(spec), lmi, nv, std::move(aux), 1.0);
}

DecodedSolution decode(const CompiledModel& model, SdpSolution solution) {
  const Grid& g = model.spec.grid;
  if (static_cast<int>(solution.x.size()) != model.problem.num_vars())
    fail(ErrorCode::shape_mismatch, "solution does not belong to this model");
  std::vector<double> values(g.node_count());
  for (std::int64_t k = 0; k < g.node_count(); ++k)
    values[k] = model.node_var[k] >= 0 ? solution.x[model.node_var[k]] : model.fixed_value[k];
  std::vector<double> aux;
  for (int v : model.aux_vars) aux.push_back(solution.x[v]);
  const Residuals res = residuals(model.problem, solution);
  const double objective = model.objective_sign * solution.primal_objective;
  return DecodedSolution{GridFunction(g, std::move(values)), std::move(aux), objective, std::move(solution), res};
}

DecodedSolution solve_model(const CompiledModel& model, const SolverOptions& options) {
  return decode(model, solve(model.problem, options));
}

double evaluate_functional(const ModelSpec& spec, const GridFunction& u) {
  const Grid& g = spec.grid;
  check_same_grid(g, u.grid());
  const std::int64_t nodes = g.node_count();
  switch (spec.kind) {
    case ModelKind::monopolist: {
      double total = 0.0;
      for (std::int64_t k = 0; k < nodes; ++k) {
        const double f = spec.density ? (*spec.density)[k] : 1.0;
        double dot = 0.0;
        for (int i = 0; i < g.dim(); ++i)
          dot += g.coordinate(k, i) * quadrature_gradient(g, k, i, [&](std::int64_t j) { return u[j]; });
        total += g.cell_measure(k) * f * (dot - u[k]);
      }
      return total;
    }
    case ModelKind::projection:
    case ModelKind::fit: {
      const GridFunction& f = *spec.target;
      double total = 0.0;
      for (std::int64_t k = 0; k < nodes; ++k) {
        const double e = std::abs(u[k] - f[k]);
        switch (spec.norm) {
          case Norm::l1:
            total += g.cell_measure(k) * e;
            break;
          case Norm::l2:
            total += g.cell_measure(k) * e * e;
            break;
          case Norm::linf:
            total = std::max(total, e);
            break;
        }
      }
      return total;
    }
    case ModelKind::projection_h1: {
      const GridFunction& f = *spec.target;
      double total = 0.0;
      for (std::int64_t k = 0; k < nodes; ++k) {
        if (!g.is_interior(k)) continue;
        double e = u[k] - f[k];
        total += e * e;
        for (int i = 0; i < g.dim(); ++i) {
          e = forward_diff(u, k, i) - spec.target_gradient[i][k];
          total += e * e;
        }
      }
      return std::pow(g.h(), g.dim()) * total;
    }
  }
  return 0.0;
}

}  // namespace convexsdp
