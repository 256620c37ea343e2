#include <gtest/gtest.h>

#include <cmath>

#include "analytic.hpp"
#include "error.hpp"
#include "models.hpp"

using namespace convexsdp;

namespace {

GridFunction ones(const Grid& g) { return GridFunction(g, std::vector<double>(g.node_count(), 1.0)); }

double half_norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return 0.5 * s;
}

// Decoded solutions must satisfy the model constraints and agree with the
// independent evaluator.
void expect_consistent(const CompiledModel& m, const DecodedSolution& s) {
  ASSERT_EQ(s.solver.status, SolveStatus::optimal) << s.solver.message;
  EXPECT_LE(s.residuals.primal_infeas, 1e-7);
  EXPECT_LE(s.residuals.dual_infeas, 1e-7);
  const double eval = evaluate_functional(m.spec, s.u);
  EXPECT_NEAR(s.objective, eval, 1e-7 * (1.0 + std::abs(s.objective))) << kind_name(m.spec);
  const auto psd = psd_hessian_everywhere(s.u, 1e-7);
  EXPECT_TRUE(psd.psd) << "min eigenvalue " << psd.min_eigenvalue << " at node " << psd.worst_node;
}

}  // namespace

TEST(Models, NormNames) {
  EXPECT_EQ(parse_norm("l1"), Norm::l1);
  EXPECT_EQ(parse_norm("linf"), Norm::linf);
  EXPECT_FALSE(parse_norm("l3").has_value());
  EXPECT_STREQ(to_string(Norm::l2), "l2");
}

// d = 2, n = 2: nine node values plus t. One 2x2 Hessian at the centre, the
// four edge midpoints give 1x1 reduced Hessians, which join the 18 rows of
// +-(u_k - f_k) <= t in the diagonal block.
TEST(Models, LinfStructureOnSmallestGrid) {
  const Grid g(2, 2);
  const auto m = build_projection(GridFunction::sample(g, half_norm2), Norm::linf);
  EXPECT_EQ(m.problem.num_vars(), 10);
  ASSERT_EQ(m.problem.blocks().size(), 2u);
  EXPECT_EQ(m.problem.blocks()[0].kind, BlockKind::dense);
  EXPECT_EQ(m.problem.blocks()[0].size, 2);
  EXPECT_EQ(m.problem.blocks()[1].kind, BlockKind::diagonal);
  EXPECT_EQ(m.problem.blocks()[1].size, 18 + 4);
  int epigraph = 0;
  for (const auto& l : m.problem.labels()) epigraph += l.kind == VariableLabel::Kind::epigraph;
  EXPECT_EQ(epigraph, 1);
}

TEST(Models, MonopolistZeroIsFeasibleWithZeroRevenue) {
  for (int n : {2, 4, 8}) {
    const Grid g(2, n);
    const auto m = build_monopolist(g, ones(g));
    const GridFunction zero(g);
    EXPECT_EQ(evaluate_functional(m.spec, zero), 0.0);
    std::vector<double> x(m.problem.num_vars(), 0.0);
    for (int v : m.aux_vars) x[v] = 0.0;
    EXPECT_GE(min_eigenvalue(m.problem.slack(x)), 0.0);
  }
}

TEST(Models, MonopolistOriginIsEliminated) {
  const Grid g(2, 4);
  const auto m = build_monopolist(g, ones(g));
  EXPECT_EQ(m.node_var[0], -1);
  EXPECT_EQ(m.fixed_value[0], 0.0);
  EXPECT_EQ(m.problem.num_vars(), g.node_count() - 1);
}

TEST(Models, MonopolistTables) {
  const Grid g2(2, 8);
  const auto m2 = build_monopolist(g2, ones(g2));
  const auto s2 = solve_model(m2);
  expect_consistent(m2, s2);
  EXPECT_NEAR(s2.objective, 0.5319, 5e-4);
  EXPECT_GT(s2.u[0] + 1.0, 1.0 - 1e-15);
  for (std::int64_t k = 0; k < g2.node_count(); ++k)
    for (int i = 0; i < 2; ++i) {
      if (g2.coordinate_index(k, i) == 8) continue;
      const double d = forward_diff(s2.u, k, i);
      EXPECT_GE(d, -1e-7);
      EXPECT_LE(d, 1.0 + 1e-7);
    }

  const Grid g3(3, 4);
  const auto m3 = build_monopolist(g3, ones(g3));
  const auto s3 = solve_model(m3);
  expect_consistent(m3, s3);
  EXPECT_NEAR(s3.objective, 0.8195, 1e-3);
}

TEST(Models, MonopolistInterpolantFunctional) {
  for (auto [d, n, want] : {std::tuple{2, 8, 0.5444}, std::tuple{3, 8, 0.8605}}) {
    const Grid g(d, n);
    const auto exact = monopolist_exact(d);
    const auto iu = GridFunction::sample(g, [&](const std::vector<double>& x) { return exact.u(x); });
    const auto m = build_monopolist(g, ones(g));
    EXPECT_NEAR(evaluate_functional(m.spec, iu), want, 2e-3);
  }
}

TEST(Models, MonopolistRefinementIsMonotone) {
  double prev = 0.0;
  for (int n : {8, 16, 32}) {
    const Grid g(2, n);
    const auto s = solve_model(build_monopolist(g, ones(g)));
    ASSERT_EQ(s.solver.status, SolveStatus::optimal);
    EXPECT_GT(s.objective, prev);
    EXPECT_LT(s.objective, monopolist_exact(2).revenue);
    prev = s.objective;
  }
}

TEST(Models, MonopolistRejectsBadDensity) {
  const Grid g(2, 4);
  std::vector<double> v(g.node_count(), 1.0);
  v[7] = -0.5;
  EXPECT_THROW(build_monopolist(g, GridFunction(g, v)), Error);
  EXPECT_THROW(build_monopolist(g, ones(Grid(2, 5))), Error);
}

TEST(Models, MonopolistWithDensity) {
  const Grid g(2, 6);
  const auto f = GridFunction::sample(g, [](const std::vector<double>& x) { return 1.0 + x[0] * x[1]; });
  const auto m = build_monopolist(g, f);
  const auto s = solve_model(m);
  expect_consistent(m, s);
  EXPECT_GT(s.objective, 0.0);
}

TEST(Models, ProjectionOfFeasibleTargetIsIdempotent) {
  for (int d = 1; d <= 3; ++d)
    for (int n : {2, 4, 8, 16}) {
      if (d == 3 && n > 4) continue;
      const Grid g(d, n);
      const auto f = GridFunction::sample(g, half_norm2);
      for (Norm norm : {Norm::l1, Norm::l2, Norm::linf}) {
        const auto m = build_projection(f, norm);
        const auto s = solve_model(m);
        ASSERT_EQ(s.solver.status, SolveStatus::optimal);
        EXPECT_LE(s.objective, 1e-8) << "d=" << d << " n=" << n << " " << to_string(norm);
        if (norm == Norm::linf) {
          for (std::int64_t k = 0; k < g.node_count(); ++k) EXPECT_NEAR(s.u[k], f[k], 1e-6);
        }
      }
    }
}

TEST(Models, ProjectionOfAffineIsExact) {
  const Grid g(2, 6);
  const auto f = GridFunction::sample(g, [](const std::vector<double>& x) { return 1.0 - 2.0 * x[0] + 0.5 * x[1]; });
  for (Norm norm : {Norm::l1, Norm::l2, Norm::linf}) {
    const auto s = solve_model(build_projection(f, norm));
    EXPECT_LE(s.objective, 1e-8);
  }
}

TEST(Models, ProjectionsOfNonConvexData) {
  const Grid g(2, 8);
  const auto f = sample(g, test_function("carlier-f"));
  for (Norm norm : {Norm::l1, Norm::l2, Norm::linf}) {
    const auto m = build_projection(f, norm);
    const auto s = solve_model(m);
    expect_consistent(m, s);
    EXPECT_GT(s.objective, 1e-3);
  }
}

TEST(Models, H1ZeroTarget) {
  const Grid g(2, 6);
  const GridFunction zero(g);
  const std::vector<GridFunction> grad(2, zero);
  for (bool zb : {false, true}) {
    const auto m = build_projection_h1(zero, grad, zb);
    const auto s = solve_model(m);
    ASSERT_EQ(s.solver.status, SolveStatus::optimal);
    EXPECT_LE(s.objective, 1e-8);
    // Only interior nodes enter the functional; boundary values are free.
    for (std::int64_t k = 0; k < g.node_count(); ++k)
      if (g.is_interior(k)) {
        EXPECT_NEAR(s.u[k], 0.0, 1e-4);
      }
  }
}

TEST(Models, H1AffineTargetIsReproduced) {
  const Grid g(2, 6);
  const auto f = GridFunction::sample(g, [](const std::vector<double>& x) { return 0.3 + x[0] - 2.0 * x[1]; });
  const std::vector<GridFunction> grad{GridFunction(g, std::vector<double>(g.node_count(), 1.0)),
                                       GridFunction(g, std::vector<double>(g.node_count(), -2.0))};
  const auto m = build_projection_h1(f, grad, false);
  EXPECT_LE(evaluate_functional(m.spec, f), 1e-20);
  SolverOptions tight;
  tight.gap_tol = 1e-12;
  tight.feas_tol = 1e-10;
  const auto s = solve_model(m, tight);
  ASSERT_EQ(s.solver.status, SolveStatus::optimal);
  EXPECT_LE(s.objective, 1e-10);
}

// Forward differences of a quadratic differ from the nodal gradient by
// h f_ii / 2, so J_h(f) is of order h^2 and bounds the optimum.
TEST(Models, H1ConvexQuadraticIsOrderH2) {
  for (int n : {4, 8, 16}) {
    const Grid g(2, n);
    const auto tf = test_function("quad");
    const auto f = sample(g, tf);
    const auto m = build_projection_h1(f, sample_gradient(g, tf), false);
    const double at_f = evaluate_functional(m.spec, f);
    const double h = 1.0 / n;
    EXPECT_LE(at_f, 5.0 * h * h);
    const auto s = solve_model(m);
    expect_consistent(m, s);
    EXPECT_LE(s.objective, at_f + 1e-9);
  }
}

TEST(Models, H01PinsTheBoundary) {
  const Grid g(2, 6);
  const auto f = ones(g);
  const std::vector<GridFunction> grad(2, GridFunction(g));
  const auto m = build_projection_h1(f, grad, true);
  const auto s = solve_model(m);
  expect_consistent(m, s);
  for (std::int64_t k = 0; k < g.node_count(); ++k)
    if (!g.is_interior(k)) {
      EXPECT_EQ(s.u[k], 0.0);
    }
}

TEST(Models, H1RequiresGradientData) {
  const Grid g(2, 4);
  const GridFunction zero(g);
  EXPECT_THROW(build_projection_h1(zero, std::vector<GridFunction>(1, zero), false), Error);
  EXPECT_THROW(build_projection_h1(zero, std::vector<GridFunction>(2, GridFunction(Grid(2, 5))), false), Error);
}

TEST(Models, FitRecoversNoiseFreeConvexData) {
  const Grid g(2, 8);
  const auto f = sample(g, test_function("quad"));
  for (Norm norm : {Norm::l1, Norm::l2, Norm::linf}) {
    const auto s = solve_model(build_fit(f, norm));
    EXPECT_LE(s.objective, 1e-8);
    for (std::int64_t k = 0; k < g.node_count(); ++k) EXPECT_NEAR(s.u[k], f[k], 1e-4);
  }
}

TEST(Models, FitSpikeCostsAtMostItsCell) {
  const Grid g(2, 8);
  const auto base = sample(g, test_function("quad"));
  std::vector<double> v(base.values().begin(), base.values().end());
  const std::int64_t k = g.index(std::vector<int>{3, 5});
  v[k] += 1.0;
  const auto m = build_fit(GridFunction(g, v), Norm::l1);
  const auto s = solve_model(m);
  expect_consistent(m, s);
  EXPECT_LE(s.objective, g.cell_measure(k) + 1e-8);
}

TEST(Models, SecondDifferenceBound) {
  const Grid g(2, 8);
  const auto f = sample(g, test_function("carlier-f"));
  ModelOptions opts;
  opts.second_diff_bound = 2.0;
  const auto m = build_projection(f, Norm::l2, opts);
  const auto s = solve_model(m);
  expect_consistent(m, s);
  for (std::int64_t k = 0; k < g.node_count(); ++k) {
    const auto c = g.classify(k);
    for (int i : c.hessian_axes)
      for (int j : c.hessian_axes) {
        if (i != j && !c.interior) continue;
        EXPECT_LE(std::abs(second_diff(s.u, k, i, j)), 2.0 + 1e-5);
      }
  }
  const auto free = solve_model(build_projection(f, Norm::l2));
  EXPECT_GE(s.objective, free.objective - 1e-9);
}

TEST(Models, EvaluatorRejectsForeignGrid) {
  const Grid g(2, 4);
  const auto m = build_monopolist(g, ones(g));
  EXPECT_THROW(evaluate_functional(m.spec, GridFunction(Grid(2, 5))), Error);
}
