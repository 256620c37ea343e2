#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "error.hpp"
#include "fdops.hpp"
#include "oracles.hpp"

using namespace convexsdp;

namespace {

// Rows listed top to bottom as printed: x2 = 1, 1/2, 0.
GridFunction from_rows(const double (&rows)[3][3]) {
  const Grid g(2, 2);
  std::vector<double> v(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) v[(2 - r) * 3 + c] = rows[r][c];
  return GridFunction(g, v);
}

GridFunction example_psd_not_convex() {
  const double rows[3][3] = {{1, 1, 1}, {0.5, 5.0 / 8, 1}, {0, 0.5, 1}};
  return from_rows(rows);
}

GridFunction example_convex_not_psd() {
  const double rows[3][3] = {{8.0 / 15, 8.0 / 15, 1}, {1.0 / 30, 0.5, 1}, {0, 0.5, 1}};
  return from_rows(rows);
}

constexpr std::int64_t kCenter = 4;

double half_norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return 0.5 * s;
}

}  // namespace

TEST(ForwardDiff, LinearAndConstant) {
  const Grid g(2, 5);
  const auto lin = GridFunction::sample(g, [](const std::vector<double>& x) { return x[0]; });
  const auto cst = GridFunction::sample(g, [](const std::vector<double>&) { return 3.0; });
  for (std::int64_t k = 0; k < g.node_count(); ++k) {
    if (g.coordinate_index(k, 0) == 5) continue;
    EXPECT_NEAR(forward_diff(lin, k, 0), 1.0, 1e-13);
    EXPECT_EQ(forward_diff(cst, k, 0), 0.0);
  }
}

TEST(ForwardDiff, HalfSquareAtOrigin) {
  const Grid g(1, 2);
  const auto u = GridFunction::sample(g, half_norm2);
  EXPECT_EQ(forward_diff(u, 0, 0), 0.25);
}

TEST(ForwardDiff, LeavingTheMeshThrows) {
  const Grid g(2, 2);
  const GridFunction u(g);
  try {
    forward_diff(u, 2, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::undefined_stencil);
  }
  EXPECT_THROW(second_diff(u, 1, 1, 1), Error);
  EXPECT_THROW(second_diff(u, 1, 0, 1), Error);
}

TEST(SecondDiff, HalfNormSquaredIsIdentity) {
  for (int d = 1; d <= 3; ++d) {
    const Grid g(d, 8);
    const auto u = GridFunction::sample(g, half_norm2);
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
      if (!g.is_interior(k)) continue;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) EXPECT_EQ(second_diff(u, k, i, j), i == j ? 1.0 : 0.0);
    }
  }
}

TEST(SecondDiff, CounterexampleOffDiagonal) {
  EXPECT_EQ(second_diff(example_psd_not_convex(), kCenter, 0, 1), -1.0);
}

TEST(SecondDiff, BitSymmetric) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Grid g(3, 5);
  std::vector<double> v(g.node_count());
  for (auto& x : v) x = unif(gen);
  const GridFunction u(g, v);
  for (std::int64_t k = 0; k < g.node_count(); ++k) {
    if (!g.is_interior(k)) continue;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double a = second_diff(u, k, i, j);
        const double b = second_diff(u, k, j, i);
        EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
      }
  }
}

// The stencils carry no truncation error on quadratics. With integer nodal
// data (a quadratic in mesh units) every operation is exact on every n.
TEST(SecondDiff, ExactOnIntegerQuadratics) {
  const int q[3][3] = {{3, -1, 2}, {-1, 5, 0}, {2, 0, 1}};
  for (int d = 1; d <= 3; ++d)
    for (int n = 2; n <= 64; ++n) {
      if (d == 3 && n > 24) break;
      const Grid g(d, n);
      std::vector<double> v(g.node_count());
      for (std::int64_t k = 0; k < g.node_count(); ++k) {
        const auto m = g.multi_index(k);
        long s = 0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) s += static_cast<long>(q[i][j]) * m[i] * m[j];
        v[k] = static_cast<double>(s);
      }
      const GridFunction u(g, v);
      const double n2 = static_cast<double>(n) * n;
      for (std::int64_t k = 0; k < g.node_count(); ++k) {
        if (!g.is_interior(k)) continue;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) ASSERT_EQ(second_diff(u, k, i, j), 2.0 * q[i][j] * n2);
      }
    }
}

// Sampling x -> Q x.x/2 rounds each nodal value once; the n^2 factor of the
// stencil amplifies that rounding. Dyadic n are exact to 1e-13; otherwise
// the bound is a few ulps of the data times n^2.
TEST(SecondDiff, SampledQuadratics) {
  for (int d = 1; d <= 3; ++d)
    for (int n : {2, 3, 4, 7, 8, 16, 31, 32, 64}) {
      if (d == 3 && n > 32) continue;
      const Grid g(d, n);
      const auto u = GridFunction::sample(g, [&](const std::vector<double>& x) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += (i + 1) * x[i] * x[i] + (i > 0 ? x[i] * x[i - 1] : 0.0);
        return 0.5 * s;
      });
      const bool dyadic = (n & (n - 1)) == 0;
      const double tol = dyadic ? 1e-13 : 16.0 * d * d * 2.2e-16 * n * n;
      for (std::int64_t k = 0; k < g.node_count(); ++k) {
        if (!g.is_interior(k)) continue;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            const double want = i == j ? i + 1.0 : (std::abs(i - j) == 1 ? 0.5 : 0.0);
            ASSERT_NEAR(second_diff(u, k, i, j), want, tol) << "d=" << d << " n=" << n;
          }
      }
    }
}

TEST(DiscreteHessian, Counterexamples) {
  const auto h1 = discrete_hessian(example_psd_not_convex(), kCenter);
  EXPECT_EQ(h1.axes, (std::vector<int>{0, 1}));
  EXPECT_EQ(h1.matrix(0, 0), 1.0);
  EXPECT_EQ(h1.matrix(1, 1), 1.0);
  EXPECT_EQ(h1.matrix(0, 1), -1.0);
  EXPECT_EQ(h1.matrix(1, 0), -1.0);

  const auto h2 = discrete_hessian(example_convex_not_psd(), kCenter);
  EXPECT_NEAR(h2.matrix(0, 0), 2.0 / 15, 1e-12);
  EXPECT_NEAR(h2.matrix(1, 1), 2.0 / 15, 1e-12);
  // Four corners: (1 - 8/15 - 1 + 0) / (4 h^2) = -8/15.
  EXPECT_NEAR(h2.matrix(0, 1), -8.0 / 15, 1e-12);
  EXPECT_EQ(h2.matrix(0, 1), h2.matrix(1, 0));
}

TEST(DiscreteHessian, ReducedAtBoundaryAndUndefinedAtCorners) {
  const Grid g(3, 2);
  const auto u = GridFunction::sample(g, half_norm2);
  const auto face = discrete_hessian(u, g.index(std::vector<int>{1, 1, 0}));
  EXPECT_EQ(face.axes, (std::vector<int>{0, 1}));
  EXPECT_TRUE(face.matrix.isApprox(Eigen::MatrixXd::Identity(2, 2)));
  const auto edge = discrete_hessian(u, g.index(std::vector<int>{1, 0, 0}));
  EXPECT_EQ(edge.matrix.rows(), 1);
  EXPECT_EQ(edge.matrix(0, 0), 1.0);
  try {
    discrete_hessian(u, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::hessian_undefined);
  }
  const auto inner = discrete_hessian(u, g.index(std::vector<int>{1, 1, 1}));
  EXPECT_EQ(inner.matrix, Eigen::MatrixXd::Identity(3, 3));
}

TEST(AggregatedHessian, OneDimensionalQuadratic) {
  const Grid g(1, 8);
  const auto u = GridFunction::sample(g, half_norm2);
  const auto agg = aggregated_hessian(u, 4, 2);
  ASSERT_EQ(agg.rows(), 1);
  EXPECT_NEAR(agg(0, 0), 3.0, 1e-12);
}

// Telescoped boundary sums against direct summation. Entries grow like
// m^d n^2, so the comparison is relative to the largest entry.
TEST(AggregatedHessian, MatchesDirectSummation) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int d = 1; d <= 3; ++d)
    for (int m = 2; m <= 4; ++m)
      for (int mult : {2, 3}) {
        if (d == 3 && m * mult > 9) continue;
        const int n = m * mult;
        const Grid g(d, n);
        std::vector<double> v(g.node_count());
        for (auto& x : v) x = unif(gen);
        const GridFunction u(g, v);
        int checked = 0;
        for (std::int64_t k = 0; k < g.node_count(); ++k) {
          const auto mi = g.multi_index(k);
          bool coarse_interior = true;
          for (int c : mi) coarse_interior = coarse_interior && c % m == 0 && c >= m && c <= n - m;
          if (!coarse_interior) continue;
          const auto agg = aggregated_hessian(u, k, m);
          const auto ref = oracle::summed_hessian(u, mi, m);
          const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
          EXPECT_LE((agg - ref).cwiseAbs().maxCoeff(), 1e-12 * scale) << "d=" << d << " m=" << m;
          ++checked;
        }
        EXPECT_GT(checked, 0);
      }
}

TEST(AggregatedHessian, PsdDataGivesPsdAggregate) {
  const Grid g(2, 12);
  const auto u = GridFunction::sample(g, [](const std::vector<double>& x) {
    return std::exp(x[0] + 0.5 * x[1]) + (x[0] - x[1]) * (x[0] - x[1]);
  });
  for (int m : {2, 3, 4}) {
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
      const auto mi = g.multi_index(k);
      if (mi[0] % m || mi[1] % m || mi[0] < m || mi[1] < m || mi[0] > 12 - m || mi[1] > 12 - m) continue;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(aggregated_hessian(u, k, m));
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
    }
  }
}

TEST(AggregatedHessian, RejectsBadCoarseNodes) {
  const Grid g(2, 8);
  const GridFunction u(g);
  EXPECT_THROW(aggregated_hessian(u, g.index(std::vector<int>{3, 3}), 2), Error);  // not nested
  EXPECT_THROW(aggregated_hessian(u, g.index(std::vector<int>{2, 2}), 4), Error);  // leaves the cube
  EXPECT_THROW(aggregated_hessian(u, g.index(std::vector<int>{4, 4}), 3), Error);  // 3 does not divide 8
  EXPECT_THROW(aggregated_hessian(u, g.index(std::vector<int>{4, 4}), 1), Error);
}

TEST(Interpolate, NodesCentersAndBilinear) {
  const Grid g(2, 4);
  const auto u = GridFunction::sample(g, [](const std::vector<double>& x) { return x[0] * x[1]; });
  for (std::int64_t k = 0; k < g.node_count(); ++k) EXPECT_EQ(interpolate(u, g.point(k)), u[k]);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double p[2] = {unif(gen), unif(gen)};
    EXPECT_NEAR(interpolate(u, p), p[0] * p[1], 1e-15);
  }
  std::vector<double> v(g.node_count());
  for (auto& x : v) x = unif(gen);
  const GridFunction r(g, v);
  const double c[2] = {0.375, 0.625};
  const double mean = (r[g.index(std::vector<int>{1, 2})] + r[g.index(std::vector<int>{2, 2})] +
                       r[g.index(std::vector<int>{1, 3})] + r[g.index(std::vector<int>{2, 3})]) /
                      4.0;
  EXPECT_NEAR(interpolate(r, c), mean, 1e-15);
  const double out[2] = {1.0 + 1e-9, 0.5};
  EXPECT_THROW(interpolate(r, out), Error);
  const double bad[1] = {0.5};
  EXPECT_THROW(interpolate(r, bad), Error);
}

TEST(Convexity, CounterexamplePair) {
  const auto a = example_psd_not_convex();
  const auto b = example_convex_not_psd();

  const auto ra = check_discrete_convexity(a);
  EXPECT_FALSE(ra.convex);
  ASSERT_TRUE(ra.first_violation.has_value());
  EXPECT_EQ(ra.first_violation->node, kCenter);
  EXPECT_EQ(std::abs(ra.first_violation->offset[0]), 1);
  EXPECT_EQ(ra.first_violation->offset[0], ra.first_violation->offset[1]);
  EXPECT_NEAR(ra.first_violation->deficit, -0.25, 1e-15);

  EXPECT_TRUE(check_discrete_convexity(b).convex);

  const auto pa = psd_hessian_everywhere(a, 1e-9);
  EXPECT_TRUE(pa.psd);
  EXPECT_NEAR(pa.min_eigenvalue, 0.0, 1e-12);

  const auto pb = psd_hessian_everywhere(b, 1e-9);
  EXPECT_FALSE(pb.psd);
  EXPECT_EQ(pb.worst_node, kCenter);
  EXPECT_NEAR(pb.min_eigenvalue, -2.0 / 5, 1e-12);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(discrete_hessian(a, kCenter).matrix);
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(1), 2.0, 1e-12);
  es.compute(discrete_hessian(b, kCenter).matrix);
  EXPECT_NEAR(es.eigenvalues()(0), -2.0 / 5, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(1), 2.0 / 3, 1e-12);
}

TEST(Convexity, AffineIsConvexWithEquality) {
  const Grid g(2, 4);
  const auto u = GridFunction::sample(g, [](const std::vector<double>& x) { return 0.25 + 2 * x[0] - 3 * x[1]; });
  EXPECT_TRUE(check_discrete_convexity(u).convex);
  EXPECT_TRUE(psd_hessian_everywhere(u).psd);
  EXPECT_TRUE(axis_lines_convex(u));
}

TEST(Convexity, HalfNormSquaredIsPsd) {
  for (int d = 1; d <= 3; ++d) {
    const auto u = GridFunction::sample(Grid(d, 6), half_norm2);
    const auto r = psd_hessian_everywhere(u);
    EXPECT_TRUE(r.psd);
    EXPECT_TRUE(check_discrete_convexity(u).convex);
  }
}

TEST(Convexity, PsdImpliesConvexAxisLines) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<GridFunction> cases{example_psd_not_convex()};
  for (int t = 0; t < 20; ++t) {
    Eigen::Matrix2d b;
    b << unif(gen), unif(gen), unif(gen), unif(gen);
    const Eigen::Matrix2d a = b * b.transpose();
    const double w0 = unif(gen), w1 = unif(gen);
    cases.push_back(GridFunction::sample(Grid(2, 7), [&](const std::vector<double>& x) {
      return a(0, 0) * x[0] * x[0] + 2 * a(0, 1) * x[0] * x[1] + a(1, 1) * x[1] * x[1] + w0 * x[0] + w1 * x[1] +
             std::abs(x[0] - 0.4) + std::exp(x[1]);
    }));
  }
  for (const auto& u : cases) {
    if (!psd_hessian_everywhere(u, 0.0).psd) continue;
    EXPECT_TRUE(axis_lines_convex(u, 1e-12));
  }
}

TEST(Convexity, OneDimensionalNonUniform) {
  const std::vector<double> x{0.0, 0.1, 0.5, 0.6, 1.0};
  std::vector<double> v;
  for (double t : x) v.push_back(t * t);
  EXPECT_TRUE(convex_1d(x, v));
  v[2] += 0.1;
  EXPECT_FALSE(convex_1d(x, v));
}

TEST(GridFunction, RejectsBadValues) {
  const Grid g(2, 2);
  EXPECT_THROW(GridFunction(g, std::vector<double>(8, 0.0)), Error);
  std::vector<double> v(9, 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(GridFunction(g, v), Error);
  GridFunction u(g);
  EXPECT_THROW(u.set(2, std::numeric_limits<double>::infinity()), Error);
  EXPECT_THROW(u.at(9), Error);
}
