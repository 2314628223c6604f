#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chainscape/error.hpp"
#include "chainscape/grid.hpp"
#include "chainscape/metric.hpp"

using namespace chainscape;

namespace {

Grid unit4() { return Grid(Box{{0.0}, {1.0}}, {4}); }

// Brute force: a cell is in the ball iff some point of a fine lattice over
// the closed cell lies at distance < r. Only used where the nearest point is
// a lattice point (axis-aligned boxes, corner or face projections).
bool ball_oracle(const Grid& g, const Metric& m, std::span<const double> p, double r, std::size_t c) {
  const Box b = g.cell_box(c);
  std::vector<double> q(g.dimension());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::clamp(p[k], b.lo[k], b.hi[k]);
  return m.distance(p, q) < r || (r == 0.0 && g.cell_of(p) == c);
}

}  // namespace

TEST(Grid, CellOfExamples) {
  const Grid g = unit4();
  const double a[] = {0.3}, b[] = {1.0}, c[] = {1.5};
  EXPECT_EQ(g.cell_of(a), 1u);
  EXPECT_EQ(g.cell_of(b), 3u);
  EXPECT_FALSE(g.cell_of(c).has_value());
}

TEST(Grid, HalfOpenBoundariesAndAxisOrder) {
  const Grid g(Box{{0.0, 0.0}, {1.0, 2.0}}, {4, 2});
  const double p[] = {0.25, 1.0};
  // 0.25 starts cell 1 on axis 0; axis 0 varies fastest
  EXPECT_EQ(g.cell_of(p), 1u + 4u * 1u);
  const auto idx = g.multi_index(6);
  EXPECT_EQ(idx[0], 2u);
  EXPECT_EQ(idx[1], 1u);
  EXPECT_EQ(g.flat_index(idx), 6u);
}

TEST(Grid, RefineAndCoarsen) {
  const Grid g(Box{{0.0, 0.0}, {1.0, 1.0}}, {3, 2});
  const Grid f = g.refined();
  EXPECT_EQ(f.cell_count(), 24u);
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    const Point x = f.cell_center(c);
    EXPECT_EQ(f.coarsen(c), g.cell_of(x));
  }
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(Grid(Box{{0.0}, {1.0}}, {0}), InputError);
  EXPECT_THROW(Grid(Box{{1.0}, {0.0}}, {4}), InputError);
  EXPECT_THROW(Grid(Box{{0.0}, {1.0}}, {4, 4}), InputError);
}

TEST(Components, Examples) {
  const Grid g = unit4();
  const std::size_t cells[] = {0, 1, 3};
  const auto comps = components(g, CellSet::from_indices(4, cells));
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].indices(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(comps[1].indices(), (std::vector<std::size_t>{3}));
  EXPECT_TRUE(components(g, g.empty_set()).empty());
  EXPECT_EQ(components(g, g.full_set()).size(), 1u);
}

TEST(Components, DiagonalNeighboursNeedVertexAdjacency) {
  const Grid g(Box{{0.0, 0.0}, {1.0, 1.0}}, {2, 2});
  const std::size_t cells[] = {0, 3};
  const auto s = CellSet::from_indices(4, cells);
  EXPECT_EQ(components(g, s, Adjacency::face).size(), 2u);
  EXPECT_EQ(components(g, s, Adjacency::vertex).size(), 1u);
}

TEST(CellSet, Algebra) {
  CellSet a(130), b(130);
  a.insert(0);
  a.insert(129);
  b.insert(129);
  EXPECT_EQ((a & b).indices(), (std::vector<std::size_t>{129}));
  EXPECT_EQ((a - b).indices(), (std::vector<std::size_t>{0}));
  EXPECT_TRUE(b.subset_of(a));
  EXPECT_EQ(CellSet::full(130).count(), 130u);
  EXPECT_THROW(a |= CellSet(64), InputError);
}

TEST(Metric, DistanceExamples) {
  const double o[] = {0, 0}, q[] = {3, 4};
  EXPECT_DOUBLE_EQ(metric_dist(Metric::euclidean(), o, q), 5.0);
  const Metric h = Metric::hyperbolic_halfplane();
  const double a[] = {0, 2}, b[] = {1, 2}, c[] = {0, 1}, d[] = {0, 3};
  EXPECT_NEAR(metric_dist(h, a, b), 0.5, 1e-12);
  EXPECT_NEAR(metric_dist(h, c, d), 2.0, 1e-12);
}

TEST(Metric, HyperbolicPathIsNeverWorseThanFlatRun) {
  // climbing to height t and back costs 2|t-y| + |dx|/t; the metric takes the best t
  const Metric h = Metric::hyperbolic_halfplane();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(0, 20), y(1, 12);
  for (int i = 0; i < 200; ++i) {
    const double p[] = {x(rng), y(rng)}, q[] = {x(rng), y(rng)};
    const double d = metric_dist(h, p, q);
    double best = 1e300;
    for (double t = std::max(p[1], q[1]); t < 40; t += 1e-3) {
      best = std::min(best, std::abs(p[0] - q[0]) / t + (t - p[1]) + (t - q[1]));
    }
    EXPECT_LE(d, best + 1e-9);
    EXPECT_GE(d, best - 2e-3);
    EXPECT_NEAR(d, metric_dist(h, q, p), 1e-12);
  }
}

TEST(Metric, WeightedAndParse) {
  const Metric w = Metric::parse("weighted:2,0.5");
  const double a[] = {0, 0}, b[] = {1, 2};
  EXPECT_NEAR(metric_dist(w, a, b), std::sqrt(4.0 + 1.0), 1e-12);
  EXPECT_EQ(Metric::parse("hyperbolic").kind(), MetricKind::hyperbolic_halfplane);
  EXPECT_THROW(Metric::parse("taxicab"), InputError);
  EXPECT_THROW(Metric::parse("weighted:1,-1"), InputError);
  EXPECT_THROW(Metric::hyperbolic_halfplane().validate_for(Box{{0, 0}, {1, 1}}), InputError);
}

TEST(Metric, CantorStretchMapsGapsAndMeasure) {
  // stretch is monotone, fixes the ends, and a middle-third gap keeps positive length
  EXPECT_NEAR(cantor::stretch(0.0), 0.0, 1e-12);
  EXPECT_NEAR(cantor::stretch(1.0), 1.0, 1e-12);
  double prev = -1;
  for (int i = 0; i <= 1000; ++i) {
    const double u = cantor::stretch(i / 1000.0);
    EXPECT_GT(u, prev);
    prev = u;
    EXPECT_NEAR(cantor::unstretch(u), i / 1000.0, 1e-9);
  }
  const double gap = cantor::stretch(2.0 / 3.0) - cantor::stretch(1.0 / 3.0);
  EXPECT_GT(gap, 0.1);
  EXPECT_LT(gap, 1.0 / 3.0);
}

TEST(BallCells, Examples) {
  const Grid g = unit4();
  const double p[] = {0.5};
  EXPECT_EQ(ball_cells(g, Metric::euclidean(), p, 0.0).indices(), (std::vector<std::size_t>{2}));
  EXPECT_EQ(ball_cells(g, Metric::euclidean(), p, 0.3).indices(), (std::vector<std::size_t>{0, 1, 2, 3}));
  // hyperbolic: at height 2 the horizontal reach is |dx| < 0.8
  const Grid h(Box{{-2.0, 1.0}, {2.0, 3.0}}, {40, 20});
  const double q[] = {0.0, 2.0};
  const CellSet b = ball_cells(h, Metric::hyperbolic_halfplane(), q, 0.4);
  for (double x : {-0.75, -0.3, 0.0, 0.3, 0.75}) {
    const double in[] = {x, 2.0};
    EXPECT_TRUE(b.contains(*h.cell_of(in))) << x;
  }
  for (double x : {-0.95, 0.95, 1.5}) {
    const double out[] = {x, 2.0};
    EXPECT_FALSE(b.contains(*h.cell_of(out))) << x;
  }
}

TEST(BallCells, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1), rr(0, 0.3);
  const Grid g(Box{{0.0, 0.0}, {1.0, 1.0}}, {17, 13});
  const Metric ms[] = {Metric::euclidean(), Metric::weighted({1.5, 0.5})};
  for (const auto& m : ms) {
    for (int i = 0; i < 100; ++i) {
      const double p[] = {u(rng), u(rng)};
      const double r = rr(rng);
      const CellSet got = ball_cells(g, m, p, r);
      for (std::size_t c = 0; c < g.cell_count(); ++c) {
        ASSERT_EQ(got.contains(c), ball_oracle(g, m, p, r, c)) << m.name() << " cell " << c;
      }
    }
  }
}
