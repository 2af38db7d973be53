#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "proxipair/geometry.hpp"

using namespace proxipair;

namespace {

ConvexSet unit_box() { return ConvexSet::box(Vector{0, 0}, Vector{1, 1}); }
ConvexSet upper_box() { return ConvexSet::box(Vector{0, 2}, Vector{1, 3}); }

ConvexSet unit_box_polytope() {
  return ConvexSet::polytope({Halfspace{Vector{1, 0}, 1}, Halfspace{Vector{-1, 0}, 0},
                              Halfspace{Vector{0, 1}, 1}, Halfspace{Vector{0, -1}, 0}});
}

ConvexSet triangle() {
  return ConvexSet::polytope({Halfspace{Vector{-1, 0}, 0}, Halfspace{Vector{0, -1}, 0},
                              Halfspace{Vector{1, 1}, 1}});
}

std::vector<ConvexSet> variants() {
  return {unit_box(),
          ConvexSet::box(Vector{-1, 0, 2}, Vector{1, 0.5, 3}),
          ConvexSet::ball(Vector{0, 0}, 1.0),
          ConvexSet::ball(Vector{1, -2, 0.5}, 0.7),
          unit_box_polytope(),
          triangle(),
          ConvexSet::polytope({Halfspace{Vector{1, 1, 1}, 1}, Halfspace{Vector{-1, 0, 0}, 0},
                               Halfspace{Vector{0, -1, 0}, 0}, Halfspace{Vector{0, 0, -1}, 0}})};
}

Vector around(const ConvexSet& s, Rng& rng) {
  auto [lo, hi] = s.bounding_box();
  Vector p(s.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double w = hi[i] - lo[i];
    p[i] = rng.uniform(lo[i] - w, hi[i] + w);
  }
  return p;
}

}  // namespace

TEST(Contains, Examples) {
  EXPECT_TRUE(contains(unit_box(), Vector{0.5, 0.5}, 0.0));
  EXPECT_TRUE(contains(unit_box(), Vector{1.0000005, 0.5}, 1e-6));
  EXPECT_FALSE(contains(ConvexSet::ball(Vector{0, 0}, 1.0), Vector{2, 0}, 0.0));
  EXPECT_THROW(contains(unit_box(), Vector{0.5, 0.5, 0.5}, 0.0), DimensionMismatch);
}

TEST(Project, Examples) {
  EXPECT_EQ(project(unit_box(), Vector{2, 0.5}), (Vector{1, 0.5}));
  const Vector b = project(ConvexSet::ball(Vector{0, 0}, 1.0), Vector{3, 4});
  EXPECT_NEAR(b[0], 0.6, 1e-12);
  EXPECT_NEAR(b[1], 0.8, 1e-12);
  const Vector p = project(unit_box_polytope(), Vector{2, 2});
  EXPECT_NEAR(p[0], 1.0, 1e-8);
  EXPECT_NEAR(p[1], 1.0, 1e-8);
}

TEST(Project, PolytopeMatchesClosedFormBox) {
  Rng rng(31);
  const ConvexSet box = unit_box(), poly = unit_box_polytope();
  for (int i = 0; i < 1000; ++i) {
    const Vector p = around(box, rng);
    EXPECT_LE(distance(project(box, p), project(poly, p)), 1e-8) << p.str();
  }
}

TEST(Polytope, RejectsEmptyAndUnbounded) {
  EXPECT_THROW(ConvexSet::polytope({Halfspace{Vector{1, 0}, -1}, Halfspace{Vector{-1, 0}, -1},
                                    Halfspace{Vector{0, 1}, 1}, Halfspace{Vector{0, -1}, 1}}),
               InvalidArgument);
  EXPECT_THROW(ConvexSet::polytope({Halfspace{Vector{1, 0}, 1}, Halfspace{Vector{0, 1}, 1}}),
               InvalidArgument);
}

TEST(Gap, Examples) {
  const ProximalPair p = gap(unit_box(), upper_box());
  EXPECT_TRUE(p.converged);
  EXPECT_NEAR(p.dist, 1.0, 1e-9);
  EXPECT_NEAR(distance(p.a0, p.b0), 1.0, 1e-9);

  const ConvexSet disc = ConvexSet::ball(Vector{0, 0}, 1.0);
  EXPECT_NEAR(gap(disc, disc).dist, 0.0, 1e-9);

  const ProximalPair q = gap(disc, ConvexSet::ball(Vector{5, 0}, 1.0));
  EXPECT_NEAR(q.dist, 3.0, 1e-8);
  EXPECT_LE(distance(q.a0, Vector{1, 0}), 1e-8);
  EXPECT_LE(distance(q.b0, Vector{4, 0}), 1e-8);
}

TEST(SupNormBound, Examples) {
  EXPECT_NEAR(sup_norm_bound(unit_box()), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(sup_norm_bound(upper_box()), std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(sup_norm_bound(ConvexSet::ball(Vector{3, 0}, 1.0)), 4.0, 1e-12);
  EXPECT_NEAR(sup_norm_bound(triangle()), 1.0, 1e-12);
}

TEST(Sample, MembershipAndDeterminism) {
  const auto pts = sample(unit_box(), 42, 10);
  ASSERT_EQ(pts.size(), 10u);
  for (const auto& p : pts) EXPECT_TRUE(contains(unit_box(), p, 0.0));
  EXPECT_EQ(pts, sample(unit_box(), 42, 10));
}

TEST(Sample, DiscMeanNorm) {
  const auto pts = sample(ConvexSet::ball(Vector{0, 0}, 1.0), 42, 1000);
  double mean = 0.0;
  for (const auto& p : pts) mean += euclidean_norm(p);
  mean /= 1000.0;
  EXPECT_NEAR(mean, 2.0 / 3.0, 0.05);

  // independent Monte Carlo: radius sqrt(U) has mean 2/3
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double mc = 0.0;
  for (int i = 0; i < 100000; ++i) mc += std::sqrt(u(eng));
  EXPECT_NEAR(mc / 100000.0, 2.0 / 3.0, 0.01);
  EXPECT_NEAR(mean, mc / 100000.0, 0.05);
}

TEST(Sample, ThinPolytopeReportsSamplingError) {
  const ConvexSet sliver = ConvexSet::polytope(
      {Halfspace{Vector{1, -1}, 1e-7}, Halfspace{Vector{-1, 1}, 1e-7}, Halfspace{Vector{1, 0}, 1},
       Halfspace{Vector{-1, 0}, 0}});
  EXPECT_THROW(sample(sliver, 1, 5), SamplingError);
}

TEST(GeometryProperties, ProjectionIdempotentAndVariational) {
  std::uint64_t k = 0;
  for (const ConvexSet& s : variants()) {
    Rng rng(derive_seed(500, k++));
    const auto inside = sample(s, derive_seed(600, k), 1000);
    for (int i = 0; i < 1000; ++i) {
      const Vector p = around(s, rng);
      const Vector pp = project(s, p);
      EXPECT_LE(distance(project(s, pp), pp), 1e-12) << s.kind();
      EXPECT_TRUE(contains(s, pp, 1e-9));
      const Vector& x = inside[static_cast<std::size_t>(i)];
      EXPECT_LE(dot(p - pp, x - pp), 1e-9) << s.kind() << " " << p.str();
    }
  }
}

TEST(GeometryProperties, GapLowerBoundsCrossDistancesAndTraceIsMonotone) {
  const std::vector<std::pair<ConvexSet, ConvexSet>> cases = {
      {unit_box(), upper_box()},
      {ConvexSet::ball(Vector{0, 0}, 1.0), ConvexSet::ball(Vector{3, 1}, 0.5)},
      {triangle(), ConvexSet::ball(Vector{2, 2}, 1.0)},
      {unit_box_polytope(), ConvexSet::polytope({Halfspace{Vector{-1, -1}, -3},
                                                 Halfspace{Vector{1, 0}, 4}, Halfspace{Vector{0, 1}, 4}})},
  };
  std::uint64_t k = 0;
  for (const auto& [a, b] : cases) {
    const ProximalPair p = gap(a, b);
    ASSERT_TRUE(p.converged);
    const auto xs = sample(a, derive_seed(700, k), 1000);
    const auto ys = sample(b, derive_seed(800, k++), 1000);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_LE(p.dist, distance(xs[i], ys[i]) + 1e-9);
    for (std::size_t i = 1; i < p.distance_trace.size(); ++i)
      EXPECT_LE(p.distance_trace[i], p.distance_trace[i - 1] + 1e-12);
  }
}

TEST(GeometryProperties, TriangleDiscGapMatchesClosedForm) {
  // nearest triangle point to (2,2) is (0.5,0.5)
  const ProximalPair p = gap(triangle(), ConvexSet::ball(Vector{2, 2}, 1.0));
  EXPECT_NEAR(p.dist, std::sqrt(4.5) - 1.0, 1e-8);
  EXPECT_LE(distance(p.a0, Vector{0.5, 0.5}), 1e-6);
}
