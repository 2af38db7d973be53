#include <cmath>

#include <gtest/gtest.h>

#include "proxipair/stability.hpp"

using namespace proxipair;

namespace {
ConvexSet set_a() { return ConvexSet::box(Vector{0, 0}, Vector{1, 1}); }
ConvexSet set_b() { return ConvexSet::box(Vector{0, 2}, Vector{1, 3}); }
const ProductPoint kSolution(Vector{0, 1}, Vector{0, 2});

CyclicMap anchored05() {
  const Matrix q = Matrix::diagonal(Vector{1, -1});
  return make_anchored_affine(Vector{0, 1}, Vector{0, 2}, 0.5, q, q, set_a(), set_b());
}
}  // namespace

TEST(BoundContraction, Examples) {
  EXPECT_NEAR(bound_contraction(0.1, 0.5, 1.0).bound, 5.2, 1e-12);
  EXPECT_EQ(bound_contraction(0.0, 0.3, 0.0).bound, 0.0);
  EXPECT_NEAR(bound_contraction(0.1, 0.5, 0.0).bound, 0.2, 1e-12);
  for (double lam : {0.1, 0.5, 0.9})
    EXPECT_NEAR(bound_contraction(0.3, lam, 0.0).bound, 0.3 / (1.0 - lam), 1e-12);
  EXPECT_THROW(bound_contraction(0.1, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(bound_contraction(0.1, 0.0, 1.0), InvalidArgument);
}

TEST(BoundNonexpansive, Examples) {
  const double ma = sup_norm_bound(set_a()), mb = sup_norm_bound(set_b());
  EXPECT_NEAR(bound_nonexpansive(0.1, 1.0, ma, mb).bound, 1.1 + std::sqrt(2.0) + std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(bound_nonexpansive(0.1, 1.0, ma, mb).bound, 5.67649, 1e-5);
  EXPECT_NEAR(bound_nonexpansive(0.0, 0.0, 1.0, 1.0).bound, 2.0, 1e-12);
  EXPECT_NEAR(bound_nonexpansive(0.7, 1.0, ma, mb).bound,
              bound_nonexpansive(0.3, 1.0, ma, mb).bound + 0.4, 1e-12);
  EXPECT_THROW(bound_nonexpansive(0.1, 1.0, 0.0, 1.0), InvalidArgument);
}

TEST(BoundStrictConvex, Examples) {
  EXPECT_NEAR(bound_strict_convex(0.1, 1.0).bound, 2.2, 1e-12);
  EXPECT_EQ(bound_strict_convex(0.0, 0.0).bound, 0.0);
}

TEST(Bounds, MonotoneOnGrids) {
  const double eps[] = {0.0, 0.01, 0.1, 1.0, 10.0};
  const double ds[] = {0.0, 0.5, 1.0, 3.0};
  const double lams[] = {0.05, 0.3, 0.5, 0.7, 0.95};
  const double ms[] = {0.5, 1.0, 4.0};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double e = eps[i], d = ds[j];
      const double e2 = i + 1 < 5 ? eps[i + 1] : e, d2 = j + 1 < 4 ? ds[j + 1] : d;
      EXPECT_LE(bound_strict_convex(e, d).bound, bound_strict_convex(e2, d).bound);
      EXPECT_LE(bound_strict_convex(e, d).bound, bound_strict_convex(e, d2).bound);
      for (std::size_t k = 0; k < 5; ++k) {
        const double l = lams[k], l2 = k + 1 < 5 ? lams[k + 1] : l;
        const double b = bound_contraction(e, l, d).bound;
        EXPECT_LE(b, bound_contraction(e2, l, d).bound);
        EXPECT_LE(b, bound_contraction(e, l2, d).bound);
        EXPECT_LE(b, bound_contraction(e, l, d2).bound);
      }
      for (double ma : ms)
        for (double mb : ms) {
          const double b = bound_nonexpansive(e, d, ma, mb).bound;
          EXPECT_LE(b, bound_nonexpansive(e2, d, ma, mb).bound);
          EXPECT_LE(b, bound_nonexpansive(e, d2, ma, mb).bound);
          EXPECT_LE(b, bound_nonexpansive(e, d, ma * 2, mb).bound);
          EXPECT_LE(b, bound_nonexpansive(e, d, ma, mb * 2).bound);
        }
    }
}

TEST(VerifyStability, SolutionHasZeroRatio) {
  EXPECT_EQ(deviation_ratio(kSolution, kSolution, 5.2), 0.0);
  EXPECT_EQ(deviation_ratio(kSolution, kSolution, 0.0), 0.0);
}

TEST(VerifyStability, AnchoredContraction) {
  const auto r = verify_stability(anchored05(), set_a(), set_b(), kSolution, bound_contraction(0.1, 0.5, 1.0),
                                  1000, 11);
  EXPECT_EQ(r.kept, 1000);
  EXPECT_EQ(r.violations, 0);
  EXPECT_LE(r.max_ratio, 1.0);
  EXPECT_TRUE(r.passed());
}

TEST(VerifyStability, SinExampleNonexpansiveAndStrictConvex) {
  const CyclicMap s = make_sin_example();
  const auto r = verify_stability(s, set_a(), set_b(), kSolution,
                                  bound_nonexpansive(0.1, 1.0, std::sqrt(2.0), std::sqrt(10.0)), 1000, 12);
  EXPECT_EQ(r.kept, 1000);
  EXPECT_EQ(r.violations, 0);
  const auto q = verify_stability(s, set_a(), set_b(), kSolution, bound_strict_convex(0.1, 1.0), 1000, 13);
  EXPECT_TRUE(q.hypothesis_checked);
  EXPECT_EQ(q.kept, 1000);
  EXPECT_EQ(q.violations, 0);
}

TEST(VerifyStability, Deterministic) {
  const auto b = bound_contraction(0.01, 0.5, 1.0);
  const auto r1 = verify_stability(anchored05(), set_a(), set_b(), kSolution, b, 200, 4);
  const auto r2 = verify_stability(anchored05(), set_a(), set_b(), kSolution, b, 200, 4);
  EXPECT_EQ(r1.attempts, r2.attempts);
  EXPECT_EQ(r1.max_ratio, r2.max_ratio);
}

TEST(VerifyStability, RejectsNonpositiveEpsilon) {
  EXPECT_THROW(verify_stability(anchored05(), set_a(), set_b(), kSolution, bound_contraction(0.0, 0.5, 1.0), 10, 1),
               InvalidArgument);
}
