#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxipair/core.hpp"
#include "proxipair/geometry.hpp"
#include "proxipair/mappings.hpp"
#include "proxipair/random.hpp"
#include "proxipair/solver.hpp"

namespace proxipair {

enum class BoundKind { Contraction, Nonexpansive, StrictConvex };

inline const char* to_string(BoundKind k) noexcept {
  switch (k) {
    case BoundKind::Contraction: return "contraction";
    case BoundKind::Nonexpansive: return "nonexpansive";
    case BoundKind::StrictConvex: return "strict_convex";
  }
  return "?";
}

/// alpha * epsilon + beta * d for one of the three Ulam-Hyers estimates.
struct StabilityBound {
  BoundKind kind = BoundKind::Contraction;
  double epsilon = 0.0;
  double d = 0.0;
  std::optional<double> lambda;
  std::optional<double> m_a;
  std::optional<double> m_b;
  double bound = 0.0;
};

namespace detail {
inline void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw InvalidArgument(std::string(what) + " must be a nonnegative finite number");
}
}  // namespace detail

/// epsilon / (1 - lambda) + (3 - lambda) / (1 - lambda) * d
inline StabilityBound bound_contraction(double epsilon, double lambda, double d) {
  detail::require_nonnegative(epsilon, "epsilon");
  detail::require_nonnegative(d, "d");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidArgument("bound_contraction: lambda must lie in (0,1)");
  StabilityBound b{BoundKind::Contraction, epsilon, d, lambda, std::nullopt, std::nullopt, 0.0};
  b.bound = epsilon / (1.0 - lambda) + (3.0 - lambda) / (1.0 - lambda) * d;
  return b;
}

/// epsilon + d (1 + (M_A + M_B) / d), stored as epsilon + d + M_A + M_B so that d = 0 is allowed.
inline StabilityBound bound_nonexpansive(double epsilon, double d, double m_a, double m_b) {
  detail::require_nonnegative(epsilon, "epsilon");
  detail::require_nonnegative(d, "d");
  if (!(m_a > 0.0) || !(m_b > 0.0))
    throw InvalidArgument("bound_nonexpansive: set bounds M_A, M_B must be positive");
  StabilityBound b{BoundKind::Nonexpansive, epsilon, d, std::nullopt, m_a, m_b, 0.0};
  b.bound = epsilon + d + m_a + m_b;
  return b;
}

/// 2 epsilon + 2 d; valid under the extra per-sample hypothesis checked by verify_stability.
inline StabilityBound bound_strict_convex(double epsilon, double d) {
  detail::require_nonnegative(epsilon, "epsilon");
  detail::require_nonnegative(d, "d");
  StabilityBound b{BoundKind::StrictConvex, epsilon, d, std::nullopt, std::nullopt,
                   std::nullopt, 0.0};
  b.bound = 2.0 * epsilon + 2.0 * d;
  return b;
}

struct StabilityReport {
  BoundKind kind = BoundKind::Contraction;
  double epsilon = 0.0;
  double bound = 0.0;
  long n_samples = 0;        // requested kept samples
  long kept = 0;             // epsilon-approximate samples that were checked
  long attempts = 0;
  long violations = 0;       // kept samples with ratio > 1 + 1e-9
  double max_ratio = 0.0;    // max over kept of max(||x*-u||, ||y*-v||) / bound
  bool hypothesis_checked = false;  // strict-convex kind only
  long hypothesis_rejections = 0;   // approximate samples discarded by that hypothesis
  std::optional<double> max_ratio_nearest;  // against the nearest of the alternative solutions

  bool passed() const { return kept > 0 && violations == 0; }
};

/// max(||x* - u||, ||y* - v||) / bound; 0 when the bound is 0 and the deviation is 0.
inline double deviation_ratio(const ProductPoint& solution, const ProductPoint& candidate,
                              double bound) {
  const double dev = product_distance(solution, candidate);
  if (bound <= 0.0) return dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return dev / bound;
}

/// Samples epsilon-approximate pairs (u, v) in A x B, i.e. ||u - T(u,v)|| <= eps + d and
/// ||v - T(v,u)|| <= eps + d, and checks each against the selected bound. Candidates come
/// alternately from projected perturbations of the solution (radii on a geometric ladder
/// from eps/8 to the set diameter) and from uniform draws over A x B.
template <CyclicOperator Map>
StabilityReport verify_stability(const Map& t, const ConvexSet& a, const ConvexSet& b,
                                 const ProductPoint& solution, const StabilityBound& bound,
                                 long n_samples, std::uint64_t seed,
                                 std::span<const ProductPoint> alternatives = {},
                                 long max_attempts_per_sample = 500) {
  if (!(bound.epsilon > 0.0)) throw InvalidArgument("verify_stability: epsilon must be positive");
  if (n_samples < 1) throw InvalidArgument("verify_stability: n_samples must be >= 1");
  const double d = bound.d;
  const double eps = bound.epsilon;
  StabilityReport r;
  r.kind = bound.kind;
  r.epsilon = eps;
  r.bound = bound.bound;
  r.n_samples = n_samples;
  r.hypothesis_checked = bound.kind == BoundKind::StrictConvex;
  if (!alternatives.empty()) r.max_ratio_nearest = 0.0;

  std::vector<double> ladder;
  const double diam = diameter_bound(a, b);
  for (double rho = eps / 8.0; rho < 2.0 * diam; rho *= 2.0) ladder.push_back(rho);
  ladder.push_back(2.0 * diam);

  Rng rng(derive_seed(seed, 6));
  const std::size_t dim = a.dim();
  const long cap = max_attempts_per_sample * n_samples;
  for (r.attempts = 0; r.kept < n_samples && r.attempts < cap; ++r.attempts) {
    Vector u, v;
    if (r.attempts % 2 == 0) {
      const double rho = ladder[static_cast<std::size_t>(r.attempts / 2) % ladder.size()];
      const double ru = rho * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
      const double rv = rho * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
      u = project(a, solution.first + ru * rng.direction(dim));
      v = project(b, solution.second + rv * rng.direction(dim));
    } else {
      u = draw(a, rng);
      v = draw(b, rng);
    }
    const ProductPoint cand(u, v, Orientation::AcrossB);
    const Vector tu = t.evaluate(cand);
    const Vector tv = t.evaluate(cand.swapped());
    const double res_u = distance(u, tu);
    const double res_v = distance(v, tv);
    if (res_u > eps + d || res_v > eps + d) continue;
    if (r.hypothesis_checked) {
      // ||x* - T(u,v)|| <= ||u - T(u,v)|| and ||y* - T(v,u)|| <= ||v - T(v,u)||
      if (distance(solution.first, tu) > res_u || distance(solution.second, tv) > res_v) {
        ++r.hypothesis_rejections;
        continue;
      }
    }
    ++r.kept;
    const double ratio = deviation_ratio(solution, cand, bound.bound);
    r.max_ratio = std::max(r.max_ratio, ratio);
    if (ratio > 1.0 + 1e-9) ++r.violations;
    if (!alternatives.empty()) {
      double best = ratio;
      for (const auto& alt : alternatives) best = std::min(best, deviation_ratio(alt, cand, bound.bound));
      r.max_ratio_nearest = std::max(*r.max_ratio_nearest, best);
    }
  }
  return r;
}

}  // namespace proxipair
