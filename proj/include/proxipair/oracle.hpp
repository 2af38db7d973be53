#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "proxipair/core.hpp"
#include "proxipair/geometry.hpp"
#include "proxipair/mappings.hpp"

namespace proxipair {

struct OracleResult {
  ProductPoint best;
  double best_objective = std::numeric_limits<double>::infinity();
  double resolution = 0.0;
  std::vector<ProductPoint> candidates_below_threshold;  // capped, see candidate_count
  long candidate_count = 0;
  long pairs_evaluated = 0;
};

inline constexpr long kOracleMaxPairs = 100'000'000;
inline constexpr std::size_t kOracleMaxStoredCandidates = 10000;

namespace detail {

/// Grid nodes covering the bounding box of S, spacing at most `resolution` and
/// including both faces of the box. Nodes within resolution/2 of S are kept and
/// snapped onto S, so boundary points (where proximal pairs live) are represented.
inline std::vector<Vector> grid_points(const ConvexSet& s, double resolution) {
  auto [lo, hi] = s.bounding_box();
  const std::size_t d = lo.dim();
  std::vector<long> cells(d);
  std::vector<double> step(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double w = hi[i] - lo[i];
    cells[i] = std::max(1L, static_cast<long>(std::ceil(w / resolution - 1e-9)));
    step[i] = w / static_cast<double>(cells[i]);
  }
  std::vector<Vector> out;
  std::vector<long> idx(d, 0);
  for (;;) {
    Vector p(d);
    for (std::size_t i = 0; i < d; ++i)
      p[i] = idx[i] == cells[i] ? hi[i] : lo[i] + static_cast<double>(idx[i]) * step[i];
    if (contains(s, p, 0.5 * resolution)) out.push_back(project(s, p));
    std::size_t k = 0;
    while (k < d && idx[k] == cells[k]) idx[k++] = 0;
    if (k == d) break;
    ++idx[k];
  }
  return out;
}

inline long estimated_grid_size(const ConvexSet& s, double resolution) {
  auto [lo, hi] = s.bounding_box();
  double n = 1.0;
  for (std::size_t i = 0; i < lo.dim(); ++i)
    n *= std::max(1.0, std::ceil((hi[i] - lo[i]) / resolution - 1e-9)) + 1.0;
  return n > 1e18 ? std::numeric_limits<long>::max() : static_cast<long>(n);
}

}  // namespace detail

/// Coupled best proximity objective max(||u - T(u,v)||, ||v - T(v,u)||) - d.
template <CyclicOperator Map>
double proximity_objective(const Map& t, const ProductPoint& p, double d) {
  const double rx = distance(p.first, t.evaluate(p));
  const double ry = distance(p.second, t.evaluate(p.swapped()));
  return std::max(rx, ry) - d;
}

/// Brute-force minimization of the proximity objective over a regular grid of A x B.
/// Ties go to the lexicographically first (A index, B index).
template <CyclicOperator Map>
OracleResult grid_search(const Map& t, const ConvexSet& a, const ConvexSet& b, double d,
                         double resolution, double threshold) {
  if (!(resolution > 0.0)) throw InvalidArgument("grid_search: resolution must be positive");
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim(), "grid_search");
  if (a.dim() > 3) throw InvalidArgument("grid_search: component dimension must be <= 3");
  const long na = detail::estimated_grid_size(a, resolution);
  const long nb = detail::estimated_grid_size(b, resolution);
  if (static_cast<double>(na) * static_cast<double>(nb) > static_cast<double>(kOracleMaxPairs))
    throw InvalidArgument("grid_search: grid too large (about " +
                          std::to_string(static_cast<double>(na) * static_cast<double>(nb)) +
                          " pairs, limit 1e8); increase the resolution");

  const auto ga = detail::grid_points(a, resolution);
  const auto gb = detail::grid_points(b, resolution);
  OracleResult out;
  out.resolution = resolution;
  std::size_t best_i = 0, best_j = 0;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    for (std::size_t j = 0; j < gb.size(); ++j) {
      const ProductPoint p(ga[i], gb[j], Orientation::AcrossB);
      const double obj = proximity_objective(t, p, d);
      ++out.pairs_evaluated;
      if (obj < out.best_objective) {
        out.best_objective = obj;
        best_i = i;
        best_j = j;
      }
      if (obj <= threshold) {
        ++out.candidate_count;
        if (out.candidates_below_threshold.size() < kOracleMaxStoredCandidates)
          out.candidates_below_threshold.push_back(p);
      }
    }
  }
  if (ga.empty() || gb.empty()) throw InvalidArgument("grid_search: empty grid");
  out.best = ProductPoint(ga[best_i], gb[best_j], Orientation::AcrossB);
  return out;
}

// ---------------------------------------------------------------------------
// One-dimensional roots
// ---------------------------------------------------------------------------

/// Named scalar families for the 1-D conditions that come with the sin example.
struct ScalarFunction {
  enum class Kind { SinSinMinusIdentity, SinMinusIdentity, Affine };
  Kind kind = Kind::Affine;
  double slope = 1.0;
  double intercept = 0.0;

  static ScalarFunction sin_sin_minus_identity() { return {Kind::SinSinMinusIdentity}; }
  static ScalarFunction sin_minus_identity() { return {Kind::SinMinusIdentity}; }
  static ScalarFunction affine(double slope, double intercept) {
    return {Kind::Affine, slope, intercept};
  }

  double operator()(double x) const {
    switch (kind) {
      case Kind::SinSinMinusIdentity: return std::sin(std::sin(x)) - x;
      case Kind::SinMinusIdentity: return std::sin(x) - x;
      case Kind::Affine: return slope * x + intercept;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

/// Bisection on [lo, hi] until the bracket is narrower than tol; requires f(lo) f(hi) <= 0.
template <class F>
double bisect_root(const F& f, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("bisect_root: tol must be positive");
  if (lo > hi) std::swap(lo, hi);
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo * fhi > 0.0) throw InvalidArgument("bisect_root: no sign change on the bracket");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace proxipair
