#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "proxipair/core.hpp"
#include "proxipair/detail/simplex.hpp"
#include "proxipair/random.hpp"

namespace proxipair {

class SamplingError : public Error {
 public:
  using Error::Error;
};

struct Box {
  Vector lo;
  Vector hi;
};

struct Ball {
  Vector center;
  double radius = 1.0;
};

/// <normal, x> <= offset
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

/// Bounded nonempty intersection of halfspaces. Normals are stored unit-length.
struct Polytope {
  std::vector<Halfspace> halfspaces;
  Vector bbox_lo;
  Vector bbox_hi;
  std::vector<Vector> vertices;  // populated for dim <= 3
};

/// Dykstra settings for polytope projection.
inline constexpr int kDykstraMaxCycles = 10000;
inline constexpr double kDykstraTol = 1e-10;

namespace detail {

inline double max_violation(const Polytope& poly, const Vector& p) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : poly.halfspaces) worst = std::max(worst, dot(h.normal, p) - h.offset);
  return worst;
}

/// Solves the k x k system in place by Gaussian elimination; false if singular.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return true;
}

inline std::vector<Vector> enumerate_vertices(const Polytope& poly, std::size_t dim) {
  std::vector<Vector> out;
  const std::size_t m = poly.halfspaces.size();
  if (m < dim) return out;
  std::vector<std::size_t> idx(dim);
  for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
  for (;;) {
    std::vector<std::vector<double>> a(dim, std::vector<double>(dim));
    std::vector<double> b(dim), x;
    for (std::size_t r = 0; r < dim; ++r) {
      const auto& h = poly.halfspaces[idx[r]];
      for (std::size_t c = 0; c < dim; ++c) a[r][c] = h.normal[c];
      b[r] = h.offset;
    }
    if (solve_linear(a, b, x)) {
      Vector v(x);
      if (max_violation(poly, v) <= 1e-9) out.push_back(std::move(v));
    }
    // next combination
    std::size_t k = dim;
    while (k > 0 && idx[k - 1] == m - dim + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < dim; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace detail

/// Closed convex region of R^d: a box, a ball, or a bounded polytope.
class ConvexSet {
 public:
  using Shape = std::variant<Box, Ball, Polytope>;

  static ConvexSet box(Vector lo, Vector hi) {
    lo.require_same_dim(hi, "ConvexSet::box");
    if (lo.dim() == 0) throw InvalidArgument("box: dimension must be positive");
    for (std::size_t i = 0; i < lo.dim(); ++i)
      if (lo[i] > hi[i])
        throw InvalidArgument("box: lo[" + std::to_string(i) + "] > hi[" + std::to_string(i) + "]");
    return ConvexSet(Box{std::move(lo), std::move(hi)});
  }

  static ConvexSet ball(Vector center, double radius) {
    if (center.dim() == 0) throw InvalidArgument("ball: dimension must be positive");
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw InvalidArgument("ball: radius must be positive and finite");
    return ConvexSet(Ball{std::move(center), radius});
  }

  /// Validates nonemptiness and boundedness with small linear programs.
  static ConvexSet polytope(std::vector<Halfspace> halfspaces) {
    if (halfspaces.empty()) throw InvalidArgument("polytope: needs at least one halfspace");
    const std::size_t dim = halfspaces.front().normal.dim();
    if (dim == 0) throw InvalidArgument("polytope: dimension must be positive");
    Polytope poly;
    for (auto& h : halfspaces) {
      if (h.normal.dim() != dim) throw DimensionMismatch(dim, h.normal.dim(), "polytope halfspace");
      const double n = euclidean_norm(h.normal);
      if (n < 1e-14) throw InvalidArgument("polytope: zero normal");
      if (!std::isfinite(h.offset)) throw InvalidArgument("polytope: non-finite offset");
      poly.halfspaces.push_back({(1.0 / n) * h.normal, h.offset / n});
    }

    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (const auto& h : poly.halfspaces) {
      a.emplace_back(h.normal.coords().begin(), h.normal.coords().end());
      b.push_back(h.offset);
    }
    poly.bbox_lo = Vector(dim);
    poly.bbox_hi = Vector(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> c(dim, 0.0);
        c[i] = sign;
        const auto r = detail::maximize_free(a, b, c);
        if (r.status == detail::LpStatus::Infeasible) throw InvalidArgument("polytope: empty");
        if (r.status == detail::LpStatus::Unbounded)
          throw InvalidArgument("polytope: unbounded along axis " + std::to_string(i));
        if (sign > 0)
          poly.bbox_hi[i] = r.value;
        else
          poly.bbox_lo[i] = -r.value;
      }
    }
    if (dim <= 3) poly.vertices = detail::enumerate_vertices(poly, dim);
    return ConvexSet(std::move(poly));
  }

  const Shape& shape() const noexcept { return shape_; }

  std::size_t dim() const {
    return std::visit(
        [](const auto& s) -> std::size_t {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Box>)
            return s.lo.dim();
          else if constexpr (std::is_same_v<S, Ball>)
            return s.center.dim();
          else
            return s.bbox_lo.dim();
        },
        shape_);
  }

  std::string kind() const {
    switch (shape_.index()) {
      case 0: return "box";
      case 1: return "ball";
      default: return "polytope";
    }
  }

  /// Axis-aligned bounding box (exact for all three variants).
  std::pair<Vector, Vector> bounding_box() const {
    return std::visit(
        [](const auto& s) -> std::pair<Vector, Vector> {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Box>) {
            return {s.lo, s.hi};
          } else if constexpr (std::is_same_v<S, Ball>) {
            Vector r(s.center.dim(), s.radius);
            return {s.center - r, s.center + r};
          } else {
            return {s.bbox_lo, s.bbox_hi};
          }
        },
        shape_);
  }

 private:
  explicit ConvexSet(Shape s) : shape_(std::move(s)) {}
  Shape shape_;
};

inline void require_dim(const ConvexSet& s, const Vector& p, const char* where) {
  if (s.dim() != p.dim()) throw DimensionMismatch(s.dim(), p.dim(), where);
}

namespace detail {

inline constexpr double kFeasibleSlack = 1e-14;

// Dykstra stops within kDykstraTol of the intersection; a few plain projections onto the
// still-violated halfspaces make the result feasible, so projecting it again is a no-op.
inline Vector polish_feasible(const Polytope& poly, Vector x) {
  for (int pass = 0; pass < 100 && max_violation(poly, x) > kFeasibleSlack; ++pass)
    for (const auto& h : poly.halfspaces) {
      const double viol = dot(h.normal, x) - h.offset;
      if (viol > 0.0) x = x - viol * h.normal;
    }
  return x;
}

inline Vector project_polytope(const Polytope& poly, const Vector& p) {
  if (max_violation(poly, p) <= kFeasibleSlack) return p;
  const std::size_t m = poly.halfspaces.size();
  Vector x = p;
  std::vector<Vector> increments(m, Vector(p.dim()));
  double last_change = std::numeric_limits<double>::infinity();
  for (int cycle = 0; cycle < kDykstraMaxCycles; ++cycle) {
    const Vector start = x;
    double incr_change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& h = poly.halfspaces[i];
      Vector z = x + increments[i];
      const double viol = dot(h.normal, z) - h.offset;
      Vector next = viol > 0.0 ? z - viol * h.normal : z;
      Vector incr = z - next;
      const double dc = distance(incr, increments[i]);
      incr_change += dc * dc;
      increments[i] = std::move(incr);
      x = std::move(next);
    }
    last_change = std::max(distance(x, start), std::sqrt(incr_change));
    if (last_change <= kDykstraTol && max_violation(poly, x) <= kDykstraTol) return polish_feasible(poly, x);
  }
  throw ConvergenceError("polytope projection: Dykstra did not converge in " +
                             std::to_string(kDykstraMaxCycles) + " cycles",
                         last_change);
}

}  // namespace detail

/// Nearest point of S to p in the Euclidean norm.
inline Vector project(const ConvexSet& s, const Vector& p) {
  require_dim(s, p, "project");
  return std::visit(
      [&](const auto& sh) -> Vector {
        using S = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<S, Box>) {
          Vector out = p;
          for (std::size_t i = 0; i < p.dim(); ++i) out[i] = std::clamp(p[i], sh.lo[i], sh.hi[i]);
          return out;
        } else if constexpr (std::is_same_v<S, Ball>) {
          const Vector off = p - sh.center;
          const double r = euclidean_norm(off);
          if (r <= sh.radius) return p;
          return sh.center + (sh.radius / r) * off;
        } else {
          return detail::project_polytope(sh, p);
        }
      },
      s.shape());
}

/// True iff p lies within Euclidean distance tol of S.
inline bool contains(const ConvexSet& s, const Vector& p, double tol = 0.0) {
  require_dim(s, p, "contains");
  return std::visit(
      [&](const auto& sh) -> bool {
        using S = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<S, Box>) {
          double sq = 0.0;
          for (std::size_t i = 0; i < p.dim(); ++i) {
            const double e = std::max({sh.lo[i] - p[i], p[i] - sh.hi[i], 0.0});
            sq += e * e;
          }
          return std::sqrt(sq) <= tol;
        } else if constexpr (std::is_same_v<S, Ball>) {
          return distance(p, sh.center) - sh.radius <= tol;
        } else {
          const double viol = detail::max_violation(sh, p);
          if (viol <= 0.0) return true;
          if (viol > tol) return false;
          return distance(p, detail::project_polytope(sh, p)) <= tol;
        }
      },
      s.shape());
}

/// Upper bound on sup{ ||x|| : x in S }; exact for boxes, balls and (dim <= 3) polytopes.
inline double sup_norm_bound(const ConvexSet& s) {
  return std::visit(
      [](const auto& sh) -> double {
        using S = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<S, Box>) {
          double sq = 0.0;
          for (std::size_t i = 0; i < sh.lo.dim(); ++i) {
            const double c = std::max(std::abs(sh.lo[i]), std::abs(sh.hi[i]));
            sq += c * c;
          }
          return std::sqrt(sq);
        } else if constexpr (std::is_same_v<S, Ball>) {
          return euclidean_norm(sh.center) + sh.radius;
        } else {
          if (!sh.vertices.empty()) {
            double best = 0.0;
            for (const auto& v : sh.vertices) best = std::max(best, euclidean_norm(v));
            return best;
          }
          // bounding-box relaxation: the farthest corner dominates every point
          double sq = 0.0;
          for (std::size_t i = 0; i < sh.bbox_lo.dim(); ++i) {
            const double c = std::max(std::abs(sh.bbox_lo[i]), std::abs(sh.bbox_hi[i]));
            sq += c * c;
          }
          return std::sqrt(sq);
        }
      },
      s.shape());
}

/// Diagonal of the joint bounding box: an upper bound on diam(A u B).
inline double diameter_bound(const ConvexSet& a, const ConvexSet& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim(), "diameter_bound");
  auto [alo, ahi] = a.bounding_box();
  auto [blo, bhi] = b.bounding_box();
  double sq = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double w = std::max(ahi[i], bhi[i]) - std::min(alo[i], blo[i]);
    sq += w * w;
  }
  return std::sqrt(sq);
}

inline double diameter_bound(const ConvexSet& s) { return diameter_bound(s, s); }

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Draws points of a set from a caller-owned generator: uniform for boxes,
/// rejection from the bounding box for balls and polytopes.
inline Vector draw(const ConvexSet& s, Rng& rng) {
  constexpr int kMaxRejections = 100000;  // acceptance below 1e-4 is reported
  auto [lo, hi] = s.bounding_box();
  Vector p(s.dim());
  if (std::holds_alternative<Box>(s.shape())) {
    for (std::size_t i = 0; i < p.dim(); ++i) p[i] = rng.uniform(lo[i], hi[i]);
    return p;
  }
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    for (std::size_t i = 0; i < p.dim(); ++i) p[i] = rng.uniform(lo[i], hi[i]);
    if (contains(s, p, 0.0)) return p;
  }
  throw SamplingError("sample: rejection efficiency below 1e-4 for " + s.kind());
}

/// n points of S, deterministic for a given seed.
inline std::vector<Vector> sample(const ConvexSet& s, std::uint64_t seed, std::size_t n) {
  if (n == 0) throw InvalidArgument("sample: n must be >= 1");
  Rng rng(seed);
  std::vector<Vector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw(s, rng));
  return out;
}

// ---------------------------------------------------------------------------
// Gap between two sets
// ---------------------------------------------------------------------------

/// A concrete (a0, b0) realizing the distance between two sets.
struct ProximalPair {
  Vector a0;
  Vector b0;
  double dist = 0.0;
  int iterations = 0;
  bool converged = false;
  /// ||a_k - b_k||, ||b_k - a_{k+1}||, ... as the alternating projections ran.
  std::vector<double> distance_trace;
};

/// Alternating projections a_{k+1} = P_A(P_B(a_k)) started from
/// P_B(center of A's bounding box); stops once a_k moves by at most tol.
inline ProximalPair gap(const ConvexSet& a, const ConvexSet& b, double tol = 1e-12,
                        int max_iter = 100000) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim(), "gap");
  if (!(tol > 0.0)) throw InvalidArgument("gap: tol must be positive");
  auto [lo, hi] = a.bounding_box();
  const Vector centroid = 0.5 * (lo + hi);

  ProximalPair out;
  Vector bk = project(b, centroid);
  Vector ak = project(a, bk);
  out.distance_trace.push_back(distance(ak, bk));
  for (int k = 1; k <= max_iter; ++k) {
    bk = project(b, ak);
    out.distance_trace.push_back(distance(ak, bk));
    Vector next = project(a, bk);
    out.distance_trace.push_back(distance(next, bk));
    const double moved = distance(next, ak);
    ak = std::move(next);
    out.iterations = k;
    if (moved <= tol) {
      out.converged = true;
      break;
    }
  }
  out.b0 = project(b, ak);
  out.a0 = std::move(ak);
  out.dist = distance(out.a0, out.b0);
  return out;
}

}  // namespace proxipair
