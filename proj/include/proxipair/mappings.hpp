#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "proxipair/core.hpp"
#include "proxipair/geometry.hpp"
#include "proxipair/random.hpp"

namespace proxipair {

// ---------------------------------------------------------------------------
// Map families
// ---------------------------------------------------------------------------

/// Across B: b* + lambda * Q_ab (x - a*).  Across A: a* + lambda * Q_ba (x - b*).
/// Only the first component of the argument enters.
struct AnchoredAffine {
  Vector a_star;
  Vector b_star;
  double lambda = 0.5;
  Matrix iso_ab;
  Matrix iso_ba;
};

/// S((x,y),(u,v)) = (sin u, v), planar only.
struct SinExample {};

/// Constant b* on A x B and a* on B x A.
struct ConstantProximal {
  Vector a_star;
  Vector b_star;
};

/// M_first * first + M_second * second + offset.
struct AffinePiece {
  Matrix on_first;
  Matrix on_second;
  Vector offset;
};

/// Independent affine maps per orientation.
struct Composite {
  AffinePiece across_b;  // used on A x B, image meant for B
  AffinePiece across_a;  // used on B x A, image meant for A
};

struct Contraction {
  double lambda;
};
struct Nonexpansive {};

using Family = std::variant<AnchoredAffine, SinExample, ConstantProximal, Composite>;
using DeclaredClass = std::variant<Contraction, Nonexpansive>;

/// Mapping on (A x B) u (B x A) that swaps sides. Immutable once built.
class CyclicMap {
 public:
  CyclicMap(Family family, DeclaredClass declared, std::size_t dim)
      : family_(std::move(family)), declared_(declared), dim_(dim) {
    if (const auto* c = std::get_if<Contraction>(&declared_)) {
      if (!(c->lambda > 0.0 && c->lambda < 1.0))
        throw InvalidArgument("declared contraction constant must lie in (0,1), got " +
                              std::to_string(c->lambda));
    }
  }

  const Family& family() const noexcept { return family_; }
  const DeclaredClass& declared_class() const noexcept { return declared_; }
  std::size_t dim() const noexcept { return dim_; }

  std::optional<double> declared_lambda() const {
    if (const auto* c = std::get_if<Contraction>(&declared_)) return c->lambda;
    return std::nullopt;
  }
  bool is_contraction() const noexcept { return std::holds_alternative<Contraction>(declared_); }

  std::string name() const {
    switch (family_.index()) {
      case 0: return "anchored_affine";
      case 1: return "sin_example";
      case 2: return "constant_proximal";
      default: return "composite";
    }
  }

  /// Lipschitz bound of the map w.r.t. the product max-norm on its input.
  double lipschitz_bound() const {
    return std::visit(
        [](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, AnchoredAffine>) {
            return f.lambda;
          } else if constexpr (std::is_same_v<F, SinExample>) {
            return 1.0;
          } else if constexpr (std::is_same_v<F, ConstantProximal>) {
            return 0.0;
          } else {
            auto piece = [](const AffinePiece& p) {
              return p.on_first.frobenius_norm() + p.on_second.frobenius_norm();
            };
            return std::max(piece(f.across_b), piece(f.across_a));
          }
        },
        family_);
  }

  /// T(p.first, p.second). Checks dimensions only; see evaluate_checked.
  Vector evaluate(const ProductPoint& p) const {
    if (p.first.dim() != dim_) throw DimensionMismatch(dim_, p.first.dim(), "CyclicMap::evaluate");
    if (p.second.dim() != dim_)
      throw DimensionMismatch(dim_, p.second.dim(), "CyclicMap::evaluate");
    const bool across_b = p.orientation == Orientation::AcrossB;
    return std::visit(
        [&](const auto& f) -> Vector {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, AnchoredAffine>) {
            return across_b ? f.b_star + f.lambda * f.iso_ab.apply(p.first - f.a_star)
                            : f.a_star + f.lambda * f.iso_ba.apply(p.first - f.b_star);
          } else if constexpr (std::is_same_v<F, SinExample>) {
            return Vector{std::sin(p.second[0]), p.second[1]};
          } else if constexpr (std::is_same_v<F, ConstantProximal>) {
            return across_b ? f.b_star : f.a_star;
          } else {
            const AffinePiece& piece = across_b ? f.across_b : f.across_a;
            return piece.on_first.apply(p.first) + piece.on_second.apply(p.second) + piece.offset;
          }
        },
        family_);
  }

 private:
  Family family_;
  DeclaredClass declared_;
  std::size_t dim_;
};

/// Any type usable by the solvers: evaluate(ProductPoint) -> Vector and dim().
template <class M>
concept CyclicOperator = requires(const M& m, const ProductPoint& p) {
  { m.evaluate(p) } -> std::convertible_to<Vector>;
  { m.dim() } -> std::convertible_to<std::size_t>;
};

/// The set an oriented point's first component must lie in, and the set its image targets.
inline const ConvexSet& source_set(Orientation o, const ConvexSet& a, const ConvexSet& b) {
  return o == Orientation::AcrossB ? a : b;
}
inline const ConvexSet& target_set(Orientation o, const ConvexSet& a, const ConvexSet& b) {
  return o == Orientation::AcrossB ? b : a;
}

/// Throws MembershipError unless p's components lie in the sets its orientation names.
inline void require_oriented(const ProductPoint& p, const ConvexSet& a, const ConvexSet& b,
                             double tol, const char* where) {
  const ConvexSet& s1 = source_set(p.orientation, a, b);
  const ConvexSet& s2 = target_set(p.orientation, a, b);
  if (!contains(s1, p.first, tol) || !contains(s2, p.second, tol))
    throw MembershipError(std::string(where) + ": point " + p.str() + " is not in " +
                          (p.orientation == Orientation::AcrossB ? "A x B" : "B x A"));
}

/// evaluate() with the orientation/membership precondition enforced.
template <CyclicOperator Map>
Vector evaluate_checked(const Map& t, const ProductPoint& p, const ConvexSet& a,
                        const ConvexSet& b, double tol = 1e-9) {
  require_oriented(p, a, b, tol, "evaluate");
  return t.evaluate(p);
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace detail {

/// Points whose convex hull contains the set (exact vertices where known).
inline std::vector<Vector> hull_points(const ConvexSet& s) {
  if (const auto* poly = std::get_if<Polytope>(&s.shape()); poly && !poly->vertices.empty())
    return poly->vertices;
  auto [lo, hi] = s.bounding_box();
  const std::size_t d = lo.dim();
  std::vector<Vector> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    Vector c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = (mask >> i) & 1u ? hi[i] : lo[i];
    out.push_back(std::move(c));
  }
  return out;
}

/// Is the image of `source` under x -> anchor + lambda Q (x - origin) inside `target`?
inline bool certify_affine_range(const ConvexSet& source, const ConvexSet& target,
                                 const Vector& origin, const Vector& anchor, double lambda,
                                 const Matrix& q, double tol) {
  auto image = [&](const Vector& x) { return anchor + lambda * q.apply(x - origin); };
  if (const auto* ball = std::get_if<Ball>(&source.shape())) {
    const Vector c = image(ball->center);
    const double r = lambda * ball->radius;  // Q orthogonal: image is a ball
    return std::visit(
        [&](const auto& t) -> bool {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, Ball>) {
            return distance(c, t.center) + r <= t.radius + tol;
          } else if constexpr (std::is_same_v<T, Box>) {
            for (std::size_t i = 0; i < c.dim(); ++i)
              if (c[i] - r < t.lo[i] - tol || c[i] + r > t.hi[i] + tol) return false;
            return true;
          } else {
            for (const auto& h : t.halfspaces)
              if (dot(h.normal, c) + r > h.offset + tol) return false;
            return true;
          }
        },
        target.shape());
  }
  // Box and polytope sources: the image hull is spanned by the images of hull points.
  for (const auto& v : hull_points(source))
    if (!contains(target, image(v), tol)) return false;
  return true;
}

}  // namespace detail

/// Builds an AnchoredAffine contraction and certifies it: anchors inside their sets,
/// orthogonal isometries, and both images contained in their target sets.
inline CyclicMap make_anchored_affine(Vector a_star, Vector b_star, double lambda, Matrix iso_ab,
                                      Matrix iso_ba, const ConvexSet& a, const ConvexSet& b) {
  const std::size_t d = a_star.dim();
  a_star.require_same_dim(b_star, "anchored_affine anchors");
  if (a.dim() != d || b.dim() != d) throw DimensionMismatch(d, a.dim(), "anchored_affine sets");
  if (iso_ab.dim() != d || iso_ba.dim() != d)
    throw DimensionMismatch(d, iso_ab.dim(), "anchored_affine isometries");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidArgument("anchored_affine: lambda must lie in (0,1), got " +
                          std::to_string(lambda));
  if (!iso_ab.is_orthogonal(1e-10) || !iso_ba.is_orthogonal(1e-10))
    throw InvalidArgument("anchored_affine: isometries must be orthogonal within 1e-10");
  constexpr double tol = 1e-9;
  if (!contains(a, a_star, tol)) throw InvalidArgument("anchored_affine: a_star not in A");
  if (!contains(b, b_star, tol)) throw InvalidArgument("anchored_affine: b_star not in B");
  if (!detail::certify_affine_range(a, b, a_star, b_star, lambda, iso_ab, tol))
    throw InvalidArgument("anchored_affine: image of A is not contained in B");
  if (!detail::certify_affine_range(b, a, b_star, a_star, lambda, iso_ba, tol))
    throw InvalidArgument("anchored_affine: image of B is not contained in A");
  return CyclicMap(AnchoredAffine{std::move(a_star), std::move(b_star), lambda, std::move(iso_ab),
                                  std::move(iso_ba)},
                   Contraction{lambda}, d);
}

inline CyclicMap make_sin_example() { return CyclicMap(SinExample{}, Nonexpansive{}, 2); }

inline CyclicMap make_constant_proximal(Vector a_star, Vector b_star,
                                        DeclaredClass declared = Nonexpansive{}) {
  a_star.require_same_dim(b_star, "constant_proximal");
  const std::size_t d = a_star.dim();
  return CyclicMap(ConstantProximal{std::move(a_star), std::move(b_star)}, declared, d);
}

inline CyclicMap make_composite(AffinePiece across_b, AffinePiece across_a, DeclaredClass declared) {
  const std::size_t d = across_b.offset.dim();
  for (const AffinePiece* p : {&across_b, &across_a}) {
    if (p->on_first.dim() != d || p->on_second.dim() != d || p->offset.dim() != d)
      throw DimensionMismatch(d, p->offset.dim(), "composite piece");
  }
  return CyclicMap(Composite{std::move(across_b), std::move(across_a)}, declared, d);
}

/// The planar sets on which the sin family is defined: [0,1]^2 and [0,1] x [2,3].
inline bool is_sin_example_domain(const ConvexSet& a, const ConvexSet& b) {
  const auto* ba = std::get_if<Box>(&a.shape());
  const auto* bb = std::get_if<Box>(&b.shape());
  return ba && bb && ba->lo == Vector{0.0, 0.0} && ba->hi == Vector{1.0, 1.0} &&
         bb->lo == Vector{0.0, 2.0} && bb->hi == Vector{1.0, 3.0};
}

// ---------------------------------------------------------------------------
// Verification sweeps
// ---------------------------------------------------------------------------

struct ConditionReport {
  long checked_pairs = 0;
  long violations = 0;
  double worst_margin = 0.0;
  std::optional<double> inferred_lambda;
};

/// Condition (ii) results split by whether the two inputs share an orientation.
struct SplitConditionReport {
  ConditionReport same_orientation;
  ConditionReport cross_orientation;

  ConditionReport combined() const {
    ConditionReport c;
    c.checked_pairs = same_orientation.checked_pairs + cross_orientation.checked_pairs;
    c.violations = same_orientation.violations + cross_orientation.violations;
    c.worst_margin = std::max(same_orientation.worst_margin, cross_orientation.worst_margin);
    for (const auto* r : {&same_orientation, &cross_orientation})
      if (r->inferred_lambda)
        c.inferred_lambda = std::max(c.inferred_lambda.value_or(0.0), *r->inferred_lambda);
    return c;
  }
};

/// Samples n pairs per orientation and counts images that leave their target set.
template <CyclicOperator Map>
ConditionReport check_cyclic(const Map& t, const ConvexSet& a, const ConvexSet& b, int n_samples,
                             std::uint64_t seed, double tol = 1e-9) {
  if (n_samples < 1) throw InvalidArgument("check_cyclic: n_samples must be >= 1");
  Rng rng_a(derive_seed(seed, 1)), rng_b(derive_seed(seed, 2));
  ConditionReport r;
  for (int i = 0; i < n_samples; ++i) {
    const Vector x = draw(a, rng_a);
    const Vector y = draw(b, rng_b);
    for (const ProductPoint& p :
         {ProductPoint(x, y, Orientation::AcrossB), ProductPoint(y, x, Orientation::BacrossA)}) {
      const ConvexSet& target = target_set(p.orientation, a, b);
      const Vector img = t.evaluate(p);
      const double margin = distance(img, project(target, img));
      r.worst_margin = std::max(r.worst_margin, margin);
      if (margin > tol) ++r.violations;
      ++r.checked_pairs;
    }
  }
  return r;
}

namespace detail {

/// Draws (same, cross) pairs of product points: the same-orientation pair alternates
/// between A x B and B x A; the cross pair is always (A x B, B x A).
struct PairDrawer {
  const ConvexSet& a;
  const ConvexSet& b;
  Rng rng;

  std::pair<ProductPoint, ProductPoint> same(int i) {
    Vector x1 = draw(a, rng), y1 = draw(b, rng), x2 = draw(a, rng), y2 = draw(b, rng);
    if (i % 2 == 0)
      return {ProductPoint(x1, y1, Orientation::AcrossB), ProductPoint(x2, y2, Orientation::AcrossB)};
    return {ProductPoint(y1, x1, Orientation::BacrossA), ProductPoint(y2, x2, Orientation::BacrossA)};
  }
  std::pair<ProductPoint, ProductPoint> cross() {
    Vector x1 = draw(a, rng), y1 = draw(b, rng), x2 = draw(a, rng), y2 = draw(b, rng);
    return {ProductPoint(x1, y1, Orientation::AcrossB), ProductPoint(y2, x2, Orientation::BacrossA)};
  }
};

}  // namespace detail

/// Per-pair minimal constant (||Tp - Tq|| - d) / (||p - q|| - d), clamped at 0,
/// maximized over samples: a lower bound on any valid contraction constant.
template <CyclicOperator Map>
SplitConditionReport estimate_lambda(const Map& t, const ConvexSet& a, const ConvexSet& b, double d,
                                     int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) throw InvalidArgument("estimate_lambda: n_pairs must be >= 1");
  if (!(d >= 0.0)) throw InvalidArgument("estimate_lambda: d must be nonnegative");
  constexpr double kGuard = 1e-9;
  detail::PairDrawer drawer{a, b, Rng(derive_seed(seed, 3))};
  SplitConditionReport out;
  auto consider = [&](ConditionReport& r, const ProductPoint& p, const ProductPoint& q) {
    ++r.checked_pairs;
    const double denom = product_distance(p, q) - d;
    if (denom <= kGuard) return;
    const double num = distance(t.evaluate(p), t.evaluate(q)) - d;
    const double ell = std::max(0.0, num / denom);
    r.inferred_lambda = std::max(r.inferred_lambda.value_or(0.0), ell);
  };
  for (int i = 0; i < n_pairs; ++i) {
    auto [p, q] = drawer.same(i);
    consider(out.same_orientation, p, q);
    auto [u, v] = drawer.cross();
    consider(out.cross_orientation, u, v);
  }
  return out;
}

/// Counts pairs violating ||T p - T q|| <= lambda ||p - q|| + (1 - lambda) d + tol, including
/// same-orientation pairs closer than d, which estimate_lambda cannot use.
template <CyclicOperator Map>
SplitConditionReport check_contraction(const Map& t, const ConvexSet& a, const ConvexSet& b,
                                       double d, double lambda, int n_pairs, std::uint64_t seed,
                                       double tol = 1e-9) {
  if (n_pairs < 1) throw InvalidArgument("check_contraction: n_pairs must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidArgument("check_contraction: lambda must lie in (0,1)");
  detail::PairDrawer drawer{a, b, Rng(derive_seed(seed, 7))};
  SplitConditionReport out;
  auto consider = [&](ConditionReport& r, const ProductPoint& p, const ProductPoint& q) {
    ++r.checked_pairs;
    const double excess = distance(t.evaluate(p), t.evaluate(q)) -
                          (lambda * product_distance(p, q) + (1.0 - lambda) * d);
    r.worst_margin = std::max(r.worst_margin, excess);
    if (excess > tol) ++r.violations;
  };
  for (int i = 0; i < n_pairs; ++i) {
    auto [p, q] = drawer.same(i);
    consider(out.same_orientation, p, q);
    auto [u, v] = drawer.cross();
    consider(out.cross_orientation, u, v);
  }
  return out;
}

/// Counts pairs violating ||S p - S q|| <= ||p - q|| + tol.
template <CyclicOperator Map>
SplitConditionReport check_nonexpansive(const Map& s, const ConvexSet& a, const ConvexSet& b,
                                        int n_pairs, std::uint64_t seed, double tol = 1e-9) {
  if (n_pairs < 1) throw InvalidArgument("check_nonexpansive: n_pairs must be >= 1");
  detail::PairDrawer drawer{a, b, Rng(derive_seed(seed, 4))};
  SplitConditionReport out;
  auto consider = [&](ConditionReport& r, const ProductPoint& p, const ProductPoint& q) {
    ++r.checked_pairs;
    const double excess = distance(s.evaluate(p), s.evaluate(q)) - product_distance(p, q);
    r.worst_margin = std::max(r.worst_margin, excess);
    if (excess > tol) ++r.violations;
  };
  for (int i = 0; i < n_pairs; ++i) {
    auto [p, q] = drawer.same(i);
    consider(out.same_orientation, p, q);
    auto [u, v] = drawer.cross();
    consider(out.cross_orientation, u, v);
  }
  return out;
}

}  // namespace proxipair
